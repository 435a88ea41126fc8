#include "afc/flow/poisson.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <numeric>
#include <sstream>

#include "afc/errors.hpp"

namespace afc::flow {

std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

namespace {

fftw_r2r_kind forward_kind(AxisBc bc) {
    switch (bc) {
        case AxisBc::Periodic: return FFTW_R2HC;
        case AxisBc::NeumannNeumann: return FFTW_REDFT10;
        case AxisBc::NeumannDirichlet: return FFTW_REDFT11;
    }
    return FFTW_R2HC;
}

fftw_r2r_kind backward_kind(AxisBc bc) {
    switch (bc) {
        case AxisBc::Periodic: return FFTW_HC2R;
        case AxisBc::NeumannNeumann: return FFTW_REDFT01;
        case AxisBc::NeumannDirichlet: return FFTW_REDFT11;
    }
    return FFTW_HC2R;
}

/// Eigenvalues of the 1D second-difference operator (times h^2) in the
/// transform basis matching `bc`.
std::vector<double> eigenvalues(int n, AxisBc bc) {
    std::vector<double> lam(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        double arg = 0.0;
        switch (bc) {
            case AxisBc::Periodic: {
                const int f = k <= n / 2 ? k : n - k;
                arg = 2.0 * std::numbers::pi * f / n;
                break;
            }
            case AxisBc::NeumannNeumann: arg = std::numbers::pi * k / n; break;
            case AxisBc::NeumannDirichlet: arg = std::numbers::pi * (k + 0.5) / n; break;
        }
        lam[static_cast<std::size_t>(k)] = 2.0 * std::cos(arg) - 2.0;
    }
    return lam;
}

double normalisation(int n, AxisBc bc) {
    return bc == AxisBc::Periodic ? n : 2.0 * n;
}

}  // namespace

struct PoissonSolver::Spectral {
    double* buffer = nullptr;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    std::vector<double> inv_eig;  // 1 / (eigenvalue * normalisation), 0 for the null mode

    ~Spectral() {
        std::lock_guard lock(fftw_planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
        if (buffer) fftw_free(buffer);
    }
};

PoissonSolver::PoissonSolver(int nx, int ny, int nz, double h, std::array<AxisBc, 3> bc,
                             Preconditioner pc, int max_iterations, double tolerance)
    : nx_(nx), ny_(ny), nz_(nz), h_(h), bc_(bc), pc_(pc), max_iterations_(max_iterations),
      tolerance_(tolerance), n_(static_cast<std::size_t>(nx) * ny * nz) {
    if (nz_ == 1) bc_[2] = AxisBc::Periodic;  // a single plane carries no z coupling
    singular_ = true;
    for (int a = 0; a < 3; ++a) {
        if (bc_[a] == AxisBc::NeumannDirichlet) singular_ = false;
    }
    r_.resize(n_);
    z_.resize(n_);
    p_.resize(n_);
    ap_.resize(n_);

    if (pc_ != Preconditioner::Spectral) return;

    spectral_ = std::make_unique<Spectral>();
    const std::array<int, 3> dims{nx_, ny_, nz_};
    // FFTW wants slowest axis first; drop unit axes.
    std::vector<int> sizes;
    std::vector<fftw_r2r_kind> fwd, bwd;
    for (int a = 2; a >= 0; --a) {
        if (dims[a] == 1) continue;
        sizes.push_back(dims[a]);
        fwd.push_back(forward_kind(bc_[a]));
        bwd.push_back(backward_kind(bc_[a]));
    }
    {
        std::lock_guard lock(fftw_planner_mutex());
        spectral_->buffer = fftw_alloc_real(n_);
        const int rank = static_cast<int>(sizes.size());
        spectral_->forward = fftw_plan_r2r(rank, sizes.data(), spectral_->buffer, spectral_->buffer,
                                           fwd.data(), FFTW_ESTIMATE);
        spectral_->backward = fftw_plan_r2r(rank, sizes.data(), spectral_->buffer,
                                            spectral_->buffer, bwd.data(), FFTW_ESTIMATE);
    }
    if (!spectral_->forward || !spectral_->backward) throw NumericalError("FFTW planning failed");

    const auto ex = eigenvalues(nx_, bc_[0]);
    const auto ey = eigenvalues(ny_, bc_[1]);
    const auto ez = nz_ > 1 ? eigenvalues(nz_, bc_[2]) : std::vector<double>{0.0};
    double norm = 1.0;
    for (int a = 0; a < 3; ++a) {
        if (dims[a] > 1) norm *= normalisation(dims[a], bc_[a]);
    }
    const double inv_h2 = 1.0 / (h_ * h_);
    spectral_->inv_eig.resize(n_);
    for (int k = 0; k < nz_; ++k) {
        for (int j = 0; j < ny_; ++j) {
            for (int i = 0; i < nx_; ++i) {
                const double lam = (ex[i] + ey[j] + ez[k]) * inv_h2;
                const std::size_t idx = (static_cast<std::size_t>(k) * ny_ + j) * nx_ + i;
                spectral_->inv_eig[idx] = std::abs(lam) < 1e-300 ? 0.0 : 1.0 / (lam * norm);
            }
        }
    }
}

PoissonSolver::~PoissonSolver() = default;

void PoissonSolver::apply(std::span<const double> x, std::span<double> y) const {
    const double inv_h2 = 1.0 / (h_ * h_);
    const std::ptrdiff_t sy = nx_;
    const std::ptrdiff_t sz = static_cast<std::ptrdiff_t>(nx_) * ny_;
    const bool three_d = nz_ > 1;

    // Neighbour value across a face: periodic wrap, mirror (Neumann) or
    // antisymmetric (Dirichlet at the high face).
    for (int k = 0; k < nz_; ++k) {
        for (int j = 0; j < ny_; ++j) {
            const std::ptrdiff_t row = k * sz + j * sy;
            for (int i = 0; i < nx_; ++i) {
                const std::ptrdiff_t c = row + i;
                const double xc = x[c];
                double xw, xe, xs, xn;
                if (i > 0) xw = x[c - 1];
                else xw = bc_[0] == AxisBc::Periodic ? x[c + nx_ - 1] : xc;
                if (i < nx_ - 1) xe = x[c + 1];
                else if (bc_[0] == AxisBc::Periodic) xe = x[c - (nx_ - 1)];
                else xe = bc_[0] == AxisBc::NeumannDirichlet ? -xc : xc;
                if (j > 0) xs = x[c - sy];
                else xs = bc_[1] == AxisBc::Periodic ? x[c + (ny_ - 1) * sy] : xc;
                if (j < ny_ - 1) xn = x[c + sy];
                else if (bc_[1] == AxisBc::Periodic) xn = x[c - (ny_ - 1) * sy];
                else xn = bc_[1] == AxisBc::NeumannDirichlet ? -xc : xc;
                double lap = xw + xe + xs + xn - 4.0 * xc;
                if (three_d) {
                    const double xb = k > 0 ? x[c - sz] : x[c + (nz_ - 1) * sz];
                    const double xt = k < nz_ - 1 ? x[c + sz] : x[c - (nz_ - 1) * sz];
                    lap += xb + xt - 2.0 * xc;
                }
                y[c] = lap * inv_h2;
            }
        }
    }
}

void PoissonSolver::precondition(std::span<const double> r, std::span<double> z) {
    if (pc_ == Preconditioner::Jacobi) {
        // Interior diagonal; boundary rows differ slightly, which only costs iterations.
        const double diag = -(nz_ > 1 ? 6.0 : 4.0) / (h_ * h_);
        for (std::size_t i = 0; i < n_; ++i) z[i] = r[i] / diag;
        return;
    }
    double* buf = spectral_->buffer;
    std::copy(r.begin(), r.end(), buf);
    fftw_execute(spectral_->forward);
    const double* inv = spectral_->inv_eig.data();
    for (std::size_t i = 0; i < n_; ++i) buf[i] *= inv[i];
    fftw_execute(spectral_->backward);
    std::copy(buf, buf + n_, z.begin());
}

void PoissonSolver::remove_mean(std::span<double> x) const {
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n_);
    for (double& v : x) v -= mean;
}

PoissonStats PoissonSolver::solve(std::span<const double> b, std::span<double> x) {
    auto dot = [](std::span<const double> a, std::span<const double> c) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * c[i];
        return s;
    };

    std::copy(b.begin(), b.end(), r_.begin());
    if (singular_) {
        remove_mean(r_);
        remove_mean(x);
    }
    const double b_norm = std::sqrt(dot(r_, r_));
    PoissonStats stats;
    if (b_norm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        return stats;
    }

    apply(x, ap_);
    for (std::size_t i = 0; i < n_; ++i) r_[i] -= ap_[i];
    double res = std::sqrt(dot(r_, r_)) / b_norm;
    stats.relative_residual = res;
    if (res <= tolerance_) return stats;

    precondition(r_, z_);
    if (singular_) remove_mean(z_);
    std::copy(z_.begin(), z_.end(), p_.begin());
    double rz = dot(r_, z_);

    for (int it = 1; it <= max_iterations_; ++it) {
        apply(p_, ap_);
        const double pap = dot(p_, ap_);
        if (pap == 0.0 || !std::isfinite(pap)) break;
        const double alpha = rz / pap;
        for (std::size_t i = 0; i < n_; ++i) {
            x[i] += alpha * p_[i];
            r_[i] -= alpha * ap_[i];
        }
        res = std::sqrt(dot(r_, r_)) / b_norm;
        stats.iterations = it;
        stats.relative_residual = res;
        if (res <= tolerance_) {
            if (singular_) remove_mean(x);
            return stats;
        }
        precondition(r_, z_);
        if (singular_) remove_mean(z_);
        const double rz_new = dot(r_, z_);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n_; ++i) p_[i] = z_[i] + beta * p_[i];
    }
    std::ostringstream msg;
    msg << "pressure Poisson solve did not converge: relative residual " << res << " after "
        << stats.iterations << " iterations";
    throw NumericalError(msg.str());
}

}  // namespace afc::flow
