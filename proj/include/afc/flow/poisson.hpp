#pragma once

#include <array>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

namespace afc::flow {

/// FFTW planning is not thread-safe; every planner call takes this lock.
std::mutex& fftw_planner_mutex();

/// Boundary pairing along one axis of the cell-centred pressure grid.
enum class AxisBc {
    Periodic,
    NeumannNeumann,
    NeumannDirichlet,  ///< zero gradient at the low face, zero value at the high face
};

struct PoissonStats {
    int iterations = 0;
    double relative_residual = 0.0;
};

/// Preconditioned conjugate gradient for the standard 7-point (5-point in 2D)
/// Laplacian on a uniform cell-centred grid. Arrays are dense, x fastest,
/// without ghost cells. The spectral preconditioner is the exact inverse of
/// the operator obtained from real-to-real FFTs, so CG terminates after one
/// or two iterations; Jacobi is available for comparison.
class PoissonSolver {
public:
    enum class Preconditioner { Spectral, Jacobi };

    PoissonSolver(int nx, int ny, int nz, double h, std::array<AxisBc, 3> bc,
                  Preconditioner pc, int max_iterations, double tolerance);
    ~PoissonSolver();
    PoissonSolver(const PoissonSolver&) = delete;
    PoissonSolver& operator=(const PoissonSolver&) = delete;

    /// Solves L x = b with `x` as the initial guess. Throws NumericalError if
    /// the relative residual stays above tolerance.
    PoissonStats solve(std::span<const double> b, std::span<double> x);

    /// y = L x
    void apply(std::span<const double> x, std::span<double> y) const;

    /// True when the operator has a constant null space (no Dirichlet face).
    bool singular() const { return singular_; }
    std::size_t size() const { return n_; }

private:
    void precondition(std::span<const double> r, std::span<double> z);
    void remove_mean(std::span<double> x) const;

    int nx_, ny_, nz_;
    double h_;
    std::array<AxisBc, 3> bc_;
    Preconditioner pc_;
    int max_iterations_;
    double tolerance_;
    std::size_t n_;
    bool singular_;

    struct Spectral;
    std::unique_ptr<Spectral> spectral_;
    std::vector<double> r_, z_, p_, ap_;
};

}  // namespace afc::flow
