#include "afc/agent/network.hpp"

#include <cmath>
#include <stdexcept>

namespace afc::agent {

MlpShape::MlpShape(std::vector<int> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.size() < 2 || sizes_.back() != 1) throw std::invalid_argument("MlpShape: need a scalar head");
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        offsets_.push_back(total_);
        total_ += static_cast<std::size_t>(sizes_[l]) * sizes_[l + 1] + sizes_[l + 1];
    }
}

template <typename T>
T mlp_forward(const MlpShape& shape, std::span<const T> params, std::span<const T> input,
              Activations<T>* acts) {
    const auto& sz = shape.sizes();
    std::vector<T> cur(input.begin(), input.end());
    if (acts) {
        acts->resize(sz.size());
        (*acts)[0] = cur;
    }
    for (std::size_t l = 0; l < shape.layers(); ++l) {
        const int in = sz[l];
        const int out = sz[l + 1];
        const T* w = params.data() + shape.weight_offset(l);
        const T* b = params.data() + shape.bias_offset(l);
        std::vector<T> next(static_cast<std::size_t>(out));
        const bool hidden = l + 1 < shape.layers();
        for (int o = 0; o < out; ++o) {
            T s = b[o];
            const T* row = w + static_cast<std::size_t>(o) * in;
            for (int i = 0; i < in; ++i) s += row[i] * cur[static_cast<std::size_t>(i)];
            next[static_cast<std::size_t>(o)] = hidden ? std::tanh(s) : s;
        }
        cur = std::move(next);
        if (acts) (*acts)[l + 1] = cur;
    }
    return cur[0];
}

template <typename T>
void mlp_backward(const MlpShape& shape, std::span<const T> params, const Activations<T>& acts,
                  T dout, std::span<T> grad) {
    const auto& sz = shape.sizes();
    std::vector<T> delta{dout};  // d(out)/d(pre-activation) of the current layer
    for (std::size_t l = shape.layers(); l-- > 0;) {
        const int in = sz[l];
        const int out = sz[l + 1];
        const T* w = params.data() + shape.weight_offset(l);
        T* gw = grad.data() + shape.weight_offset(l);
        T* gb = grad.data() + shape.bias_offset(l);
        const auto& x = acts[l];
        std::vector<T> prev(static_cast<std::size_t>(in), T(0));
        for (int o = 0; o < out; ++o) {
            const T d = delta[static_cast<std::size_t>(o)];
            gb[o] += d;
            T* grow = gw + static_cast<std::size_t>(o) * in;
            const T* wrow = w + static_cast<std::size_t>(o) * in;
            for (int i = 0; i < in; ++i) {
                grow[i] += d * x[static_cast<std::size_t>(i)];
                prev[static_cast<std::size_t>(i)] += d * wrow[i];
            }
        }
        if (l > 0) {
            // previous layer is tanh: derivative 1 - a^2
            for (int i = 0; i < in; ++i) {
                const T a = x[static_cast<std::size_t>(i)];
                prev[static_cast<std::size_t>(i)] *= T(1) - a * a;
            }
        }
        delta = std::move(prev);
    }
}

template float mlp_forward<float>(const MlpShape&, std::span<const float>, std::span<const float>, Activations<float>*);
template double mlp_forward<double>(const MlpShape&, std::span<const double>, std::span<const double>, Activations<double>*);
template void mlp_backward<float>(const MlpShape&, std::span<const float>, const Activations<float>&, float, std::span<float>);
template void mlp_backward<double>(const MlpShape&, std::span<const double>, const Activations<double>&, double, std::span<double>);

}  // namespace afc::agent
