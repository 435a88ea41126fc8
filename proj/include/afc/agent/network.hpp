#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace afc::agent {

/// Fully connected tanh network with a linear scalar head. Parameters live
/// in an external flat buffer laid out layer by layer as [W (out x in, row
/// major), b (out)].
class MlpShape {
public:
    MlpShape() = default;
    explicit MlpShape(std::vector<int> sizes);

    const std::vector<int>& sizes() const { return sizes_; }
    std::size_t layers() const { return sizes_.size() - 1; }
    std::size_t param_count() const { return total_; }
    std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
    std::size_t bias_offset(std::size_t layer) const {
        return offsets_[layer] + static_cast<std::size_t>(sizes_[layer]) * sizes_[layer + 1];
    }
    int input_size() const { return sizes_.front(); }

private:
    std::vector<int> sizes_;
    std::vector<std::size_t> offsets_;
    std::size_t total_ = 0;
};

/// Post-activation values of each layer, input first; reused for backprop.
template <typename T>
using Activations = std::vector<std::vector<T>>;

template <typename T>
T mlp_forward(const MlpShape& shape, std::span<const T> params, std::span<const T> input,
              Activations<T>* acts = nullptr);

/// Accumulates d(out)/d(params) * dout into `grad`.
template <typename T>
void mlp_backward(const MlpShape& shape, std::span<const T> params, const Activations<T>& acts,
                  T dout, std::span<T> grad);

}  // namespace afc::agent
