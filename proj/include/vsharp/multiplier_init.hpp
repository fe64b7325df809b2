#pragma once

#include "vsharp/unet.hpp"

namespace vsharp {

struct MultiplierInitConfig {
  std::vector<int> channels{8, 8, 16, 16};
  std::vector<int> dilations{1, 1, 2, 4};
  int out_depth = 2;
};

/// Predicts the initial Lagrange multipliers from the zero-filled image:
/// blocks of replication padding + 3x3 dilated convolution + relu, then 1x1
/// convolutions each followed by relu.
template <typename T>
class MultiplierInitNet {
public:
  MultiplierInitNet() = default;

  MultiplierInitNet(const std::string& name, MultiplierInitConfig cfg, Rng& rng) : cfg_(std::move(cfg)) {
    if (cfg_.channels.size() != cfg_.dilations.size() || cfg_.channels.empty() || cfg_.out_depth < 1)
      throw std::invalid_argument("MultiplierInitNet: bad config");
    int ci = 2;
    for (std::size_t i = 0; i < cfg_.channels.size(); ++i) {
      const int d = cfg_.dilations[i];
      blocks_.push_back(ConvLayer<T>(name + ".block" + std::to_string(i), 3, 3, ci, cfg_.channels[i],
                                     Conv2dSpec{1, d, 0}, rng));
      ci = cfg_.channels[i];
    }
    for (int i = 0; i < cfg_.out_depth; ++i) {
      out_.push_back(ConvLayer<T>(name + ".out" + std::to_string(i), 1, 1, ci, 2, Conv2dSpec{}, rng));
      ci = 2;
    }
  }

  /// Zeroes the last 1x1 convolution so the initial multipliers start at 0.
  void zero_output_layer() {
    out_.back().w.value.fill(T(0));
    out_.back().b.value.fill(T(0));
  }

  Var forward(Tape<T>& tp, Var x) {
    const Tensor<T>& v = tp.val(x);
    if (v.rank() != 3 || v.dim(2) != 2)
      throw std::invalid_argument("MultiplierInitNet: expected [H,W,2], got " + shape_str(v.shape()));
    Var h = x;
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      h = replication_pad2d(tp, h, cfg_.dilations[i]);
      h = relu(tp, blocks_[i].apply(tp, h));
    }
    for (auto& layer : out_) h = relu(tp, layer.apply(tp, h));
    return h;
  }

  void collect(std::vector<Parameter<T>*>& out) {
    for (auto& b : blocks_) b.collect(out);
    for (auto& o : out_) o.collect(out);
  }

  std::int64_t param_count() const {
    std::int64_t n = 0;
    for (const auto& b : blocks_) n += b.param_count();
    for (const auto& o : out_) n += o.param_count();
    return n;
  }

private:
  MultiplierInitConfig cfg_;
  std::vector<ConvLayer<T>> blocks_;
  std::vector<ConvLayer<T>> out_;
};

}  // namespace vsharp
