#pragma once

#include <memory>
#include <string>
#include <vector>

#include "vsharp/nn.hpp"

namespace vsharp {

/// Convolution layer owning its parameters; shared-weight reuse on one tape
/// is fine (each application binds the same Parameters again, gradients
/// accumulate).
template <typename T>
struct ConvLayer {
  Parameter<T> w, b;
  Conv2dSpec spec;

  ConvLayer() = default;
  ConvLayer(const std::string& name, int kh, int kw, int ci, int co, Conv2dSpec s, Rng& rng)
      : w(name + ".w", he_normal<T>({kh, kw, ci, co}, rng)), b(name + ".b", Tensor<T>({co})), spec(s) {}

  Var apply(Tape<T>& tp, Var x) { return conv2d(tp, x, tp.param(w), tp.param(b), spec); }

  void collect(std::vector<Parameter<T>*>& out) {
    out.push_back(&w);
    out.push_back(&b);
  }
  std::int64_t param_count() const { return w.value.size() + b.value.size(); }
};

struct UNetConfig {
  int scales = 2;
  int base_filters = 8;
  int in_channels = 2;
  int out_channels = 2;
};

/// Small U-Net: per scale two 3x3 conv+relu layers; average-pool downsampling,
/// bilinear upsampling, concatenation skips, final 1x1 projection. Inputs not
/// divisible by 2^(scales-1) are replication-padded and cropped back.
template <typename T>
class UNet {
public:
  UNet() = default;

  UNet(const std::string& name, UNetConfig cfg, Rng& rng) : cfg_(cfg) {
    if (cfg.scales < 1 || cfg.base_filters < 1) throw std::invalid_argument("UNet: bad config");
    const int F = cfg.base_filters;
    int ci = cfg.in_channels;
    for (int s = 0; s < cfg.scales; ++s) {
      const int co = F << s;
      enc_.push_back(Block(name + ".enc" + std::to_string(s), ci, co, rng));
      ci = co;
    }
    for (int s = cfg.scales - 2; s >= 0; --s) {
      const int skip = F << s;
      const int up = F << (s + 1);
      dec_.push_back(Block(name + ".dec" + std::to_string(s), up + skip, skip, rng));
    }
    final_ = ConvLayer<T>(name + ".out", 1, 1, F, cfg.out_channels, Conv2dSpec{}, rng);
  }

  Var forward(Tape<T>& tp, Var x) {
    const Tensor<T>& v = tp.val(x);
    if (v.rank() != 3 || v.dim(2) != cfg_.in_channels)
      throw std::invalid_argument("UNet: expected [H,W," + std::to_string(cfg_.in_channels) + "], got " +
                                  shape_str(v.shape()));
    const int H = v.dim(0), W = v.dim(1);
    const int mult = 1 << (cfg_.scales - 1);
    const int Hp = (H + mult - 1) / mult * mult;
    const int Wp = (W + mult - 1) / mult * mult;
    Var h = x;
    if (Hp != H || Wp != W) h = replication_pad2d(tp, h, 0, Hp - H, 0, Wp - W);

    std::vector<Var> skips;
    for (int s = 0; s < cfg_.scales; ++s) {
      if (s > 0) h = avgpool2(tp, h);
      h = enc_[static_cast<std::size_t>(s)].apply(tp, h);
      if (s + 1 < cfg_.scales) skips.push_back(h);
    }
    for (std::size_t d = 0; d < dec_.size(); ++d) {
      Var up = bilinear_upsample2(tp, h);
      h = dec_[d].apply(tp, concat_channels(tp, {up, skips[skips.size() - 1 - d]}));
    }
    h = final_.apply(tp, h);
    if (Hp != H || Wp != W) h = crop2d(tp, h, 0, 0, H, W);
    return h;
  }

  void collect(std::vector<Parameter<T>*>& out) {
    for (auto& b : enc_) b.collect(out);
    for (auto& b : dec_) b.collect(out);
    final_.collect(out);
  }

  std::int64_t param_count() const {
    std::int64_t n = final_.param_count();
    for (const auto& b : enc_) n += b.param_count();
    for (const auto& b : dec_) n += b.param_count();
    return n;
  }

  const UNetConfig& config() const { return cfg_; }

private:
  struct Block {
    ConvLayer<T> c1, c2;
    Block() = default;
    Block(const std::string& name, int ci, int co, Rng& rng)
        : c1(name + ".0", 3, 3, ci, co, Conv2dSpec{1, 1, 1}, rng), c2(name + ".1", 3, 3, co, co, Conv2dSpec{1, 1, 1}, rng) {}
    Var apply(Tape<T>& tp, Var x) { return relu(tp, c2.apply(tp, relu(tp, c1.apply(tp, x)))); }
    void collect(std::vector<Parameter<T>*>& out) {
      c1.collect(out);
      c2.collect(out);
    }
    std::int64_t param_count() const { return c1.param_count() + c2.param_count(); }
  };

  UNetConfig cfg_;
  std::vector<Block> enc_, dec_;
  ConvLayer<T> final_;
};

}  // namespace vsharp
