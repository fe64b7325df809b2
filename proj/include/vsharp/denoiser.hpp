#pragma once

#include <memory>

#include "vsharp/unet.hpp"

namespace vsharp {

/// Regularization step of the splitting loop: maps (z, x, u/rho) complex
/// images of one shape to a new auxiliary image of that shape. `rho` is the
/// effective (positive) penalty as a scalar node.
template <typename T>
class Denoiser {
public:
  virtual ~Denoiser() = default;
  virtual Var apply(Tape<T>& tp, Var z, Var x, Var u_over_rho, Var rho) = 0;
  virtual void collect(std::vector<Parameter<T>*>& /*out*/) {}
  virtual std::int64_t param_count() const { return 0; }
  virtual std::string kind() const = 0;
};

/// Passes the auxiliary image through unchanged.
template <typename T>
class IdentityDenoiser final : public Denoiser<T> {
public:
  Var apply(Tape<T>&, Var z, Var, Var, Var) override { return z; }
  std::string kind() const override { return "identity"; }
};

/// Exact minimizer of lambda*||z||^2 + (rho/2)*||x - z + u/rho||^2:
///   z = rho * (x + u/rho) / (2*lambda + rho).
template <typename T>
class ProxQuadraticDenoiser final : public Denoiser<T> {
public:
  explicit ProxQuadraticDenoiser(T lambda) : lambda_(lambda) {
    if (lambda < T(0)) throw std::invalid_argument("prox_quadratic: lambda must be >= 0");
  }
  Var apply(Tape<T>& tp, Var, Var x, Var u_over_rho, Var rho) override {
    Var v = add(tp, x, u_over_rho);
    Var factor = div(tp, rho, add_const(tp, rho, T(2) * lambda_));
    return smul(tp, factor, v);
  }
  std::string kind() const override { return "prox_quadratic"; }
  T lambda() const { return lambda_; }

private:
  T lambda_;
};

/// Exact minimizer of lambda*||z||_1 + (rho/2)*||x - z + u/rho||^2:
/// complex soft-threshold of x + u/rho at lambda/rho (magnitude shrink,
/// phase preserved).
template <typename T>
class SoftThresholdDenoiser final : public Denoiser<T> {
public:
  explicit SoftThresholdDenoiser(T lambda) : lambda_(lambda) {
    if (lambda < T(0)) throw std::invalid_argument("soft_threshold: lambda must be >= 0");
  }
  Var apply(Tape<T>& tp, Var, Var x, Var u_over_rho, Var rho) override {
    Var v = add(tp, x, u_over_rho);
    Var thr = mul_const(tp, recip(tp, rho), lambda_);
    return cshrink(tp, v, thr);
  }
  std::string kind() const override { return "soft_threshold"; }

private:
  T lambda_;
};

/// Learned denoiser: the three complex images enter as six real channels
/// in the order [z, x, u/rho]; the network emits the new auxiliary image.
template <typename T>
class UNetDenoiser final : public Denoiser<T> {
public:
  UNetDenoiser(const std::string& name, int scales, int filters, Rng& rng)
      : net_(name, UNetConfig{scales, filters, 6, 2}, rng) {}

  Var apply(Tape<T>& tp, Var z, Var x, Var u_over_rho, Var) override {
    return net_.forward(tp, concat_channels(tp, {z, x, u_over_rho}));
  }
  void collect(std::vector<Parameter<T>*>& out) override { net_.collect(out); }
  std::int64_t param_count() const override { return net_.param_count(); }
  std::string kind() const override { return "unet"; }
  UNet<T>& net() { return net_; }

private:
  UNet<T> net_;
};

}  // namespace vsharp
