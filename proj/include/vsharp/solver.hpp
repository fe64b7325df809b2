#pragma once

#include <memory>
#include <optional>
#include <unordered_set>

#include "vsharp/denoiser.hpp"
#include "vsharp/multiplier_init.hpp"
#include "vsharp/sens.hpp"

namespace vsharp {

/// Inverse of softplus: returns x with log1p(exp(x)) == y.
template <typename T>
T inverse_softplus(T y) {
  if (y <= T(0)) throw std::invalid_argument("inverse_softplus: argument must be positive");
  if (y > T(30)) return y;
  return std::log(std::expm1(double(y)));
}

/// Positivity floor applied on top of softplus for the penalty and step-size
/// parameters; the solver requires strictly positive values regardless of
/// what the optimizer does to the raw parameters.
inline constexpr double kPositiveFloor = 1e-4;

/// Effective positive value of raw[i] as a scalar node.
template <typename T>
Var positive_at(Tape<T>& tp, Var raw, int i) {
  return add_const(tp, softplus(tp, index_at(tp, raw, i)), T(kPositiveFloor));
}

template <typename T>
T positive_value(T raw) {
  return detail::stable_softplus(raw) + T(kPositiveFloor);
}

/// Raw value whose effective positive value equals `v`.
template <typename T>
T raw_for_positive(T v) {
  return inverse_softplus(v - T(kPositiveFloor));
}

struct SolverState {
  Var image;       // x^t
  Var aux;         // z^t
  Var multiplier;  // u^t
  int block = 0;
};

/// Denoising update: z^{t+1} from (z^t, x^t, u^t/rho) through the
/// regularizer network or proximal map.
template <typename T>
Var z_step(Tape<T>& tp, Denoiser<T>& den, Var z, Var x, Var u, Var rho) {
  return den.apply(tp, z, x, sdiv(tp, u, rho), rho);
}

/// Data consistency via gradient descent: starting from x^t, takes one
/// gradient step per entry of `etas` on
///   0.5*||A w - y||^2 + (rho/2)*||w - z + u/rho||^2.
/// Aborts if ||w|| exceeds divergence_factor times the input norm.
template <typename T>
Var dcgd_x_step(Tape<T>& tp, Var x, Var z_next, Var u, Var rho, const std::vector<Var>& etas, Var y_tilde,
                Var sens, const Tensor<T>& mask, double divergence_factor = 1e6) {
  Var u_over_rho = sdiv(tp, u, rho);
  Var w = x;
  const double guard = divergence_factor * std::max(norm2(tp.val(x)), 1e-6);
  for (std::size_t s = 0; s < etas.size(); ++s) {
    Var residual = sub(tp, forward_op(tp, w, sens, mask), y_tilde);
    Var grad = add(tp, adjoint_op(tp, residual, sens, mask),
                   smul(tp, rho, add(tp, sub(tp, w, z_next), u_over_rho)));
    w = sub(tp, w, smul(tp, etas[s], grad));
    const double n = norm2(tp.val(w));
    if (!std::isfinite(n) || n > guard)
      throw std::runtime_error("dcgd_x_step: diverged at inner step " + std::to_string(s + 1) + " (||w|| = " +
                               std::to_string(n) + ", guard = " + std::to_string(guard) + ")");
  }
  return w;
}

/// Multiplier update u^{t+1} = u^t + rho*(x^{t+1} - z^{t+1}).
template <typename T>
Var u_step(Tape<T>& tp, Var u, Var x_next, Var z_next, Var rho) {
  return add(tp, u, smul(tp, rho, sub(tp, x_next, z_next)));
}

enum class RegKind { none, quadratic, l1 };

template <typename T>
struct ObjectiveReport {
  double data_fidelity = 0;      // 0.5*||A x - y||^2
  double regularizer = 0;        // lambda * R(z)
  double multiplier_term = 0;    // Re<u, x - z>
  double quadratic_penalty = 0;  // (rho/2)*||x - z + u/rho||^2
  double lagrangian = 0;         // df + reg + multiplier_term + (rho/2)*||x-z||^2
};

template <typename T>
ObjectiveReport<T> evaluate_objective(const Tensor<T>& x, const Tensor<T>& z, const Tensor<T>& u, double rho,
                                      double lambda, RegKind kind, const Tensor<T>& y_tilde,
                                      const Tensor<T>& sens, const Tensor<T>& mask) {
  ObjectiveReport<T> rep;
  Tensor<T> r = sub(forward_op(x, sens, mask), y_tilde);
  rep.data_fidelity = 0.5 * dot(r, r);
  switch (kind) {
    case RegKind::none:
      break;
    case RegKind::quadratic:
      rep.regularizer = lambda * dot(z, z);
      break;
    case RegKind::l1: {
      double s = 0;
      const std::int64_t n = z.size() / 2;
      for (std::int64_t i = 0; i < n; ++i) s += std::hypot(double(z[2 * i]), double(z[2 * i + 1]));
      rep.regularizer = lambda * s;
      break;
    }
  }
  Tensor<T> d = sub(x, z);
  rep.multiplier_term = cdot(u, d).real();
  Tensor<T> shifted = d;
  for (std::int64_t i = 0; i < shifted.size(); ++i) shifted[i] += u[i] / T(rho);
  rep.quadratic_penalty = 0.5 * rho * dot(shifted, shifted);
  rep.lagrangian = rep.data_fidelity + rep.regularizer + rep.multiplier_term + 0.5 * rho * dot(d, d);
  return rep;
}

/// The unrolled splitting solver: T blocks of (denoise, data-consistency
/// descent, multiplier update), with trainable per-block penalties, trainable
/// inner step sizes, per-block (or shared) denoisers, and a learned
/// multiplier initializer. Positivity of the penalties and step sizes is
/// enforced through a softplus reparameterization with a small floor.
template <typename T>
class UnrolledAdmm {
public:
  UnrolledAdmm() = default;

  UnrolledAdmm(int num_blocks, int num_dc_steps, MultiplierInitConfig init_cfg, Rng& rng)
      : num_blocks_(num_blocks),
        num_dc_steps_(num_dc_steps),
        penalty_raw_("solver.penalty_raw", truncated_normal_init<T>({num_blocks}, 0.1, 2.0, rng)),
        step_raw_("solver.step_raw", truncated_normal_init<T>({num_dc_steps}, 0.1, 2.0, rng)),
        multiplier_init_("solver.multiplier_init", std::move(init_cfg), rng) {
    if (num_blocks < 1 || num_dc_steps < 0) throw std::invalid_argument("UnrolledAdmm: bad block counts");
  }

  int num_blocks() const { return num_blocks_; }
  int num_dc_steps() const { return num_dc_steps_; }

  /// One denoiser shared by all blocks, or one per block.
  void set_denoisers(std::vector<std::shared_ptr<Denoiser<T>>> d) {
    if (d.size() != 1 && static_cast<int>(d.size()) != num_blocks_)
      throw std::invalid_argument("set_denoisers: need 1 or num_blocks denoisers");
    denoisers_ = std::move(d);
  }

  Denoiser<T>& denoiser_for_block(int block1) {
    if (denoisers_.empty()) throw std::runtime_error("UnrolledAdmm: no denoisers configured");
    return denoisers_.size() == 1 ? *denoisers_[0] : *denoisers_[static_cast<std::size_t>(block1 - 1)];
  }

  /// Run only this ascending 1-based subset of blocks at inference.
  void set_reduced_blocks(std::optional<std::vector<int>> blocks) {
    if (blocks) {
      if (blocks->empty()) throw std::invalid_argument("reduced_blocks: empty subset");
      int prev = 0;
      for (int b : *blocks) {
        if (b <= prev || b > num_blocks_) throw std::invalid_argument("reduced_blocks: must be ascending in 1..T");
        prev = b;
      }
    }
    reduced_blocks_ = std::move(blocks);
  }
  const std::optional<std::vector<int>>& reduced_blocks() const { return reduced_blocks_; }

  /// Pin all effective penalties / step sizes to exact values (test and
  /// classical-solver configurations).
  void set_fixed_penalty(T value) { penalty_raw_.value.fill(raw_for_positive(value)); }
  void set_fixed_step_size(T value) { step_raw_.value.fill(raw_for_positive(value)); }

  T penalty_value(int block1) const { return positive_value(penalty_raw_.value[block1 - 1]); }
  T step_size_value(int s) const { return positive_value(step_raw_.value[s]); }

  MultiplierInitNet<T>& multiplier_init() { return multiplier_init_; }

  SolverState init_state(Tape<T>& tp, Var y_tilde, Var sens, const Tensor<T>& mask) {
    Var x0 = adjoint_op(tp, y_tilde, sens, mask);
    Var u0 = multiplier_init_.forward(tp, x0);
    return SolverState{x0, x0, u0, 0};
  }

  /// Runs the configured blocks and returns every intermediate image
  /// estimate (one per executed block).
  std::vector<Var> reconstruct(Tape<T>& tp, Var y_tilde, Var sens, const Tensor<T>& mask) {
    Var penalty_var = tp.param(penalty_raw_);
    Var step_var = tp.param(step_raw_);
    std::vector<Var> etas;
    etas.reserve(static_cast<std::size_t>(num_dc_steps_));
    for (int s = 0; s < num_dc_steps_; ++s) etas.push_back(positive_at(tp, step_var, s));

    SolverState st = init_state(tp, y_tilde, sens, mask);
    std::vector<int> blocks;
    if (reduced_blocks_)
      blocks = *reduced_blocks_;
    else
      for (int b = 1; b <= num_blocks_; ++b) blocks.push_back(b);

    std::vector<Var> outputs;
    outputs.reserve(blocks.size());
    for (int b : blocks) {
      Var rho = positive_at(tp, penalty_var, b - 1);
      Var z1 = z_step(tp, denoiser_for_block(b), st.aux, st.image, st.multiplier, rho);
      Var x1 = dcgd_x_step(tp, st.image, z1, st.multiplier, rho, etas, y_tilde, sens, mask);
      Var u1 = u_step(tp, st.multiplier, x1, z1, rho);
      st = SolverState{x1, z1, u1, b};
      outputs.push_back(x1);
    }
    return outputs;
  }

  /// Value-only reconstruction (no gradient bookkeeping kept by the caller).
  std::vector<Tensor<T>> reconstruct(const Tensor<T>& y_tilde, const Tensor<T>& sens, const Tensor<T>& mask) {
    Tape<T> tp;
    std::vector<Var> outs = reconstruct(tp, tp.leaf(y_tilde), tp.leaf(sens), mask);
    std::vector<Tensor<T>> res;
    res.reserve(outs.size());
    for (Var v : outs) res.push_back(tp.val(v));
    return res;
  }

  void collect(std::vector<Parameter<T>*>& out) {
    out.push_back(&penalty_raw_);
    out.push_back(&step_raw_);
    multiplier_init_.collect(out);
    std::unordered_set<Denoiser<T>*> seen;
    for (auto& d : denoisers_)
      if (seen.insert(d.get()).second) d->collect(out);
  }

  std::int64_t param_count() {
    std::vector<Parameter<T>*> ps;
    collect(ps);
    std::int64_t n = 0;
    for (auto* p : ps) n += p->value.size();
    return n;
  }

  Parameter<T>& penalty_raw() { return penalty_raw_; }
  Parameter<T>& step_raw() { return step_raw_; }

private:
  int num_blocks_ = 0;
  int num_dc_steps_ = 0;
  Parameter<T> penalty_raw_;
  Parameter<T> step_raw_;
  std::vector<std::shared_ptr<Denoiser<T>>> denoisers_;
  MultiplierInitNet<T> multiplier_init_;
  std::optional<std::vector<int>> reduced_blocks_;
};

}  // namespace vsharp
