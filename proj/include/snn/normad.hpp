#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "snn/network.hpp"
#include "snn/units.hpp"

namespace snn {

struct LearnConfig {
  double learning_rate = 100.0;
  // Steps where ||d_hat|| <= norm_epsilon contribute nothing.
  double norm_epsilon = 1e-12;
  double tau_l = units::ms(1);  // membrane impulse response time constant

  void validate() const;
};

// Per-presentation learning state: the filtered kernel d_hat for every
// presynaptic neuron and the accumulated (un-scaled) weight change.
struct TraceState {
  std::vector<double> d_hat;
  WeightMatrix delta_w;

  TraceState(std::size_t n_pre, std::size_t n_post)
      : d_hat(n_pre, 0.0), delta_w(n_pre, n_post) {}
  TraceState() : TraceState(kHiddenSize, kNumClasses) {}

  void reset();
};

// d_hat(n) = d_hat(n-1) * decay + c(n) * scale, with decay = exp(-dt/tau_L)
// and scale = dt / C.
struct DhatRecursion {
  double decay;
  double scale;
  DhatRecursion(double dt, double capacitance, double tau_l);
};

void dhat_step(TraceState& trace, std::span<const double> c, double dt, double capacitance,
               double tau_l = units::ms(1));
void dhat_step(TraceState& trace, std::span<const double> c, const DhatRecursion& rec);

// e(t) = S_desired(t) - S_observed(t) on one time bin.
inline int error_signal(bool desired, bool observed) {
  return static_cast<int>(desired) - static_cast<int>(observed);
}

// If any error is nonzero and ||d_hat||_2 > eps, adds e_l * d_hat_k/||d_hat|| * dt
// to delta_w(k, l). Returns whether anything was added.
bool accumulate_update(TraceState& trace, std::span<const int> errors, double dt, double eps);

// w += r * delta_w, then resets the trace. Throws NumericError (weights
// untouched) if the update is not finite.
void apply_update(WeightMatrix& weights, TraceState& trace, double learning_rate);

}  // namespace snn
