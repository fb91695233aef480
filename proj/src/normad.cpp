#include "snn/normad.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "snn/errors.hpp"

namespace snn {

void LearnConfig::validate() const {
  if (!(learning_rate > 0) || !std::isfinite(learning_rate)) {
    throw InvalidInput("learning rate must be finite and > 0");
  }
  if (!(norm_epsilon >= 0)) throw InvalidInput("norm epsilon must be >= 0");
  if (!(tau_l > 0)) throw InvalidInput("tau_L must be > 0");
}

void TraceState::reset() {
  std::fill(d_hat.begin(), d_hat.end(), 0.0);
  auto dw = delta_w.data();
  std::fill(dw.begin(), dw.end(), 0.0);
}

DhatRecursion::DhatRecursion(double dt, double capacitance, double tau_l) {
  if (!(dt > 0) || !std::isfinite(dt)) throw InvalidInput("dhat: dt must be finite and > 0");
  if (!(capacitance > 0)) throw InvalidInput("dhat: capacitance must be > 0");
  decay = std::exp(-dt / tau_l);
  scale = dt / capacitance;
}

void dhat_step(TraceState& trace, std::span<const double> c, const DhatRecursion& rec) {
  if (c.size() != trace.d_hat.size()) {
    throw DimensionError("dhat_step: " + std::to_string(c.size()) + " kernel values for " +
                         std::to_string(trace.d_hat.size()) + " traces");
  }
  for (std::size_t k = 0; k < c.size(); ++k) {
    trace.d_hat[k] = trace.d_hat[k] * rec.decay + c[k] * rec.scale;
  }
}

void dhat_step(TraceState& trace, std::span<const double> c, double dt, double capacitance,
               double tau_l) {
  dhat_step(trace, c, DhatRecursion(dt, capacitance, tau_l));
}

bool accumulate_update(TraceState& trace, std::span<const int> errors, double dt, double eps) {
  const std::size_t n_post = trace.delta_w.cols();
  if (errors.size() != n_post) {
    throw DimensionError("accumulate_update: " + std::to_string(errors.size()) +
                         " error values for " + std::to_string(n_post) + " outputs");
  }
  if (std::all_of(errors.begin(), errors.end(), [](int e) { return e == 0; })) return false;

  double sq = 0;
  for (double d : trace.d_hat) sq += d * d;
  const double norm = std::sqrt(sq);
  if (!(norm > eps)) return false;

  const double step_scale = dt / norm;
  auto dw = trace.delta_w.data();
  for (std::size_t k = 0; k < trace.d_hat.size(); ++k) {
    const double d = trace.d_hat[k];
    if (d == 0) continue;
    const double u = d * step_scale;
    double* row = dw.data() + k * n_post;
    for (std::size_t l = 0; l < n_post; ++l) {
      if (errors[l] != 0) row[l] += errors[l] * u;
    }
  }
  return true;
}

void apply_update(WeightMatrix& weights, TraceState& trace, double learning_rate) {
  if (weights.rows() != trace.delta_w.rows() || weights.cols() != trace.delta_w.cols()) {
    throw DimensionError("apply_update: weight and trace dimensions differ");
  }
  const auto dw = trace.delta_w.data();
  for (std::size_t i = 0; i < dw.size(); ++i) {
    if (!std::isfinite(learning_rate * dw[i])) {
      throw NumericError("non-finite weight update at synapse (" +
                         std::to_string(i / weights.cols()) + ", " +
                         std::to_string(i % weights.cols()) + ")");
    }
  }
  auto w = weights.data();
  for (std::size_t i = 0; i < dw.size(); ++i) w[i] += learning_rate * dw[i];
  trace.reset();
}

}  // namespace snn
