#include "snn/lif.hpp"

#include <cmath>
#include <string>

#include "snn/errors.hpp"

namespace snn {

void LifParams::validate() const {
  if (!(capacitance > 0)) throw InvalidInput("LIF capacitance must be > 0");
  if (!(leak_conductance > 0)) throw InvalidInput("LIF leak conductance must be > 0");
  if (!(threshold > rest_potential)) throw InvalidInput("LIF threshold must exceed rest potential");
  if (!(refractory >= 0)) throw InvalidInput("LIF refractory period must be >= 0");
}

double min_spiking_current(const LifParams& params) {
  return params.leak_conductance * (params.threshold - params.rest_potential);
}

std::int64_t refractory_steps(const LifParams& params, double dt) {
  if (!(dt > 0) || !std::isfinite(dt)) throw InvalidInput("dt must be finite and > 0");
  // t_ref/dt is usually meant to be integral (3 ms / 0.1 ms); absorb the
  // representation error before truncating.
  return static_cast<std::int64_t>(std::floor(params.refractory / dt + 1e-9));
}

LifIntegrator::LifIntegrator(const LifParams& params, double dt)
    : p_(params), dt_(dt), refractory_steps_(snn::refractory_steps(params, dt)) {
  p_.validate();
}

LifStepResult lif_step(const LifState& state, const LifParams& params, double i_in, double dt,
                       std::int64_t step) {
  if (!std::isfinite(i_in)) throw InvalidInput("lif_step: input current is not finite");
  if (!(dt > 0) || !std::isfinite(dt)) throw InvalidInput("lif_step: dt must be finite and > 0");
  const LifIntegrator integrator(params, dt);
  LifStepResult out{state, false};
  out.spiked = integrator.advance(out.state, i_in, step);
  return out;
}

}  // namespace snn
