#include "snn/kernel.hpp"

#include <cmath>

#include "snn/errors.hpp"

namespace snn {

KernelDecay::KernelDecay(const KernelParams& params, double dt) {
  if (!(dt > 0) || !std::isfinite(dt)) throw InvalidInput("kernel: dt must be finite and > 0");
  a = std::exp(-dt / params.tau_rise_slow);
  b = std::exp(-dt / params.tau_rise_fast);
}

KernelStepResult kernel_step(const SynKernelState& state, double dt, bool spike_in,
                             const KernelParams& params) {
  const KernelDecay decay(params, dt);
  KernelStepResult out{state, 0.0};
  decay.advance(out.state, spike_in);
  out.c = out.state.c();
  return out;
}

}  // namespace snn
