#pragma once

#include "snn/units.hpp"

namespace snn {

// Double-exponential synaptic kernel e^{-t/tau1} - e^{-t/tau2}.
struct KernelParams {
  double tau_rise_slow = units::ms(5);    // tau1, governs a
  double tau_rise_fast = units::ms(1.25); // tau2, governs b
};

// Iterative form of the kernel convolved with a spike train: each presynaptic
// spike adds 1 to both traces, which then decay with their own time constant.
// The output is read from the decayed traces before this step's spike is
// added (the spike's own term is 1 - 1 = 0).
struct SynKernelState {
  double a = 0;
  double b = 0;
  double out = 0;
  double c() const { return out; }
};

// Per-step decay factors, computed once for a given dt.
struct KernelDecay {
  double a;
  double b;
  KernelDecay(const KernelParams& params, double dt);

  void advance(SynKernelState& s, bool spike_in) const {
    const double inc = spike_in ? 1.0 : 0.0;
    const double da = s.a * a, db = s.b * b;
    s.out = da - db;
    s.a = da + inc;
    s.b = db + inc;
  }
};

struct KernelStepResult {
  SynKernelState state;
  double c;
};

KernelStepResult kernel_step(const SynKernelState& state, double dt, bool spike_in,
                             const KernelParams& params = {});

}  // namespace snn
