#pragma once

#include <cmath>
#include <cstdint>
#include <optional>

#include "snn/units.hpp"

namespace snn {

// Leaky integrate-and-fire constants, SI units.
struct LifParams {
  double capacitance = units::pF(300);
  double leak_conductance = units::nS(30);
  double rest_potential = units::mV(-70);
  // 90 mV above rest: with g_L = 30 nS this puts the rheobase at 2700 pA.
  double threshold = units::mV(20);
  double refractory = units::ms(3);

  double tau_m() const { return capacitance / leak_conductance; }
  void validate() const;
};

struct LifState {
  double v_m = units::mV(-70);
  std::optional<std::int64_t> last_spike_step;

  static LifState at_rest(const LifParams& p) { return LifState{p.rest_potential, std::nullopt}; }
};

struct LifStepResult {
  LifState state;
  bool spiked = false;
};

// Smallest constant current that can ever bring the membrane to threshold.
double min_spiking_current(const LifParams& params);

// Number of whole steps the membrane stays frozen after a spike.
std::int64_t refractory_steps(const LifParams& params, double dt);

// One RK2 (Heun) step of C dV/dt = -g_L (V - E_L) + I with the input current
// held at i_in over the step. Step `step` is the index of the interval
// [step*dt, (step+1)*dt). A neuron that spiked at step s ignores input and
// holds at E_L through step s + refractory_steps. Throws InvalidInput for
// non-finite current or dt <= 0.
LifStepResult lif_step(const LifState& state, const LifParams& params, double i_in,
                       double dt, std::int64_t step);

// Precomputed form of lif_step for a population sharing params and dt.
// Produces bit-identical results to lif_step.
class LifIntegrator {
 public:
  LifIntegrator(const LifParams& params, double dt);

  // Advances in place; returns true on spike.
  bool advance(LifState& s, double i_in, std::int64_t step) const {
    if (s.last_spike_step && step <= *s.last_spike_step + refractory_steps_) return false;
    double v = rk2(s.v_m, i_in);
    if (v >= p_.threshold) {
      s.v_m = p_.rest_potential;
      s.last_spike_step = step;
      return true;
    }
    s.v_m = v < p_.rest_potential ? p_.rest_potential : v;
    return false;
  }

  const LifParams& params() const { return p_; }
  double dt() const { return dt_; }
  std::int64_t refractory_steps() const { return refractory_steps_; }

 private:
  double rk2(double v, double i_in) const {
    const double k1 = (-p_.leak_conductance * (v - p_.rest_potential) + i_in) / p_.capacitance;
    const double k2 =
        (-p_.leak_conductance * (v + k1 * dt_ - p_.rest_potential) + i_in) / p_.capacitance;
    return v + (k1 + k2) * dt_ / 2;
  }

  LifParams p_;
  double dt_;
  std::int64_t refractory_steps_;
};

}  // namespace snn
