#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "snn/kernel.hpp"
#include "snn/lif.hpp"
#include "snn/units.hpp"

namespace snn {

inline constexpr int kImageSide = 28;
inline constexpr int kImagePixels = kImageSide * kImageSide;
inline constexpr int kFilterSide = 3;
inline constexpr int kFeatureSide = kImageSide - kFilterSide + 1;  // 26
inline constexpr int kFeaturePixels = kFeatureSide * kFeatureSide;
inline constexpr int kNumFilters = 12;
inline constexpr int kHiddenSize = kNumFilters * kFeaturePixels;  // 8112
inline constexpr int kNumClasses = 10;

// Hidden->output synapses are the only learned parameters.
inline constexpr std::size_t learned_parameter_count() {
  return std::size_t{kHiddenSize} * kNumClasses;
}

using Image = std::array<std::uint8_t, kImagePixels>;  // row-major levels 0-255
using Kernel3x3 = std::array<double, kFilterSide * kFilterSide>;  // row-major w(a,b)

struct EncodingParams {
  double i_0 = units::pA(2700);
  double i_p = units::pA(101.2);  // per pixel level
};

// i(k) = I_0 + k * I_p, held for the whole presentation.
double encode_pixel_current(int level, const EncodingParams& params);

// Twelve fixed 3x3 maps. Kernel entries are dimensionless; the hidden-layer
// current is entry * gain * c.
class FilterBank {
 public:
  FilterBank(const std::array<Kernel3x3, kNumFilters>& kernels, double gain);

  // Edge, inverted edge and corner detectors at the default gain.
  static FilterBank standard();
  static FilterBank standard(double gain);
  static const std::array<Kernel3x3, kNumFilters>& standard_kernels();

  const Kernel3x3& kernel(int f) const { return kernels_.at(static_cast<std::size_t>(f)); }
  const std::array<Kernel3x3, kNumFilters>& kernels() const { return kernels_; }
  double gain() const { return gain_; }

 private:
  std::array<Kernel3x3, kNumFilters> kernels_;
  double gain_;
};

inline constexpr double kDefaultFilterGain = units::pA(4000);

// Weight a lone excitatory synapse needs so that a presynaptic train at
// `rate` holds an output neuron firing at the same rate: the steady current
// for that rate divided by output_gain times the mean kernel output,
// rate * (tau1 - tau2).
double single_synapse_weight(double rate, double output_gain, const LifParams& lif, const KernelParams& kernel);

struct NetworkConfig {
  double presentation = units::ms(100);
  double dt = units::ms(1);
  double desired_rate = 285.0;  // Hz
  // Current injected per weight unit per unit of kernel output.
  double output_gain = units::pA(1000);
  // Lateral inhibition strength in weight units; negative.
  double inhibition_weight = -single_synapse_weight(desired_rate, output_gain, LifParams{}, KernelParams{});
  EncodingParams encoding;
  KernelParams kernel;
  LifParams input_lif;
  LifParams hidden_lif;
  LifParams output_lif;

  std::int64_t num_steps() const;
  void validate() const;
};

// Row-major rows x cols, row = presynaptic hidden neuron, col = output neuron.
class WeightMatrix {
 public:
  WeightMatrix() : WeightMatrix(kHiddenSize, kNumClasses) {}
  WeightMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), w_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return w_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return w_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return w_[r * cols_ + c]; }

  std::span<double> data() { return w_; }
  std::span<const double> data() const { return w_; }

  bool operator==(const WeightMatrix&) const = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> w_;
};

struct SpikeRecord {
  std::vector<std::vector<std::int32_t>> input;   // kImagePixels lists of step indices
  std::vector<std::vector<std::int32_t>> hidden;  // kHiddenSize lists
  std::vector<std::vector<std::int32_t>> output;  // kNumClasses lists
  std::array<int, kNumClasses> output_counts{};
  std::int64_t num_steps = 0;

  bool operator==(const SpikeRecord&) const = default;
};

// Valid 3x3 correlation: out(i,j) = gain * sum_{a,b} w(a,b) * c(i+a, j+b).
std::array<double, kFeaturePixels> conv_currents(std::span<const double, kImagePixels> c_map,
                                                 const Kernel3x3& kernel, double gain);

// Evenly spaced target train. The period is round((1/rate)/dt) steps and the
// k-th spike lands at the end of period k (step k*period - 1), so 285 Hz at
// dt = 0.1 ms gives spikes at 3.5, 7.0, ..., 98.0 ms over 100 ms.
std::vector<std::int64_t> desired_spike_train(double presentation, double dt, double rate,
                                              double refractory = units::ms(3));

// One presentation's full network state. Owned by a single caller; weights
// and filters are borrowed read-only.
class Simulation {
 public:
  Simulation(const Image& image, const WeightMatrix& weights, const FilterBank& filters,
             const NetworkConfig& cfg);

  void step();
  bool done() const { return step_ >= num_steps_; }
  std::int64_t current_step() const { return step_; }
  std::int64_t num_steps() const { return num_steps_; }

  // State after the last completed step.
  std::span<const double> hidden_c() const { return hidden_c_; }
  std::span<const double> hidden_currents() const { return hidden_i_; }
  std::span<const double, kNumClasses> output_currents() const { return output_i_; }
  const std::array<bool, kNumClasses>& output_spiked() const { return output_spiked_; }

  const SpikeRecord& record() const { return record_; }
  SpikeRecord take_record() { return std::move(record_); }

 private:
  const WeightMatrix& weights_;
  const FilterBank& filters_;
  const NetworkConfig& cfg_;
  std::int64_t num_steps_;
  std::int64_t step_ = 0;

  LifIntegrator input_lif_;
  LifIntegrator hidden_lif_;
  LifIntegrator output_lif_;
  KernelDecay decay_;

  std::array<double, kImagePixels> input_i_{};
  std::vector<LifState> input_v_;
  std::vector<SynKernelState> input_k_;
  std::array<double, kImagePixels> input_c_{};

  std::vector<double> hidden_i_;
  std::vector<LifState> hidden_v_;
  std::vector<SynKernelState> hidden_k_;
  std::vector<double> hidden_c_;
  std::vector<std::int32_t> active_hidden_;  // hidden neurons that have spiked at least once

  std::array<double, kNumClasses> output_i_{};
  std::array<LifState, kNumClasses> output_v_{};
  std::array<SynKernelState, kNumClasses> output_k_{};
  std::array<bool, kNumClasses> output_spiked_{};

  SpikeRecord record_;
};

SpikeRecord forward_pass(const Image& image, const WeightMatrix& weights,
                         const FilterBank& filters, const NetworkConfig& cfg);

// Winner = most output spikes, ties to the lowest digit (all-zero -> 0).
int classify(const SpikeRecord& record);
int classify(const std::array<int, kNumClasses>& counts);

}  // namespace snn
