#include "snn/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "snn/errors.hpp"

namespace snn {

double encode_pixel_current(int level, const EncodingParams& params) {
  if (level < 0 || level > 255) {
    throw InvalidInput("pixel level " + std::to_string(level) + " outside 0-255");
  }
  return params.i_0 + level * params.i_p;
}

FilterBank::FilterBank(const std::array<Kernel3x3, kNumFilters>& kernels, double gain)
    : kernels_(kernels), gain_(gain) {
  if (!std::isfinite(gain)) throw InvalidInput("filter gain must be finite");
  for (const auto& k : kernels_) {
    for (double v : k) {
      if (!std::isfinite(v)) throw InvalidInput("filter entries must be finite");
    }
  }
}

const std::array<Kernel3x3, kNumFilters>& FilterBank::standard_kernels() {
  // Quadrant corners: a bright 2x2 block against the dark L around it;
  // -0.8 on the five L cells keeps each kernel zero-sum.
  constexpr double q = -0.8;
  static const std::array<Kernel3x3, kNumFilters> kernels = {{
      // oriented edges (Sobel-like)
      {-1, -2, -1, 0, 0, 0, 1, 2, 1},   // dark above, bright below
      {-1, 0, 1, -2, 0, 2, -1, 0, 1},   // dark left, bright right
      {-2, -1, 0, -1, 0, 1, 0, 1, 2},   // dark top-left, bright bottom-right
      {0, -1, -2, 1, 0, -1, 2, 1, 0},   // dark top-right, bright bottom-left
      // the same edges with opposite polarity
      {1, 2, 1, 0, 0, 0, -1, -2, -1},
      {1, 0, -1, 2, 0, -2, 1, 0, -1},
      {2, 1, 0, 1, 0, -1, 0, -1, -2},
      {0, 1, 2, -1, 0, 1, -2, -1, 0},
      // corners
      {1, 1, q, 1, 1, q, q, q, q},      // top-left
      {q, 1, 1, q, 1, 1, q, q, q},      // top-right
      {q, q, q, 1, 1, q, 1, 1, q},      // bottom-left
      {q, q, q, q, 1, 1, q, 1, 1},      // bottom-right
  }};
  return kernels;
}

FilterBank FilterBank::standard() { return standard(kDefaultFilterGain); }

FilterBank FilterBank::standard(double gain) { return FilterBank(standard_kernels(), gain); }

double single_synapse_weight(double rate, double output_gain, const LifParams& lif, const KernelParams& kernel) {
  const double isi = 1.0 / rate;
  if (!(rate > 0) || !(isi > lif.refractory)) throw InvalidInput("rate must be positive and below 1/t_ref");
  const double current = min_spiking_current(lif) / (1.0 - std::exp(-(isi - lif.refractory) / lif.tau_m()));
  const double mean_c = rate * (kernel.tau_rise_slow - kernel.tau_rise_fast);
  return current / (output_gain * mean_c);
}

std::int64_t NetworkConfig::num_steps() const {
  if (!(dt > 0) || !std::isfinite(dt)) throw InvalidInput("dt must be finite and > 0");
  if (!(presentation > 0) || !std::isfinite(presentation)) {
    throw InvalidInput("presentation time must be finite and > 0");
  }
  const double ratio = presentation / dt;
  const auto n = std::llround(ratio);
  if (n < 1 || std::abs(ratio - static_cast<double>(n)) > 1e-6) {
    throw InvalidInput("presentation time " + std::to_string(presentation) +
                       " s is not a whole number of dt = " + std::to_string(dt) + " s steps");
  }
  return n;
}

void NetworkConfig::validate() const {
  num_steps();
  input_lif.validate();
  hidden_lif.validate();
  output_lif.validate();
  if (!(desired_rate >= 0) || !std::isfinite(desired_rate)) {
    throw InvalidInput("desired rate must be finite and >= 0");
  }
  if (desired_rate * output_lif.refractory >= 1) {
    throw InvalidInput("desired rate is unreachable within the output refractory period");
  }
  if (!(inhibition_weight <= 0) || !std::isfinite(inhibition_weight)) {
    throw InvalidInput("inhibition weight must be finite and <= 0");
  }
  if (!std::isfinite(output_gain)) throw InvalidInput("output gain must be finite");
  if (!(encoding.i_p > 0)) throw InvalidInput("pixel current scale must be > 0");
  if (!(kernel.tau_rise_slow > kernel.tau_rise_fast && kernel.tau_rise_fast > 0)) {
    throw InvalidInput("kernel time constants must satisfy tau1 > tau2 > 0");
  }
}

std::array<double, kFeaturePixels> conv_currents(std::span<const double, kImagePixels> c_map,
                                                 const Kernel3x3& kernel, double gain) {
  std::array<double, kFeaturePixels> out{};
  for (int i = 0; i < kFeatureSide; ++i) {
    for (int j = 0; j < kFeatureSide; ++j) {
      double acc = 0;
      for (int a = 0; a < kFilterSide; ++a) {
        const double* row = &c_map[static_cast<std::size_t>((i + a) * kImageSide + j)];
        const double* w = &kernel[static_cast<std::size_t>(a * kFilterSide)];
        acc += w[0] * row[0] + w[1] * row[1] + w[2] * row[2];
      }
      out[static_cast<std::size_t>(i * kFeatureSide + j)] = acc * gain;
    }
  }
  return out;
}

std::vector<std::int64_t> desired_spike_train(double presentation, double dt, double rate,
                                              double refractory) {
  if (!(rate >= 0) || !std::isfinite(rate)) throw InvalidInput("desired rate must be >= 0");
  if (rate * refractory >= 1) {
    throw InvalidInput("desired rate " + std::to_string(rate) +
                       " Hz is infeasible with the refractory period");
  }
  NetworkConfig shape;
  shape.presentation = presentation;
  shape.dt = dt;
  const std::int64_t n = shape.num_steps();
  std::vector<std::int64_t> train;
  if (rate == 0) return train;
  const std::int64_t period = std::max<std::int64_t>(1, std::llround(1.0 / rate / dt));
  for (std::int64_t s = period - 1; s < n; s += period) train.push_back(s);
  return train;
}

Simulation::Simulation(const Image& image, const WeightMatrix& weights, const FilterBank& filters,
                       const NetworkConfig& cfg)
    : weights_(weights),
      filters_(filters),
      cfg_(cfg),
      num_steps_(cfg.num_steps()),
      input_lif_(cfg.input_lif, cfg.dt),
      hidden_lif_(cfg.hidden_lif, cfg.dt),
      output_lif_(cfg.output_lif, cfg.dt),
      decay_(cfg.kernel, cfg.dt),
      input_v_(kImagePixels, LifState::at_rest(cfg.input_lif)),
      input_k_(kImagePixels),
      hidden_i_(kHiddenSize, 0.0),
      hidden_v_(kHiddenSize, LifState::at_rest(cfg.hidden_lif)),
      hidden_k_(kHiddenSize),
      hidden_c_(kHiddenSize, 0.0) {
  if (weights.rows() != static_cast<std::size_t>(kHiddenSize) ||
      weights.cols() != static_cast<std::size_t>(kNumClasses)) {
    throw DimensionError("weight matrix is " + std::to_string(weights.rows()) + "x" +
                         std::to_string(weights.cols()) + ", network needs " +
                         std::to_string(kHiddenSize) + "x" + std::to_string(kNumClasses));
  }
  for (int p = 0; p < kImagePixels; ++p) {
    input_i_[static_cast<std::size_t>(p)] =
        encode_pixel_current(image[static_cast<std::size_t>(p)], cfg.encoding);
  }
  output_v_.fill(LifState::at_rest(cfg.output_lif));
  record_.input.resize(kImagePixels);
  record_.hidden.resize(kHiddenSize);
  record_.output.resize(kNumClasses);
  record_.num_steps = num_steps_;
}

void Simulation::step() {
  const auto n = step_;
  const auto n32 = static_cast<std::int32_t>(n);

  for (std::size_t p = 0; p < kImagePixels; ++p) {
    const bool spiked = input_lif_.advance(input_v_[p], input_i_[p], n);
    if (spiked) record_.input[p].push_back(n32);
    decay_.advance(input_k_[p], spiked);
    input_c_[p] = input_k_[p].c();
  }

  const std::span<const double, kImagePixels> c_map(input_c_);
  for (int f = 0; f < kNumFilters; ++f) {
    const auto currents = conv_currents(c_map, filters_.kernel(f), filters_.gain());
    std::copy(currents.begin(), currents.end(), hidden_i_.begin() + f * kFeaturePixels);
  }

  for (std::size_t k = 0; k < static_cast<std::size_t>(kHiddenSize); ++k) {
    const bool spiked = hidden_lif_.advance(hidden_v_[k], hidden_i_[k], n);
    if (spiked) {
      if (record_.hidden[k].empty()) active_hidden_.push_back(static_cast<std::int32_t>(k));
      record_.hidden[k].push_back(n32);
    }
  }
  // Only neurons that have ever spiked carry a nonzero kernel.
  for (const auto k32 : active_hidden_) {
    const auto k = static_cast<std::size_t>(k32);
    const bool spiked = !record_.hidden[k].empty() && record_.hidden[k].back() == n32;
    decay_.advance(hidden_k_[k], spiked);
    hidden_c_[k] = hidden_k_[k].c();
  }

  std::array<double, kNumClasses> drive{};
  const double* w = weights_.data().data();
  for (const auto k32 : active_hidden_) {
    const auto k = static_cast<std::size_t>(k32);
    const double c = hidden_c_[k];
    const double* row = w + k * kNumClasses;
    for (std::size_t l = 0; l < kNumClasses; ++l) drive[l] += row[l] * c;
  }
  double c_out_total = 0;
  for (const auto& s : output_k_) c_out_total += s.c();
  for (std::size_t l = 0; l < kNumClasses; ++l) {
    const double inhibition = cfg_.inhibition_weight * (c_out_total - output_k_[l].c());
    output_i_[l] = cfg_.output_gain * (drive[l] + inhibition);
    if (!std::isfinite(output_i_[l])) {
      throw NumericError("non-finite output current at step " + std::to_string(n));
    }
  }
  for (std::size_t l = 0; l < kNumClasses; ++l) {
    const bool spiked = output_lif_.advance(output_v_[l], output_i_[l], n);
    output_spiked_[l] = spiked;
    if (spiked) {
      record_.output[l].push_back(n32);
      ++record_.output_counts[l];
    }
    decay_.advance(output_k_[l], spiked);
  }
  ++step_;
}

SpikeRecord forward_pass(const Image& image, const WeightMatrix& weights,
                         const FilterBank& filters, const NetworkConfig& cfg) {
  cfg.validate();
  Simulation sim(image, weights, filters, cfg);
  while (!sim.done()) sim.step();
  return sim.take_record();
}

int classify(const std::array<int, kNumClasses>& counts) {
  // max_element returns the first maximum, which is the tie-break we want.
  return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

int classify(const SpikeRecord& record) { return classify(record.output_counts); }

}  // namespace snn
