#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "snn/dataset.hpp"
#include "snn/network.hpp"
#include "snn/normad.hpp"

namespace snn {

struct PresentationResult {
  std::array<int, kNumClasses> counts{};
  int predicted = 0;
};

// One supervised presentation: the label neuron is trained toward the
// desired train, the other nine toward silence. delta_w is accumulated over
// the presentation and applied once at the end.
PresentationResult train_presentation(const LabeledImage& sample, WeightMatrix& weights,
                                      const FilterBank& filters, const NetworkConfig& cfg,
                                      const LearnConfig& learn, TraceState& trace);

struct EpochStats {
  std::size_t presentations = 0;
  std::size_t errors = 0;  // misclassified during the online pass
  std::size_t silent = 0;  // presentations with no output spike at all

  double error_rate() const {
    return presentations ? static_cast<double>(errors) / static_cast<double>(presentations) : 0.0;
  }
};

// Sequential online pass over `dataset` in the given order (identity when
// empty). Weights must start at zero on the first epoch.
EpochStats train_epoch(std::span<const LabeledImage> dataset, WeightMatrix& weights,
                       const FilterBank& filters, const NetworkConfig& cfg, const LearnConfig& learn,
                       std::span<const std::size_t> order = {});

struct EvalReport {
  std::size_t total = 0;
  std::size_t correct = 0;
  std::size_t silent = 0;
  std::array<std::array<std::size_t, kNumClasses>, kNumClasses> confusion{};  // [label][predicted]
  std::vector<int> predictions;
  double mean_ms_per_image = 0;

  double accuracy() const {
    return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
  }
};

// Inference only; images are split across `workers` threads.
EvalReport evaluate(std::span<const LabeledImage> dataset, const WeightMatrix& weights,
                    const FilterBank& filters, const NetworkConfig& cfg, int workers = 1);

// Deterministic Fisher-Yates permutation of [0, n) driven by a 64-bit seed.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

// Walks the dataset in seeded-permutation order and keeps the first
// quota-per-class samples of each requested class. With total = 0 every
// sample of the requested classes is kept. Quotas split `total` evenly,
// the remainder going to the lowest class ids.
std::vector<LabeledImage> select_subset(std::span<const LabeledImage> dataset, std::size_t total,
                                        std::span<const int> classes, std::uint64_t seed);

}  // namespace snn
