#include "snn/training.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <string>
#include <thread>

#include "snn/errors.hpp"

namespace snn {

PresentationResult train_presentation(const LabeledImage& sample, WeightMatrix& weights,
                                      const FilterBank& filters, const NetworkConfig& cfg,
                                      const LearnConfig& learn, TraceState& trace) {
  if (sample.label < 0 || sample.label >= kNumClasses) {
    throw InvalidInput("label " + std::to_string(sample.label) + " out of range");
  }
  const auto desired_steps =
      desired_spike_train(cfg.presentation, cfg.dt, cfg.desired_rate, cfg.output_lif.refractory);
  const DhatRecursion rec(cfg.dt, cfg.output_lif.capacitance, learn.tau_l);

  trace.reset();
  Simulation sim(sample.pixels, weights, filters, cfg);
  std::size_t next_desired = 0;
  std::array<int, kNumClasses> errors{};
  while (!sim.done()) {
    const auto n = sim.current_step();
    sim.step();
    dhat_step(trace, sim.hidden_c(), rec);

    bool desired_now = next_desired < desired_steps.size() && desired_steps[next_desired] == n;
    if (desired_now) ++next_desired;
    const auto& observed = sim.output_spiked();
    for (int l = 0; l < kNumClasses; ++l) {
      errors[static_cast<std::size_t>(l)] =
          error_signal(desired_now && l == sample.label, observed[static_cast<std::size_t>(l)]);
    }
    accumulate_update(trace, errors, cfg.dt, learn.norm_epsilon);
  }
  apply_update(weights, trace, learn.learning_rate);

  PresentationResult out;
  out.counts = sim.record().output_counts;
  out.predicted = classify(out.counts);
  return out;
}

EpochStats train_epoch(std::span<const LabeledImage> dataset, WeightMatrix& weights,
                       const FilterBank& filters, const NetworkConfig& cfg, const LearnConfig& learn,
                       std::span<const std::size_t> order) {
  cfg.validate();
  learn.validate();
  if (!order.empty() && order.size() != dataset.size()) {
    throw InvalidInput("train_epoch: order has " + std::to_string(order.size()) +
                       " entries for " + std::to_string(dataset.size()) + " samples");
  }
  EpochStats stats;
  TraceState trace(weights.rows(), weights.cols());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& sample = dataset[order.empty() ? i : order[i]];
    const auto res = train_presentation(sample, weights, filters, cfg, learn, trace);
    ++stats.presentations;
    if (res.predicted != sample.label) ++stats.errors;
    if (std::all_of(res.counts.begin(), res.counts.end(), [](int c) { return c == 0; })) ++stats.silent;
  }
  return stats;
}

EvalReport evaluate(std::span<const LabeledImage> dataset, const WeightMatrix& weights,
                    const FilterBank& filters, const NetworkConfig& cfg, int workers) {
  cfg.validate();
  EvalReport report;
  report.total = dataset.size();
  report.predictions.assign(dataset.size(), 0);
  std::vector<char> silent(dataset.size(), 0);

  const auto t0 = std::chrono::steady_clock::now();
  const auto run_range = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < dataset.size(); i += stride) {
      const auto rec = forward_pass(dataset[i].pixels, weights, filters, cfg);
      report.predictions[i] = classify(rec);
      silent[i] = std::all_of(rec.output_counts.begin(), rec.output_counts.end(),
                              [](int c) { return c == 0; });
    }
  };
  const auto n_workers = static_cast<std::size_t>(std::max(1, workers));
  if (n_workers == 1) {
    run_range(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(run_range, w, n_workers);
  }
  const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0);

  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const int label = dataset[i].label;
    const int pred = report.predictions[i];
    ++report.confusion[static_cast<std::size_t>(label)][static_cast<std::size_t>(pred)];
    if (pred == label) ++report.correct;
    if (silent[i]) ++report.silent;
  }
  report.mean_ms_per_image = dataset.empty() ? 0.0 : elapsed.count() / static_cast<double>(dataset.size());
  return report;
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  // mt19937_64 output is fixed by the standard; the modulo draw keeps the
  // sequence identical across standard libraries.
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng() % i);
    std::swap(p[i - 1], p[j]);
  }
  return p;
}

std::vector<LabeledImage> select_subset(std::span<const LabeledImage> dataset, std::size_t total,
                                        std::span<const int> classes, std::uint64_t seed) {
  std::vector<int> wanted(classes.begin(), classes.end());
  if (wanted.empty()) {
    for (int d = 0; d < kNumClasses; ++d) wanted.push_back(d);
  }
  std::sort(wanted.begin(), wanted.end());
  wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());
  for (int d : wanted) {
    if (d < 0 || d >= kNumClasses) throw InvalidInput("class " + std::to_string(d) + " out of range");
  }

  std::array<std::size_t, kNumClasses> quota{};
  const std::size_t unlimited = dataset.size();
  for (std::size_t i = 0; i < wanted.size(); ++i) {
    quota[static_cast<std::size_t>(wanted[i])] =
        total == 0 ? unlimited : total / wanted.size() + (i < total % wanted.size() ? 1 : 0);
  }

  std::vector<LabeledImage> out;
  for (const auto idx : seeded_permutation(dataset.size(), seed)) {
    const auto& s = dataset[idx];
    auto& q = quota[static_cast<std::size_t>(s.label)];
    if (q == 0) continue;
    --q;
    out.push_back(s);
  }
  return out;
}

}  // namespace snn
