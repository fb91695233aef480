#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "snn/dataset.hpp"
#include "snn/errors.hpp"
#include "snn/network.hpp"

using namespace snn;
using namespace snn::units;

namespace {

Image uniform_image(std::uint8_t level) {
  Image img;
  img.fill(level);
  return img;
}

// Independent valid correlation with explicit index arithmetic.
double brute_conv_at(const std::array<double, kImagePixels>& c, const Kernel3x3& k, int i, int j) {
  double acc = 0;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) acc += k[static_cast<std::size_t>(a * 3 + b)] * c[static_cast<std::size_t>((i + a) * 28 + (j + b))];
  }
  return acc;
}

WeightMatrix random_weights(std::uint64_t seed, double lo, double hi) {
  WeightMatrix w;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  for (double& v : w.data()) v = u(rng);
  return w;
}

}  // namespace

TEST_CASE("pixel encoding is I_0 + k I_p") {
  const EncodingParams p;
  CHECK(to_pA(encode_pixel_current(0, p)) == doctest::Approx(2700));
  CHECK(to_pA(encode_pixel_current(255, p)) == doctest::Approx(28506));
  CHECK(to_pA(encode_pixel_current(100, p)) == doctest::Approx(12820));
  CHECK_THROWS_AS(encode_pixel_current(-1, p), InvalidInput);
  CHECK_THROWS_AS(encode_pixel_current(256, p), InvalidInput);
}

TEST_CASE("default encoding offset equals the input-layer rheobase") {
  const NetworkConfig cfg;
  CHECK(cfg.encoding.i_0 == doctest::Approx(min_spiking_current(cfg.input_lif)).epsilon(1e-12));
}

TEST_CASE("conv_currents") {
  const Kernel3x3 k = {1, 2, 3, -4, 5, 6, 7, -8, 9};
  const double gain = pA(100);
  SUBCASE("zero map gives zero currents") {
    const std::array<double, kImagePixels> c{};
    const auto out = conv_currents(c, k, gain);
    CHECK(std::all_of(out.begin(), out.end(), [](double v) { return v == 0; }));
  }
  SUBCASE("uniform map gives filter sum times gain") {
    std::array<double, kImagePixels> c;
    c.fill(1.0);
    const auto out = conv_currents(c, k, gain);
    for (double v : out) CHECK(v == doctest::Approx(21 * gain));
  }
  SUBCASE("impulses and random maps match the brute-force loop") {
    for (auto [r, col] : {std::pair{0, 0}, {5, 9}, {27, 27}, {13, 0}, {1, 26}}) {
      std::array<double, kImagePixels> c{};
      c[static_cast<std::size_t>(r * 28 + col)] = 1.0;
      const auto out = conv_currents(c, k, gain);
      int nonzero = 0;
      for (int i = 0; i < kFeatureSide; ++i) {
        for (int j = 0; j < kFeatureSide; ++j) {
          const double v = out[static_cast<std::size_t>(i * 26 + j)];
          REQUIRE(v == doctest::Approx(brute_conv_at(c, k, i, j) * gain));
          nonzero += v != 0;
        }
      }
      CHECK(nonzero <= 9);
      // Output (i, j) sees the impulse through w(r - i, col - j).
      if (r >= 2 && col >= 2 && r < 26 && col < 26) {
        CHECK(out[static_cast<std::size_t>((r - 2) * 26 + (col - 2))] == doctest::Approx(k[8] * gain));
        CHECK(out[static_cast<std::size_t>(r * 26 + col)] == doctest::Approx(k[0] * gain));
      }
    }
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1, 2);
    std::array<double, kImagePixels> c;
    for (double& v : c) v = u(rng);
    const auto out = conv_currents(c, k, gain);
    for (int i = 0; i < kFeatureSide; ++i) {
      for (int j = 0; j < kFeatureSide; ++j) {
        REQUIRE(out[static_cast<std::size_t>(i * 26 + j)] == doctest::Approx(brute_conv_at(c, k, i, j) * gain));
      }
    }
  }
}

TEST_CASE("desired spike train") {
  SUBCASE("285 Hz over 100 ms at 0.1 ms") {
    const auto train = desired_spike_train(ms(100), ms(0.1), 285);
    REQUIRE(train.size() == 28);
    for (std::size_t k = 0; k < train.size(); ++k) {
      // Spike time is the end of the step: (index + 1) * dt.
      CHECK(static_cast<double>(train[k] + 1) * 0.1 == doctest::Approx(3.5 * static_cast<double>(k + 1)));
    }
    const double period_s = static_cast<double>(train[1] - train[0]) * ms(0.1);
    CHECK(std::abs(1 / period_s - 285) / 285 < 0.05);
    CHECK(std::abs(static_cast<double>(train.size()) / 0.1 - 285) / 285 < 0.05);
  }
  SUBCASE("one period fits exactly") {
    const auto train = desired_spike_train(ms(10), ms(1), 100);
    REQUIRE(train.size() == 1);
    CHECK(train[0] == 9);
  }
  SUBCASE("zero rate") { CHECK(desired_spike_train(ms(100), ms(1), 0).empty()); }
  SUBCASE("infeasible rate") {
    CHECK_THROWS_AS(desired_spike_train(ms(100), ms(1), 400), InvalidInput);
    CHECK_THROWS_AS(desired_spike_train(ms(100), ms(1), -1), InvalidInput);
  }
  SUBCASE("indices stay inside the presentation and are feasible for the neuron") {
    for (double dt : {ms(0.1), ms(0.5), ms(1)}) {
      const auto train = desired_spike_train(ms(75), dt, 285);
      const auto n = std::llround(ms(75) / dt);
      for (std::size_t k = 0; k < train.size(); ++k) {
        CHECK(train[k] >= 0);
        CHECK(train[k] < n);
        if (k) CHECK(train[k] - train[k - 1] > refractory_steps(LifParams{}, dt));
      }
    }
  }
}

TEST_CASE("presentation must be a whole number of steps") {
  NetworkConfig cfg;
  cfg.presentation = ms(100);
  cfg.dt = ms(0.3);
  CHECK_THROWS_AS(cfg.num_steps(), InvalidInput);
  cfg.dt = ms(0.1);
  CHECK(cfg.num_steps() == 1000);
  cfg.dt = ms(0.5);
  CHECK(cfg.num_steps() == 200);
}

TEST_CASE("blank image never drives the input layer") {
  const NetworkConfig cfg;
  const auto rec = forward_pass(uniform_image(0), WeightMatrix{}, FilterBank::standard(), cfg);
  for (const auto& s : rec.input) CHECK(s.empty());
  for (const auto& s : rec.hidden) REQUIRE(s.empty());
  CHECK(rec.output_counts == std::array<int, kNumClasses>{});
}

TEST_CASE("zero weights keep the output layer silent") {
  const NetworkConfig cfg;
  const auto train = load_mnist_split(SNN_SOURCE_DIR "/data/mnist", "t10k");
  for (std::size_t i = 0; i < 5; ++i) {
    const auto rec = forward_pass(train[i * 97].pixels, WeightMatrix{}, FilterBank::standard(), cfg);
    CHECK(rec.output_counts == std::array<int, kNumClasses>{});
    std::size_t hidden_spikes = 0;
    for (const auto& s : rec.hidden) hidden_spikes += s.size();
    CHECK(hidden_spikes > 0);
  }
}

TEST_CASE("hidden currents equal brute-force recomputation from input spikes") {
  NetworkConfig cfg;
  cfg.presentation = ms(10);
  cfg.dt = ms(0.1);
  std::array<Kernel3x3, kNumFilters> kernels{};
  kernels[0].fill(1.0);
  const FilterBank bank(kernels, pA(1000));
  const WeightMatrix w;
  Simulation sim(uniform_image(255), w, bank, cfg);
  std::vector<std::vector<double>> currents;
  while (!sim.done()) {
    sim.step();
    currents.emplace_back(sim.hidden_currents().begin(), sim.hidden_currents().end());
  }
  const auto& rec = sim.record();
  const auto n = static_cast<std::size_t>(sim.num_steps());

  // Kernel per pixel from its recorded spikes, then the explicit correlation.
  std::vector<std::vector<double>> c_pix(kImagePixels);
  for (std::size_t p = 0; p < kImagePixels; ++p) {
    std::vector<bool> spikes(n, false);
    for (auto s : rec.input[p]) spikes[static_cast<std::size_t>(s)] = true;
    c_pix[p] = oracle::kernel_trace(spikes, cfg.dt, cfg.kernel.tau_rise_slow, cfg.kernel.tau_rise_fast);
  }
  REQUIRE_FALSE(rec.input[0].empty());
  for (std::size_t step = 0; step < n; ++step) {
    std::array<double, kImagePixels> c{};
    for (std::size_t p = 0; p < kImagePixels; ++p) c[p] = c_pix[p][step];
    for (int f = 0; f < kNumFilters; ++f) {
      for (int i = 0; i < kFeatureSide; ++i) {
        for (int j = 0; j < kFeatureSide; ++j) {
          const double expected = brute_conv_at(c, bank.kernel(f), i, j) * bank.gain();
          const double got = currents[step][static_cast<std::size_t>(f * kFeaturePixels + i * 26 + j)];
          REQUIRE(std::abs(got - expected) <= 1e-9 * bank.gain() * 9);
        }
      }
    }
    // Every input neuron fires identically, so map 0 sees nine equal kernels.
    CHECK(currents[step][0] == doctest::Approx(9 * c_pix[0][step] * bank.gain()));
    CHECK(currents[step][kFeaturePixels - 1] == doctest::Approx(currents[step][0]));
  }
}

TEST_CASE("input rate is non-decreasing in pixel level") {
  Image img{};
  for (std::size_t p = 0; p < kImagePixels; ++p) img[p] = static_cast<std::uint8_t>(p * 256 / kImagePixels);
  const NetworkConfig cfg;
  const auto rec = forward_pass(img, WeightMatrix{}, FilterBank::standard(), cfg);
  for (std::size_t p = 1; p < kImagePixels; ++p) CHECK(rec.input[p].size() >= rec.input[p - 1].size());
  CHECK(rec.input[0].empty());
  CHECK(rec.input.back().size() > 10);
}

TEST_CASE("default filter gain puts a maximally driven hidden neuron at 100-300 Hz") {
  const NetworkConfig cfg;
  const auto bank = FilterBank::standard();
  for (int f = 0; f < kNumFilters; ++f) {
    Image img{};
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        if (bank.kernel(f)[static_cast<std::size_t>(a * 3 + b)] > 0) img[static_cast<std::size_t>((10 + a) * 28 + 10 + b)] = 255;
      }
    }
    const auto rec = forward_pass(img, WeightMatrix{}, bank, cfg);
    const double rate = static_cast<double>(rec.hidden[static_cast<std::size_t>(f * kFeaturePixels + 10 * 26 + 10)].size()) / cfg.presentation;
    CAPTURE(f);
    CHECK(rate >= 100);
    CHECK(rate <= 300);
  }
}

TEST_CASE("forward pass is deterministic and records are consistent") {
  const NetworkConfig cfg;
  const auto data = load_mnist_split(SNN_SOURCE_DIR "/data/mnist", "t10k");
  const auto w = random_weights(1, -0.5, 1.5);
  const auto a = forward_pass(data[3].pixels, w, FilterBank::standard(), cfg);
  const auto b = forward_pass(data[3].pixels, w, FilterBank::standard(), cfg);
  CHECK(a == b);
  REQUIRE(a.hidden.size() == static_cast<std::size_t>(kHiddenSize));
  REQUIRE(a.input.size() == static_cast<std::size_t>(kImagePixels));
  int total = 0;
  for (int l = 0; l < kNumClasses; ++l) {
    CHECK(a.output_counts[static_cast<std::size_t>(l)] == static_cast<int>(a.output[static_cast<std::size_t>(l)].size()));
    total += a.output_counts[static_cast<std::size_t>(l)];
  }
  CHECK(total > 0);
  for (const auto* layer : {&a.input, &a.hidden, &a.output}) {
    for (const auto& s : *layer) {
      for (auto t : s) REQUIRE((t >= 0 && t < a.num_steps));
    }
  }
}

TEST_CASE("lateral inhibition never raises a non-winner's count") {
  const auto data = load_mnist_split(SNN_SOURCE_DIR "/data/mnist", "t10k");
  const auto w = random_weights(2, -0.5, 1.5);
  NetworkConfig with;
  NetworkConfig without = with;
  without.inhibition_weight = 0;
  int reduced = 0;
  for (std::size_t i = 0; i < 20; ++i) {
    const auto& img = data[i * 37].pixels;
    const auto inh = forward_pass(img, w, FilterBank::standard(), with);
    const auto free = forward_pass(img, w, FilterBank::standard(), without);
    const int winner = classify(inh);
    for (std::size_t l = 0; l < kNumClasses; ++l) {
      if (static_cast<int>(l) == winner) continue;
      CHECK(inh.output_counts[l] <= free.output_counts[l]);
      reduced += inh.output_counts[l] < free.output_counts[l];
    }
  }
  CHECK(reduced > 0);
}

TEST_CASE("weight dimensions are checked") {
  const NetworkConfig cfg;
  CHECK_THROWS_AS(forward_pass(uniform_image(0), WeightMatrix(100, 10), FilterBank::standard(), cfg), DimensionError);
  CHECK_THROWS_AS(forward_pass(uniform_image(0), WeightMatrix(8112, 9), FilterBank::standard(), cfg), DimensionError);
}

TEST_CASE("classify takes the most spikes, ties to the lowest digit") {
  std::array<int, kNumClasses> counts{};
  CHECK(classify(counts) == 0);
  counts[7] = 28;
  CHECK(classify(counts) == 7);
  counts = {5, 5, 0, 0, 0, 0, 0, 0, 0, 0};
  CHECK(classify(counts) == 0);
  counts = {0, 0, 3, 0, 0, 0, 0, 0, 9, 9};
  CHECK(classify(counts) == 8);
}

TEST_CASE("learned parameter count") {
  CHECK(kHiddenSize == 8112);
  CHECK(learned_parameter_count() == 81120);
  CHECK(WeightMatrix{}.size() == 81120);
}

TEST_CASE("default inhibition is minus the single-synapse weight for the desired rate") {
  const NetworkConfig cfg;
  const LifParams lif;
  const KernelParams k;
  const double w = single_synapse_weight(cfg.desired_rate, cfg.output_gain, lif, k);
  CHECK(cfg.inhibition_weight == -w);
  CHECK(w == doctest::Approx(50.93).epsilon(1e-3));

  // The current it delivers at the mean kernel output gives an ISI of 1/rate.
  const double isi = 1.0 / cfg.desired_rate;
  const double mean_c = cfg.desired_rate * (k.tau_rise_slow - k.tau_rise_fast);
  const double current = w * cfg.output_gain * mean_c;
  CHECK(lif.refractory + oracle::lif_first_spike_time(current, min_spiking_current(lif), lif.tau_m()) ==
        doctest::Approx(isi).epsilon(1e-12));

  // mean_c matches the long-run average of a periodic train, sampled finely.
  const double dt = units::us(5);
  double sum = 0;
  int samples = 0;
  for (int n = 200000; n < 400000; ++n) {
    const double t = n * dt;
    for (int m = 0; m * isi <= t; ++m) sum += std::exp(-(t - m * isi) / k.tau_rise_slow) - std::exp(-(t - m * isi) / k.tau_rise_fast);
    ++samples;
  }
  CHECK(sum / samples == doctest::Approx(mean_c).epsilon(0.01));

  CHECK_THROWS_AS(single_synapse_weight(400, cfg.output_gain, lif, k), InvalidInput);
}
