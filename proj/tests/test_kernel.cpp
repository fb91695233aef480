#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "snn/errors.hpp"
#include "snn/kernel.hpp"

using namespace snn;
using namespace snn::units;

namespace {

std::vector<double> run_recursion(const std::vector<bool>& spikes, double dt) {
  const KernelDecay decay(KernelParams{}, dt);
  SynKernelState s;
  std::vector<double> c;
  c.reserve(spikes.size());
  for (bool sp : spikes) {
    decay.advance(s, sp);
    c.push_back(s.c());
  }
  return c;
}

double rel_diff(double x, double y) {
  const double scale = std::max(std::abs(x), std::abs(y));
  return scale == 0 ? 0.0 : std::abs(x - y) / scale;
}

std::vector<bool> random_train(std::size_t n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution spike(p);
  std::vector<bool> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = spike(rng);
  return out;
}

}  // namespace

TEST_CASE("no input keeps the kernel at zero") {
  SynKernelState s;
  for (int n = 0; n < 1000; ++n) {
    const auto r = kernel_step(s, ms(0.1), false);
    CHECK(r.c == 0);
    s = r.state;
  }
}

TEST_CASE("single spike reproduces the double exponential and its peak") {
  const double dt = us(10);
  std::vector<bool> spikes(2000, false);
  spikes[0] = true;
  const auto c = run_recursion(spikes, dt);
  for (std::size_t n = 0; n < c.size(); ++n) {
    const double t = static_cast<double>(n) * dt;
    REQUIRE(std::abs(c[n] - (std::exp(-t / ms(5)) - std::exp(-t / ms(1.25)))) < 1e-9);
  }
  const auto peak = std::max_element(c.begin(), c.end());
  const double t_peak = static_cast<double>(peak - c.begin()) * dt;
  const double tau1 = ms(5), tau2 = ms(1.25);
  const double t_star = std::log(tau1 / tau2) * tau1 * tau2 / (tau1 - tau2);
  CHECK(t_star == doctest::Approx(ms(2.310)).epsilon(1e-3));
  CHECK(std::abs(t_peak - t_star) <= dt);
  const double c_star = std::exp(-t_star / tau1) - std::exp(-t_star / tau2);
  CHECK(c_star == doctest::Approx(0.4724).epsilon(1e-4));
  CHECK(std::abs(*peak - c_star) < 1e-6);
}

TEST_CASE("recursion equals direct summation over past spikes") {
  const double dt = ms(0.1);
  const auto spikes = random_train(1000, 0.05, 11);
  const auto fast = run_recursion(spikes, dt);
  const auto slow = oracle::kernel_trace(spikes, dt, ms(5), ms(1.25));
  double worst = 0;
  for (std::size_t n = 0; n < fast.size(); ++n) worst = std::max(worst, rel_diff(fast[n], slow[n]));
  CHECK(worst < 1e-9);
}

TEST_CASE("recursion stays on the oracle over 10^4 steps") {
  const double dt = ms(0.1);
  const auto spikes = random_train(10000, 0.02, 5);
  const auto fast = run_recursion(spikes, dt);
  const auto slow = oracle::kernel_trace(spikes, dt, ms(5), ms(1.25));
  double worst = 0;
  for (std::size_t n = 0; n < fast.size(); ++n) worst = std::max(worst, rel_diff(fast[n], slow[n]));
  CHECK(worst < 1e-9);
}

TEST_CASE("a spike after a long silence keeps the tail's relative precision") {
  std::vector<bool> spikes(700, false);
  spikes[0] = spikes[650] = true;
  const auto fast = run_recursion(spikes, ms(1));
  const auto slow = oracle::kernel_trace(spikes, ms(1), ms(5), ms(1.25));
  CHECK(slow[650] > 0);
  CHECK(slow[650] < 1e-50);
  CHECK(rel_diff(fast[650], slow[650]) < 1e-12);
}

TEST_CASE("kernel is linear in disjoint spike trains") {
  const double dt = ms(0.5);
  auto a = random_train(3000, 0.05, 1);
  auto b = random_train(3000, 0.05, 2);
  std::vector<bool> both(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] && b[i]) b[i] = false;
    both[i] = a[i] || b[i];
  }
  const auto ca = run_recursion(a, dt), cb = run_recursion(b, dt), cab = run_recursion(both, dt);
  for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(std::abs(cab[i] - (ca[i] + cb[i])) < 1e-12);
}

TEST_CASE("impulse-driven traces keep a >= b >= 0") {
  const auto spikes = random_train(5000, 0.1, 9);
  const KernelDecay decay(KernelParams{}, ms(0.3));
  SynKernelState s;
  for (bool sp : spikes) {
    decay.advance(s, sp);
    REQUIRE(s.b >= 0);
    REQUIRE(s.a >= s.b);
  }
}

TEST_CASE("invalid dt is rejected") {
  CHECK_THROWS_AS(kernel_step({}, 0.0, true), InvalidInput);
  CHECK_THROWS_AS(kernel_step({}, -1.0, true), InvalidInput);
}
