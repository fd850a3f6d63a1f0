#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "dds/errors.hpp"
#include "dds/rng.hpp"
#include "dds/scheduler.hpp"
#include "dds/thermo.hpp"
#include "oracle_helpers.hpp"

using dds::entropy_curve;
using dds::progress_curve;
using dds::strategy_type;
using dds::time_schedule;
using dds::wasserstein_curve;

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i)
    t[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  t.front() = lo;
  t.back() = hi;
  return t;
}

// Forward evaluation of the piecewise-linear warp, used to close the loop
// around invert_schedule.
double interp_phi(const std::vector<double>& t, const std::vector<double>& phi,
                  double x) {
  if (x <= t.front()) return phi.front();
  if (x >= t.back()) return phi.back();
  size_t j = 0;
  while (t[j + 1] < x) ++j;
  double frac = (x - t[j]) / (t[j + 1] - t[j]);
  return phi[j] + frac * (phi[j + 1] - phi[j]);
}

// Synthetic curve with a given rate profile; the standard-error, activity,
// and cumulative columns are filled consistently so validate() passes.
entropy_curve synthetic_entropy(const std::vector<double>& t,
                                const std::vector<double>& h) {
  entropy_curve c;
  c.t = t;
  c.h_na = h;
  c.h_na_se.assign(t.size(), 0.0);
  c.activity.assign(t.size(), 1.0);
  c.h_na_cum.assign(t.size(), 0.0);
  for (size_t i = 1; i < t.size(); ++i) {
    double a = std::max(h[i - 1], 0.0), b = std::max(h[i], 0.0);
    c.h_na_cum[i] = c.h_na_cum[i - 1] + 0.5 * (a + b) * (t[i] - t[i - 1]);
  }
  return c;
}

dds::distribution binomial_p0(int n_trials) {
  dds::distribution d;
  d.p.assign(n_trials + 1, 0.0);
  double c = 1.0;
  for (int k = 0; k <= n_trials; ++k) {
    d.p[k] = c / std::pow(2.0, n_trials);
    c = c * (n_trials - k) / (k + 1);
  }
  return d;
}

}  // namespace

// ---- progress and warp ---------------------------------------------------------

TEST_CASE("cumulative progress is the trapezoid rule with negative rates clamped") {
  std::vector<double> t = {0.0, 0.5, 1.0};
  progress_curve p = dds::cumulative_progress(t, {2.0, 2.0, 2.0});
  CHECK(p.c[0] == 0.0);
  CHECK(p.c[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p.c[2] == doctest::Approx(2.0).epsilon(1e-15));

  progress_curve q = dds::cumulative_progress(t, {-3.0, -3.0, 4.0});
  CHECK(q.c[1] == 0.0);
  CHECK(q.c[2] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("warp normalizes progress to [0, 1]") {
  std::vector<double> t = linspace(0.0, 1.0, 5);
  progress_curve linear;
  linear.t = t;
  linear.c = t;
  std::vector<double> phi = dds::warp(linear);
  for (size_t i = 0; i < t.size(); ++i)
    CHECK(phi[i] == doctest::Approx(t[i]).epsilon(1e-15));
  CHECK(phi.back() == 1.0);

  progress_curve quad;
  quad.t = t;
  quad.c.resize(t.size());
  for (size_t i = 0; i < t.size(); ++i) quad.c[i] = t[i] * t[i];
  phi = dds::warp(quad);
  CHECK(phi[2] == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("warp rejects degenerate and malformed progress") {
  progress_curve zero;
  zero.t = {0.0, 1.0};
  zero.c = {0.0, 0.0};
  CHECK_THROWS_AS(dds::warp(zero), dds::config_error);

  progress_curve offset;
  offset.t = {0.0, 1.0};
  offset.c = {0.5, 1.0};
  CHECK_THROWS_AS(dds::warp(offset), dds::config_error);

  progress_curve shrink;
  shrink.t = {0.0, 0.5, 1.0};
  shrink.c = {0.0, 1.0, 0.5};
  CHECK_THROWS_AS(dds::warp(shrink), dds::config_error);
}

// ---- inversion -------------------------------------------------------------------

TEST_CASE("identity warp inverts to equispaced times") {
  std::vector<double> t = linspace(0.0, 1.0, 101);
  std::vector<double> times = dds::invert_schedule(t, t, 4);
  std::vector<double> expected = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (int k = 0; k <= 4; ++k)
    CHECK(std::abs(times[k] - expected[k]) < 1e-12);
}

TEST_CASE("quadratic progress inverts to the square-root grid") {
  std::vector<double> t = linspace(0.0, 1.0, 20001);
  std::vector<double> rate(t.size());
  for (size_t i = 0; i < t.size(); ++i) rate[i] = 2.0 * t[i];
  progress_curve p = dds::cumulative_progress(t, rate);
  std::vector<double> phi = dds::warp(p);
  for (int steps : {4, 16, 64}) {
    std::vector<double> times = dds::invert_schedule(t, phi, steps);
    for (int k = 0; k <= steps; ++k) {
      double expected = std::sqrt(static_cast<double>(k) / steps);
      CHECK(std::abs(times[k] - expected) < 1e-6);
    }
  }
}

TEST_CASE("single step schedules hold only the endpoints") {
  std::vector<double> t = linspace(1e-5, 1.0, 33);
  std::vector<double> phi(t.size());
  for (size_t i = 0; i < t.size(); ++i)
    phi[i] = (t[i] - t.front()) / (t.back() - t.front());
  phi.back() = 1.0;
  std::vector<double> times = dds::invert_schedule(t, phi, 1);
  CHECK(times.size() == 2);
  CHECK(times[0] == 1e-5);
  CHECK(times[1] == 1.0);

  time_schedule s = dds::uniform_schedule(1);
  CHECK(s.times == std::vector<double>{1e-5, 1.0});
}

TEST_CASE("plateaus resolve to the smallest time attaining the level") {
  std::vector<double> t = {0.0, 0.25, 0.5, 1.0};
  std::vector<double> phi = {0.0, 0.5, 0.5, 1.0};
  std::vector<double> times = dds::invert_schedule(t, phi, 2);
  CHECK(times[1] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("inversion rejects decreasing or unnormalized warps") {
  std::vector<double> t = {0.0, 0.5, 1.0};
  std::vector<double> bad = {0.0, 0.6, 0.5};
  CHECK_THROWS_AS(dds::invert_schedule(t, bad, 4), dds::config_error);
  std::vector<double> base = {0.0, 0.4, 0.9};
  CHECK_THROWS_AS(dds::invert_schedule(t, base, 4), dds::config_error);
  std::vector<double> ok = {0.0, 0.4, 1.0};
  CHECK_THROWS_AS(dds::invert_schedule(t, ok, 0), dds::config_error);
}

TEST_CASE("round trip holds on random monotone curves") {
  dds::rng g(2024);
  for (int rep = 0; rep < 1000; ++rep) {
    int n = 16 + static_cast<int>(g.uniform_int(185));
    std::vector<double> t(n), c(n);
    t[0] = 0.0;
    c[0] = 0.0;
    for (int i = 1; i < n; ++i) {
      t[i] = t[i - 1] + 1e-3 + g.u01();
      c[i] = c[i - 1] + 1e-6 + g.u01();
    }
    progress_curve p;
    p.t = t;
    p.c = c;
    std::vector<double> phi = dds::warp(p);
    int steps = 1 + static_cast<int>(g.uniform_int(64));
    std::vector<double> times = dds::invert_schedule(t, phi, steps);
    for (int k = 0; k <= steps; ++k) {
      double level = static_cast<double>(k) / steps;
      CHECK(std::abs(interp_phi(t, phi, times[k]) - level) < 1e-6);
    }
    for (int k = 1; k <= steps; ++k) CHECK(times[k] > times[k - 1]);
  }
}

TEST_CASE("coarse schedules are subsets of their refinements") {
  dds::rng g(77);
  for (int rep = 0; rep < 20; ++rep) {
    int n = 32 + static_cast<int>(g.uniform_int(100));
    std::vector<double> t(n), c(n);
    t[0] = 0.0;
    c[0] = 0.0;
    for (int i = 1; i < n; ++i) {
      t[i] = t[i - 1] + 0.01 + g.u01();
      c[i] = c[i - 1] + 0.01 + g.u01();
    }
    progress_curve p;
    p.t = t;
    p.c = c;
    std::vector<double> phi = dds::warp(p);
    for (int steps : {4, 6, 10}) {
      std::vector<double> coarse = dds::invert_schedule(t, phi, steps);
      std::vector<double> fine = dds::invert_schedule(t, phi, 2 * steps);
      for (int k = 0; k <= steps; ++k)
        CHECK(std::abs(coarse[k] - fine[2 * k]) < 1e-9);
    }
  }
}

// ---- strategy constructors -------------------------------------------------------

TEST_CASE("uniform schedule has equal gaps and pinned endpoints") {
  time_schedule s = dds::uniform_schedule(2);
  CHECK(s.times[0] == 1e-5);
  CHECK(s.times[1] == doctest::Approx((1.0 + 1e-5) / 2.0).epsilon(1e-15));
  CHECK(s.times[2] == 1.0);

  s = dds::uniform_schedule(17);
  double gap = (1.0 - 1e-5) / 17.0;
  for (int k = 1; k <= 17; ++k)
    CHECK(std::abs((s.times[k] - s.times[k - 1]) - gap) < 1e-15);
  CHECK(s.strategy == strategy_type::uniform);
}

TEST_CASE("constant rate collapses both strategies to the uniform schedule") {
  std::vector<double> t = dds::time_grid(1e-5, 513);
  entropy_curve flat = synthetic_entropy(t, std::vector<double>(t.size(), 0.7));
  time_schedule eds = dds::eds_schedule(flat, 8);
  CHECK(eds.strategy == strategy_type::eds);

  wasserstein_curve w;
  w.t = t;
  w.w_rate.assign(t.size(), 0.3);
  w.w_cum.resize(t.size());
  for (size_t i = 0; i < t.size(); ++i) w.w_cum[i] = 0.3 * (t[i] - t.front());
  w.w_cum.front() = 0.0;
  time_schedule wds = dds::wds_schedule(w, 8);
  CHECK(wds.strategy == strategy_type::wds);

  time_schedule flat_sched = dds::uniform_schedule(8);
  for (int k = 0; k <= 8; ++k) {
    CHECK(std::abs(eds.times[k] - flat_sched.times[k]) < 1e-12);
    CHECK(std::abs(wds.times[k] - flat_sched.times[k]) < 1e-12);
  }
}

TEST_CASE("square-root transport progress inverts to the squared grid") {
  std::vector<double> t = linspace(0.0, 1.0, 20001);
  wasserstein_curve w;
  w.t = t;
  w.w_cum.resize(t.size());
  for (size_t i = 0; i < t.size(); ++i) w.w_cum[i] = std::sqrt(t[i]);
  w.w_rate.assign(t.size(), 0.0);
  time_schedule s = dds::wds_schedule(w, 4);
  for (int k = 0; k <= 4; ++k) {
    double expected = (k / 4.0) * (k / 4.0);
    CHECK(std::abs(s.times[k] - expected) < 1e-6);
  }
}

TEST_CASE("progress increments between schedule points are uniform") {
  std::vector<double> t = linspace(0.0, 1.0, 20001);
  wasserstein_curve w;
  w.t = t;
  w.w_cum.resize(t.size());
  for (size_t i = 0; i < t.size(); ++i) w.w_cum[i] = std::sqrt(t[i]);
  w.w_rate.assign(t.size(), 0.0);
  int steps = 8;
  time_schedule s = dds::wds_schedule(w, steps);
  std::vector<double> phi = w.w_cum;
  for (int k = 1; k <= steps; ++k) {
    double inc = interp_phi(t, phi, s.times[k]) - interp_phi(t, phi, s.times[k - 1]);
    CHECK(std::abs(inc - 1.0 / steps) < 1e-6);
  }
}

TEST_CASE("rate supported on the late interval pushes all knots there") {
  std::vector<double> t = linspace(1e-5, 1.0, 2001);
  std::vector<double> h(t.size(), 0.0);
  for (size_t i = 0; i < t.size(); ++i)
    if (t[i] >= 0.5) h[i] = 1.0;
  entropy_curve c = synthetic_entropy(t, h);
  time_schedule s = dds::eds_schedule(c, 8);
  for (int k = 1; k < 8; ++k) CHECK(s.times[k] >= 0.5 - 1e-9);
}

TEST_CASE("zero progress falls back to equispaced times with the requested tag") {
  std::vector<double> t = dds::time_grid(1e-5, 65);
  entropy_curve dead = synthetic_entropy(t, std::vector<double>(t.size(), 0.0));
  time_schedule s = dds::eds_schedule(dead, 4);
  CHECK(s.strategy == strategy_type::eds);
  time_schedule flat = dds::uniform_schedule(4);
  for (int k = 0; k <= 4; ++k) CHECK(std::abs(s.times[k] - flat.times[k]) < 1e-12);

  entropy_curve negative =
      synthetic_entropy(t, std::vector<double>(t.size(), -2.5));
  s = dds::eds_schedule(negative, 4);
  for (int k = 0; k <= 4; ++k) CHECK(std::abs(s.times[k] - flat.times[k]) < 1e-12);
}

// ---- behaviour on the exact toy curve ---------------------------------------------

TEST_CASE("entropy knots concentrate around the peak of the exact curve") {
  dds::rate_kernel k{dds::kernel_type::uniform, 15};
  dds::noise_schedule ns{};
  std::vector<double> grid = dds::time_grid(1e-5, 1025);
  entropy_curve c = dds::exact_curve(k, ns, binomial_p0(14), grid);
  size_t arg = 0;
  for (size_t i = 0; i < c.h_na.size(); ++i)
    if (c.h_na[i] > c.h_na[arg]) arg = i;
  double t_peak = c.t[arg];

  for (int steps : {8, 12, 16}) {
    time_schedule s = dds::eds_schedule(c, steps);
    std::vector<std::pair<double, int>> gaps;
    for (int g = 0; g < steps; ++g)
      gaps.push_back({s.times[g + 1] - s.times[g], g});
    std::sort(gaps.begin(), gaps.end());
    int a = gaps[0].second, b = gaps[1].second;
    CHECK(std::abs(a - b) == 1);
    CHECK(s.times[std::min(a, b)] <= t_peak);
    CHECK(s.times[std::max(a, b) + 1] >= t_peak);
  }
}

TEST_CASE("exact toy schedule knots match an independently computed warp") {
  dds::rate_kernel k{dds::kernel_type::uniform, 15};
  dds::noise_schedule ns{};
  std::vector<double> grid = dds::time_grid(1e-5, 1025);
  entropy_curve c = dds::exact_curve(k, ns, binomial_p0(14), grid);
  time_schedule s = dds::eds_schedule(c, 4);
  CHECK(std::abs(s.times[1] - 0.27517) < 1e-4);
  CHECK(std::abs(s.times[2] - 0.41364) < 1e-4);
  CHECK(std::abs(s.times[3] - 0.53041) < 1e-4);
}

TEST_CASE("strategy names round trip") {
  for (strategy_type s : {strategy_type::uniform, strategy_type::eds,
                          strategy_type::wds})
    CHECK(dds::strategy_from_name(dds::strategy_name(s)) == s);
  CHECK_THROWS_AS(dds::strategy_from_name("fast"), dds::config_error);
}

TEST_CASE("schedule validation catches malformed times") {
  time_schedule s = dds::uniform_schedule(4);
  time_schedule short_times = s;
  short_times.times.pop_back();
  CHECK_THROWS_AS(short_times.validate(), dds::config_error);
  time_schedule swapped = s;
  std::swap(swapped.times[1], swapped.times[2]);
  CHECK_THROWS_AS(swapped.validate(), dds::config_error);
  time_schedule no_steps = s;
  no_steps.steps = 0;
  no_steps.times = {1e-5};
  CHECK_THROWS_AS(no_steps.validate(), dds::config_error);
}
