#pragma once

// Independent reference implementations used only by tests. These integrate
// or enumerate the underlying processes directly so the closed forms in the
// library are checked against something that does not share their code.

#include <cmath>
#include <vector>

#include "dds/ctmc.hpp"
#include "dds/rng.hpp"

namespace oracle {

// Classical RK4 on the forward master equation dp/ds = p * base_rate,
// integrated over accumulated noise s in [0, sbar].
inline dds::distribution rk4_evolve(const dds::rate_kernel& k,
                                    const dds::distribution& p0, double sbar,
                                    int n_steps = 10000) {
  int n = k.num_states();
  std::vector<double> p = p0.p;
  auto deriv = [&](const std::vector<double>& q) {
    std::vector<double> d(n, 0.0);
    for (int a = 0; a < n; ++a) {
      if (q[a] == 0.0) continue;
      for (int b = 0; b < n; ++b) d[b] += q[a] * k.base_rate(a, b);
    }
    return d;
  };
  double h = sbar / n_steps;
  std::vector<double> k1, k2, k3, k4, tmp(n);
  for (int step = 0; step < n_steps; ++step) {
    k1 = deriv(p);
    for (int i = 0; i < n; ++i) tmp[i] = p[i] + 0.5 * h * k1[i];
    k2 = deriv(tmp);
    for (int i = 0; i < n; ++i) tmp[i] = p[i] + 0.5 * h * k2[i];
    k3 = deriv(tmp);
    for (int i = 0; i < n; ++i) tmp[i] = p[i] + h * k3[i];
    k4 = deriv(tmp);
    for (int i = 0; i < n; ++i)
      p[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  dds::distribution out;
  out.p = std::move(p);
  return out;
}

// Random distribution with full support (all entries at least floor).
inline dds::distribution random_distribution(int n, dds::rng& g,
                                             double floor = 1e-4) {
  dds::distribution d;
  d.p.resize(n);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    d.p[i] = floor - std::log(1.0 - g.u01());
    sum += d.p[i];
  }
  for (int i = 0; i < n; ++i) d.p[i] /= sum;
  return d;
}

inline double max_abs_diff(const std::vector<double>& a,
                           const std::vector<double>& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// True when the series has a single interior peak: optionally easing down
// into one valley near the left edge, then rising monotonically to the
// argmax, then falling monotonically to the end. Slope checks allow tol of
// counter-movement per step.
inline bool single_interior_peak(const std::vector<double>& v, size_t* argmax,
                                 double tol = 1e-9) {
  size_t peak = 0;
  for (size_t i = 0; i < v.size(); ++i)
    if (v[i] > v[peak]) peak = i;
  if (argmax != nullptr) *argmax = peak;
  if (peak == 0 || peak + 1 == v.size()) return false;
  size_t valley = 0;
  for (size_t i = 0; i <= peak; ++i)
    if (v[i] < v[valley]) valley = i;
  for (size_t i = 1; i <= valley; ++i)
    if (v[i] > v[i - 1] + tol) return false;
  for (size_t i = valley + 1; i <= peak; ++i)
    if (v[i] < v[i - 1] - tol) return false;
  for (size_t i = peak + 1; i < v.size(); ++i)
    if (v[i] > v[i - 1] + tol) return false;
  return true;
}

}  // namespace oracle
