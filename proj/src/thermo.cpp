#include "dds/thermo.hpp"

#include <algorithm>
#include <cmath>

#include "dds/errors.hpp"

namespace dds {

// ---- curves ----------------------------------------------------------------

namespace {

void check_grid(const std::vector<double>& t) {
  if (t.size() < 2) throw config_error("curve: grid needs at least two points");
  for (size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1]))
      throw config_error("curve: grid must be strictly increasing");
}

std::vector<double> cum_trapezoid(const std::vector<double>& t,
                                  const std::vector<double>& f) {
  std::vector<double> c(t.size(), 0.0);
  for (size_t i = 1; i < t.size(); ++i)
    c[i] = c[i - 1] + 0.5 * (f[i] + f[i - 1]) * (t[i] - t[i - 1]);
  return c;
}

std::vector<double> clamped(const std::vector<double>& f) {
  std::vector<double> g(f.size());
  for (size_t i = 0; i < f.size(); ++i) g[i] = std::max(f[i], 0.0);
  return g;
}

}  // namespace

void entropy_curve::validate() const {
  check_grid(t);
  size_t n = t.size();
  if (h_na.size() != n || h_na_se.size() != n || h_na_cum.size() != n ||
      activity.size() != n)
    throw config_error("curve: column lengths disagree");
  if (h_ad.size() != h_tot.size() || (!h_tot.empty() && h_tot.size() != n))
    throw config_error("curve: partial exact-total columns");
  for (size_t i = 0; i < n; ++i) {
    if (!std::isfinite(h_na[i]) || !(h_na_se[i] >= 0.0))
      throw config_error("curve: bad rate entry");
    if (!(activity[i] >= 0.0)) throw config_error("curve: negative activity");
    if (i > 0 && h_na_cum[i] < h_na_cum[i - 1] - 1e-12)
      throw config_error("curve: cumulative entropy decreased");
  }
}

void wasserstein_curve::validate() const {
  check_grid(t);
  if (w_rate.size() != t.size() || w_cum.size() != t.size())
    throw config_error("curve: column lengths disagree");
  if (w_cum[0] != 0.0) throw config_error("curve: bound must start at zero");
  for (size_t i = 0; i < t.size(); ++i) {
    if (!(w_rate[i] >= 0.0)) throw config_error("curve: negative bound rate");
    if (i > 0 && w_cum[i] < w_cum[i - 1])
      throw config_error("curve: bound decreased");
  }
}

std::vector<double> time_grid(double eps, int n_points) {
  if (!(eps > 0.0) || !(eps < 1.0))
    throw config_error("grid: eps must lie in (0, 1)");
  if (n_points < 2) throw config_error("grid: need at least two points");
  std::vector<double> t(n_points);
  for (int i = 0; i < n_points; ++i)
    t[i] = eps + (1.0 - eps) * i / (n_points - 1);
  t.back() = 1.0;
  return t;
}

// ---- exact rates by enumeration ----------------------------------------------

namespace {

// Reverse-chain flux x -> y per unit time at marginal p:
// p(x) * sigma * reverse_rate(x, y) = sigma * base_rate(y, x) * p(y).
double flux(const rate_kernel& k, const distribution& p, double sigma, int x,
            int y) {
  double base = k.base_rate(y, x);
  if (base == 0.0) return 0.0;
  return sigma * base * p.p[y];
}

distribution marginal_at(const rate_kernel& k, const noise_schedule& ns,
                         const distribution& p0, double t) {
  if (p0.size() != k.num_states())
    throw config_error("rate: distribution size does not match kernel");
  return evolve_marginal(k, p0, ns.sigma_bar(t));
}

}  // namespace

double h_na_at(const rate_kernel& k, double sigma, const distribution& p) {
  if (p.size() != k.num_states())
    throw config_error("rate: distribution size does not match kernel");
  int n = k.num_states();
  double h = 0.0;
  if (k.type == kernel_type::uniform) {
    // Flux-weighted log marginal ratios over all transitions.
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        if (y == x) continue;
        double j = flux(k, p, sigma, x, y);
        if (j == 0.0) continue;
        if (p.p[x] < 1e-300)
          throw numerical_error("rate: positive flux out of a massless state");
        h += j * std::log(p.p[y] / p.p[x]);
      }
    return h;
  }
  // Absorbing: only the mask row carries flux; its surprisal enters with a
  // minus sign, so the signed rate can dip below zero mid-trajectory.
  int mask = k.mask_state();
  if (p.p[mask] < 1e-15)
    throw numerical_error("rate: mask state has vanishing mass");
  for (int y = 0; y < k.vocab; ++y) {
    if (p.p[y] == 0.0) continue;
    h -= sigma * p.p[y] * std::log(p.p[y] / p.p[mask]);
  }
  return h;
}

flagged_rate h_tot_at(const rate_kernel& k, double sigma,
                      const distribution& p) {
  if (p.size() != k.num_states())
    throw config_error("rate: distribution size does not match kernel");
  int n = k.num_states();
  double h = 0.0;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      if (y == x) continue;
      double fwd = flux(k, p, sigma, x, y);
      if (fwd == 0.0) continue;
      double rev = flux(k, p, sigma, y, x);
      if (rev == 0.0) return {0.0, false};  // one-directional flux
      h += fwd * std::log(fwd / rev);
    }
  return {h, true};
}

flagged_rate h_ad_at(const rate_kernel& k, double sigma,
                     const distribution& p) {
  flagged_rate tot = h_tot_at(k, sigma, p);
  if (!tot.finite) return tot;
  return {tot.value - h_na_at(k, sigma, p), true};
}

double activity_at(const rate_kernel& k, double sigma, const distribution& p) {
  if (p.size() != k.num_states())
    throw config_error("rate: distribution size does not match kernel");
  int n = k.num_states();
  double a = 0.0;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (y != x) a += flux(k, p, sigma, x, y);
  return a;
}

namespace {

double log_mean(double a, double b) {
  if (a <= 0.0 || b <= 0.0) return 0.0;
  if (a == b) return a;
  return (a - b) / (std::log(a) - std::log(b));
}

}  // namespace

double mobility_at(const rate_kernel& k, double sigma, const distribution& p) {
  if (k.type != kernel_type::uniform)
    throw config_error("mobility: defined for bidirectional kernels only");
  if (p.size() != k.num_states())
    throw config_error("rate: distribution size does not match kernel");
  int n = k.num_states();
  double m = 0.0;
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y)
      m += log_mean(flux(k, p, sigma, x, y), flux(k, p, sigma, y, x));
  return m;
}

double h_na_exact(const rate_kernel& k, const noise_schedule& ns,
                  const distribution& p0, double t) {
  return h_na_at(k, ns.sigma(t), marginal_at(k, ns, p0, t));
}

flagged_rate h_tot_exact(const rate_kernel& k, const noise_schedule& ns,
                         const distribution& p0, double t) {
  return h_tot_at(k, ns.sigma(t), marginal_at(k, ns, p0, t));
}

flagged_rate h_ad_exact(const rate_kernel& k, const noise_schedule& ns,
                        const distribution& p0, double t) {
  return h_ad_at(k, ns.sigma(t), marginal_at(k, ns, p0, t));
}

double activity_exact(const rate_kernel& k, const noise_schedule& ns,
                      const distribution& p0, double t) {
  return activity_at(k, ns.sigma(t), marginal_at(k, ns, p0, t));
}

double mobility_exact(const rate_kernel& k, const noise_schedule& ns,
                      const distribution& p0, double t) {
  return mobility_at(k, ns.sigma(t), marginal_at(k, ns, p0, t));
}

// ---- Monte Carlo estimates ------------------------------------------------------

namespace {

// Per-sample contributions to the rate and activity estimators.
void sample_terms(const score_model& model, const rate_kernel& k, double sigma,
                  const std::vector<int>& x, double t, double& h_out,
                  double& a_out) {
  int v = k.num_states();
  int len = static_cast<int>(x.size());
  std::vector<double> s = model.ratios(x, t);
  double sign = k.type == kernel_type::uniform ? 1.0 : -1.0;
  double h = 0.0, a = 0.0;
  for (int i = 0; i < len; ++i) {
    for (int y = 0; y < v; ++y) {
      if (y == x[i]) continue;
      double base = k.base_rate(y, x[i]);
      if (base == 0.0) continue;
      double sy = s[i * v + y];
      if (!(sy > 0.0))
        throw numerical_error("estimate: non-positive score ratio");
      a += base * sy;
      if (sy != 1.0) h += base * sy * std::log(sy);
    }
  }
  h_out = sign * sigma * h;
  a_out = sigma * a;
}

estimate reduce_mean(const std::vector<double>& vals) {
  size_t n = vals.size();
  double mean = 0.0;
  for (double v : vals) mean += v;
  mean /= static_cast<double>(n);
  if (n < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : vals) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (static_cast<double>(n) * (n - 1)))};
}

}  // namespace

estimate h_na_estimate(const score_model& model, const rate_kernel& k,
                       const noise_schedule& ns, double t,
                       const std::vector<std::vector<int>>& batch) {
  if (batch.empty()) throw config_error("estimate: empty batch");
  double sigma = ns.sigma(t);
  std::vector<double> vals(batch.size());
  for (size_t i = 0; i < batch.size(); ++i) {
    double h, a;
    sample_terms(model, k, sigma, batch[i], t, h, a);
    vals[i] = h;
  }
  return reduce_mean(vals);
}

estimate activity_estimate(const score_model& model, const rate_kernel& k,
                           const noise_schedule& ns, double t,
                           const std::vector<std::vector<int>>& batch) {
  if (batch.empty()) throw config_error("estimate: empty batch");
  double sigma = ns.sigma(t);
  std::vector<double> vals(batch.size());
  for (size_t i = 0; i < batch.size(); ++i) {
    double h, a;
    sample_terms(model, k, sigma, batch[i], t, h, a);
    vals[i] = a;
  }
  return reduce_mean(vals);
}

// ---- sweeps -----------------------------------------------------------------

namespace {

void finish_curve(entropy_curve& c) {
  c.h_na_cum = cum_trapezoid(c.t, clamped(c.h_na));
  c.validate();
}

struct point_result {
  double h, h_se, a, a_se;
};

point_result estimate_point(const score_model& model, const rate_kernel& k,
                            const noise_schedule& ns,
                            const std::function<std::vector<int>(rng&)>& draw_x0,
                            double t, int n_mc, uint64_t seed,
                            uint64_t stream) {
  rng g(seed, stream);
  double sigma = ns.sigma(t);
  std::vector<double> hs(n_mc), as(n_mc);
  for (int m = 0; m < n_mc; ++m) {
    std::vector<int> x0 = draw_x0(g);
    corrupt_example ex = corrupt(k, ns, x0, t, g);
    sample_terms(model, k, sigma, ex.x_t, t, hs[m], as[m]);
  }
  estimate h = reduce_mean(hs), a = reduce_mean(as);
  return {h.value, h.se, a.value, a.se};
}

entropy_curve estimate_curve_impl(
    const score_model& model, const rate_kernel& k, const noise_schedule& ns,
    const std::function<std::vector<int>(rng&)>& draw_x0,
    const std::vector<double>& grid, int n_mc, uint64_t seed, bool threaded) {
  check_grid(grid);
  if (n_mc < 1) throw config_error("sweep: need at least one sample");
  entropy_curve c;
  c.t = grid;
  int n = static_cast<int>(grid.size());
  c.h_na.resize(n);
  c.h_na_se.resize(n);
  c.activity.resize(n);

  if (threaded) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int j = 0; j < n; ++j) {
      point_result r =
          estimate_point(model, k, ns, draw_x0, grid[j], n_mc, seed, j);
      c.h_na[j] = r.h;
      c.h_na_se[j] = r.h_se;
      c.activity[j] = r.a;
    }
  } else {
    for (int j = 0; j < n; ++j) {
      point_result r =
          estimate_point(model, k, ns, draw_x0, grid[j], n_mc, seed, j);
      c.h_na[j] = r.h;
      c.h_na_se[j] = r.h_se;
      c.activity[j] = r.a;
    }
  }
  finish_curve(c);
  return c;
}

}  // namespace

entropy_curve exact_curve(const rate_kernel& k, const noise_schedule& ns,
                          const distribution& p0,
                          const std::vector<double>& grid) {
  check_grid(grid);
  entropy_curve c;
  c.t = grid;
  size_t n = grid.size();
  c.h_na.resize(n);
  c.h_na_se.assign(n, 0.0);
  c.activity.resize(n);
  bool totals = true;
  std::vector<double> h_ad(n), h_tot(n);
  for (size_t j = 0; j < n; ++j) {
    c.h_na[j] = h_na_exact(k, ns, p0, grid[j]);
    c.activity[j] = activity_exact(k, ns, p0, grid[j]);
    if (totals) {
      flagged_rate tot = h_tot_exact(k, ns, p0, grid[j]);
      if (!tot.finite) {
        totals = false;
      } else {
        h_tot[j] = tot.value;
        h_ad[j] = tot.value - c.h_na[j];
      }
    }
  }
  if (totals) {
    c.h_ad = std::move(h_ad);
    c.h_tot = std::move(h_tot);
  }
  finish_curve(c);
  return c;
}

entropy_curve estimate_curve(const score_model& model, const rate_kernel& k,
                             const noise_schedule& ns,
                             const std::function<std::vector<int>(rng&)>& draw_x0,
                             const std::vector<double>& grid, int n_mc,
                             uint64_t seed) {
  return estimate_curve_impl(model, k, ns, draw_x0, grid, n_mc, seed, true);
}

entropy_curve estimate_curve_serial(
    const score_model& model, const rate_kernel& k, const noise_schedule& ns,
    const std::function<std::vector<int>(rng&)>& draw_x0,
    const std::vector<double>& grid, int n_mc, uint64_t seed) {
  return estimate_curve_impl(model, k, ns, draw_x0, grid, n_mc, seed, false);
}

// ---- distance bounds -----------------------------------------------------------

wbound_mode wbound_from_name(const std::string& name) {
  if (name == "mobility-total") return wbound_mode::mobility_total;
  if (name == "activity-total") return wbound_mode::activity_total;
  if (name == "activity-nonadiabatic")
    return wbound_mode::activity_nonadiabatic;
  throw config_error("unknown bound mode '" + name + "'");
}

std::string wbound_name(wbound_mode mode) {
  switch (mode) {
    case wbound_mode::mobility_total: return "mobility-total";
    case wbound_mode::activity_total: return "activity-total";
    default: return "activity-nonadiabatic";
  }
}

wasserstein_curve wasserstein_bound(const entropy_curve& c, wbound_mode mode,
                                    const std::vector<double>* mobility) {
  c.validate();
  size_t n = c.t.size();
  wasserstein_curve w;
  w.t = c.t;
  w.w_rate.resize(n);

  if (mode != wbound_mode::activity_nonadiabatic && !c.has_totals())
    throw config_error(
        "bound: total entropy rate unavailable (flagged infinite for "
        "one-directional kernels)");
  if (mode == wbound_mode::mobility_total) {
    if (!mobility || mobility->size() != n)
      throw config_error("bound: mobility column required for this mode");
  }

  for (size_t j = 0; j < n; ++j) {
    double rate;
    switch (mode) {
      case wbound_mode::mobility_total:
        rate = 2.0 * (*mobility)[j] * std::max(c.h_tot[j], 0.0);
        break;
      case wbound_mode::activity_total:
        rate = c.activity[j] * std::max(c.h_tot[j], 0.0);
        break;
      default:
        rate = c.activity[j] * std::abs(c.h_na[j]);
    }
    w.w_rate[j] = std::sqrt(rate);
  }
  w.w_cum = cum_trapezoid(w.t, w.w_rate);
  w.validate();
  return w;
}

std::vector<double> mobility_curve(const rate_kernel& k,
                                   const noise_schedule& ns,
                                   const distribution& p0,
                                   const std::vector<double>& grid) {
  check_grid(grid);
  std::vector<double> m(grid.size());
  for (size_t j = 0; j < grid.size(); ++j)
    m[j] = mobility_exact(k, ns, p0, grid[j]);
  return m;
}

}  // namespace dds
