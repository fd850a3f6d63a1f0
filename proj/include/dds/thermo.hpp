#pragma once

#include <functional>
#include <vector>

#include "dds/ctmc.hpp"
#include "dds/noise.hpp"
#include "dds/score.hpp"

namespace dds {

// ---- curves ----------------------------------------------------------------

struct entropy_curve {
  std::vector<double> t;         // strictly increasing grid
  std::vector<double> h_na;      // signed nonadiabatic rate
  std::vector<double> h_na_se;   // standard errors; zero for exact sweeps
  std::vector<double> h_na_cum;  // running integral of max(h_na, 0)
  std::vector<double> activity;
  std::vector<double> h_ad;      // exact-only columns; empty when the
  std::vector<double> h_tot;     // total rate is flagged infinite

  bool has_totals() const { return !h_tot.empty(); }
  void validate() const;
};

struct wasserstein_curve {
  std::vector<double> t;
  std::vector<double> w_rate;
  std::vector<double> w_cum;  // starts at exactly zero, non-decreasing

  void validate() const;
};

std::vector<double> time_grid(double eps, int n_points);

// ---- exact rates by enumeration ----------------------------------------------
//
// All rates describe the generative chain run at p_bar(t) = the forward
// marginal of p0 at time t. The absorbing kernel's one-directional fluxes
// make the total rate infinite; flagged_rate carries that explicitly.

struct flagged_rate {
  double value = 0.0;
  bool finite = true;
};

// Rates at an explicit marginal p_bar and noise level sigma.
double h_na_at(const rate_kernel& k, double sigma, const distribution& p_bar);
flagged_rate h_tot_at(const rate_kernel& k, double sigma,
                      const distribution& p_bar);
flagged_rate h_ad_at(const rate_kernel& k, double sigma,
                     const distribution& p_bar);
double activity_at(const rate_kernel& k, double sigma,
                   const distribution& p_bar);
// Log-mean flux over unordered pairs; defined for bidirectional (uniform)
// kernels only.
double mobility_at(const rate_kernel& k, double sigma,
                   const distribution& p_bar);

// The same rates along the forward trajectory started at p0.
double h_na_exact(const rate_kernel& k, const noise_schedule& ns,
                  const distribution& p0, double t);
flagged_rate h_tot_exact(const rate_kernel& k, const noise_schedule& ns,
                         const distribution& p0, double t);
flagged_rate h_ad_exact(const rate_kernel& k, const noise_schedule& ns,
                        const distribution& p0, double t);
double activity_exact(const rate_kernel& k, const noise_schedule& ns,
                      const distribution& p0, double t);
double mobility_exact(const rate_kernel& k, const noise_schedule& ns,
                      const distribution& p0, double t);

// ---- Monte Carlo estimates ------------------------------------------------------

struct estimate {
  double value = 0.0;
  double se = 0.0;
};

// Score-based estimators over a batch of states drawn from the forward
// marginal at time t. A flat score (all ratios 1) gives exactly zero.
estimate h_na_estimate(const score_model& model, const rate_kernel& k,
                       const noise_schedule& ns, double t,
                       const std::vector<std::vector<int>>& batch);
estimate activity_estimate(const score_model& model, const rate_kernel& k,
                           const noise_schedule& ns, double t,
                           const std::vector<std::vector<int>>& batch);

// ---- sweeps -----------------------------------------------------------------

// Exact curve over the grid; fills h_ad/h_tot only when they are finite.
entropy_curve exact_curve(const rate_kernel& k, const noise_schedule& ns,
                          const distribution& p0,
                          const std::vector<double>& grid);

// Estimated curve: per grid point, n_mc data samples are drawn via draw_x0
// on the (seed, grid index) substream, pushed through the forward kernel and
// scored. Threaded over grid points; the _serial twin runs the identical
// arithmetic unthreaded and must produce byte-identical results.
entropy_curve estimate_curve(const score_model& model, const rate_kernel& k,
                             const noise_schedule& ns,
                             const std::function<std::vector<int>(rng&)>& draw_x0,
                             const std::vector<double>& grid, int n_mc,
                             uint64_t seed);
entropy_curve estimate_curve_serial(
    const score_model& model, const rate_kernel& k, const noise_schedule& ns,
    const std::function<std::vector<int>(rng&)>& draw_x0,
    const std::vector<double>& grid, int n_mc, uint64_t seed);

// ---- distance bounds -----------------------------------------------------------

enum class wbound_mode { mobility_total, activity_total, activity_nonadiabatic };

wbound_mode wbound_from_name(const std::string& name);
std::string wbound_name(wbound_mode mode);

// Speed-limit bound on how far the marginal travels. The rate entering the
// integrand is |h_na| in the nonadiabatic mode (the signed rate can dip
// below zero for the absorbing kernel); total-rate modes require finite
// exact totals and reject curves without them.
wasserstein_curve wasserstein_bound(const entropy_curve& c, wbound_mode mode,
                                    const std::vector<double>* mobility = nullptr);

std::vector<double> mobility_curve(const rate_kernel& k,
                                   const noise_schedule& ns,
                                   const distribution& p0,
                                   const std::vector<double>& grid);

}  // namespace dds
