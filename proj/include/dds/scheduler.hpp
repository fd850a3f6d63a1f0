#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dds/ctmc.hpp"
#include "dds/thermo.hpp"

namespace dds {

// ---- progress curves ---------------------------------------------------------

// Cumulative progress along a time grid: how much of some non-negative
// physical quantity has accrued by each time.
struct progress_curve {
  std::vector<double> t;
  std::vector<double> c;  // c[0] = 0, non-decreasing

  double total() const { return c.empty() ? 0.0 : c.back(); }
  void validate() const;
};

// Trapezoid accumulation of max(rate, 0) over the grid.
progress_curve cumulative_progress(const std::vector<double>& t,
                                   const std::vector<double>& rate);

// Normalized progress phi = c / c_total; phi[0] = 0 and phi.back() = 1.
// Zero total progress is degenerate and rejected.
std::vector<double> warp(const progress_curve& progress);

// ---- schedules -----------------------------------------------------------------

enum class strategy_type { uniform, eds, wds };

std::string strategy_name(strategy_type s);
strategy_type strategy_from_name(const std::string& name);

// steps+1 strictly increasing times spanning the sampling interval, plus the
// metadata needed to reproduce the schedule from its inputs.
struct time_schedule {
  strategy_type strategy = strategy_type::uniform;
  int steps = 0;
  std::vector<double> times;
  kernel_type kernel = kernel_type::uniform;
  int vocab = 0;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  std::string source_curve_sha256;
  uint64_t seed = 0;

  void validate() const;
};

// Solves phi(t_k) = k/steps for k = 0..steps by piecewise-linear
// interpolation on the grid. Plateaus resolve to the smallest t attaining
// the level; the first and last times pin to the grid endpoints.
std::vector<double> invert_schedule(const std::vector<double>& t,
                                    const std::vector<double>& phi, int steps);

// Equispaced times on [eps, 1].
time_schedule uniform_schedule(int steps, double eps = 1e-5);

// Progress measured by the clamped nonadiabatic entropy rate. A curve with
// no positive rate anywhere falls back to equispaced times with a warning
// on stderr.
time_schedule eds_schedule(const entropy_curve& curve, int steps);

// Progress measured by the cumulative transport bound, so equal steps move
// the marginal an equal bounded distance.
time_schedule wds_schedule(const wasserstein_curve& curve, int steps);

}  // namespace dds
