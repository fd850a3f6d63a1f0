#include "dds/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "dds/errors.hpp"

namespace dds {

// ---- progress curves ---------------------------------------------------------

void progress_curve::validate() const {
  if (t.size() < 2) throw config_error("progress curve needs at least 2 points");
  if (c.size() != t.size())
    throw config_error("progress curve value count does not match grid");
  for (size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1]))
      throw config_error("progress grid is not strictly increasing");
  if (c[0] != 0.0) throw config_error("progress must start at zero");
  for (size_t i = 0; i < c.size(); ++i) {
    if (!std::isfinite(c[i])) throw config_error("progress value is not finite");
    if (i > 0 && c[i] < c[i - 1] - 1e-12)
      throw config_error("progress is decreasing");
  }
}

progress_curve cumulative_progress(const std::vector<double>& t,
                                   const std::vector<double>& rate) {
  if (t.size() < 2) throw config_error("progress grid needs at least 2 points");
  if (rate.size() != t.size())
    throw config_error("rate count does not match grid");
  progress_curve out;
  out.t = t;
  out.c.assign(t.size(), 0.0);
  for (size_t i = 1; i < t.size(); ++i) {
    double a = std::max(rate[i - 1], 0.0);
    double b = std::max(rate[i], 0.0);
    out.c[i] = out.c[i - 1] + 0.5 * (a + b) * (t[i] - t[i - 1]);
  }
  out.validate();
  return out;
}

std::vector<double> warp(const progress_curve& progress) {
  progress.validate();
  double total = progress.total();
  if (total <= 0.0) throw config_error("degenerate progress: total is zero");
  std::vector<double> phi(progress.c.size());
  for (size_t i = 0; i < phi.size(); ++i) phi[i] = progress.c[i] / total;
  phi.back() = 1.0;
  return phi;
}

// ---- schedules -----------------------------------------------------------------

std::string strategy_name(strategy_type s) {
  switch (s) {
    case strategy_type::uniform: return "uniform";
    case strategy_type::eds: return "eds";
    case strategy_type::wds: return "wds";
  }
  throw config_error("unknown strategy");
}

strategy_type strategy_from_name(const std::string& name) {
  if (name == "uniform") return strategy_type::uniform;
  if (name == "eds") return strategy_type::eds;
  if (name == "wds") return strategy_type::wds;
  throw config_error("unknown strategy name: " + name);
}

void time_schedule::validate() const {
  if (steps < 1) throw config_error("schedule needs at least 1 step");
  if (times.size() != static_cast<size_t>(steps) + 1)
    throw config_error("schedule must hold steps+1 times");
  for (double v : times)
    if (!std::isfinite(v)) throw config_error("schedule time is not finite");
  for (size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw config_error("schedule times are not strictly increasing");
}

std::vector<double> invert_schedule(const std::vector<double>& t,
                                    const std::vector<double>& phi, int steps) {
  if (steps < 1) throw config_error("schedule needs at least 1 step");
  if (t.size() < 2) throw config_error("warp grid needs at least 2 points");
  if (phi.size() != t.size())
    throw config_error("warp value count does not match grid");
  for (size_t i = 1; i < phi.size(); ++i)
    if (phi[i] < phi[i - 1] - 1e-12)
      throw config_error("warp function is decreasing");
  if (std::abs(phi.front()) > 1e-12 || std::abs(phi.back() - 1.0) > 1e-12)
    throw config_error("warp function must run from 0 to 1");

  std::vector<double> times(static_cast<size_t>(steps) + 1);
  times.front() = t.front();
  times.back() = t.back();
  size_t j = 0;
  for (int k = 1; k < steps; ++k) {
    double level = static_cast<double>(k) / steps;
    while (j + 2 < phi.size() && phi[j + 1] < level) ++j;
    double lo = phi[j], hi = phi[j + 1];
    double frac = hi > lo ? (level - lo) / (hi - lo) : 0.0;
    frac = std::clamp(frac, 0.0, 1.0);
    times[k] = t[j] + frac * (t[j + 1] - t[j]);
  }
  return times;
}

time_schedule uniform_schedule(int steps, double eps) {
  if (steps < 1) throw config_error("schedule needs at least 1 step");
  if (!(eps >= 0.0 && eps < 1.0)) throw config_error("eps must lie in [0, 1)");
  time_schedule s;
  s.strategy = strategy_type::uniform;
  s.steps = steps;
  s.times.resize(static_cast<size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k)
    s.times[k] = eps + (1.0 - eps) * (static_cast<double>(k) / steps);
  s.times.front() = eps;
  s.times.back() = 1.0;
  s.validate();
  return s;
}

namespace {

time_schedule schedule_from_progress(const progress_curve& progress,
                                     strategy_type strategy, int steps) {
  time_schedule s;
  s.strategy = strategy;
  s.steps = steps;
  if (progress.total() <= 0.0) {
    std::fprintf(stderr,
                 "warning: %s progress is identically zero; "
                 "falling back to equispaced times\n",
                 strategy_name(strategy).c_str());
    double lo = progress.t.front(), hi = progress.t.back();
    s.times.resize(static_cast<size_t>(steps) + 1);
    for (int k = 0; k <= steps; ++k)
      s.times[k] = lo + (hi - lo) * (static_cast<double>(k) / steps);
    s.times.front() = lo;
    s.times.back() = hi;
  } else {
    s.times = invert_schedule(progress.t, warp(progress), steps);
  }
  s.validate();
  return s;
}

}  // namespace

time_schedule eds_schedule(const entropy_curve& curve, int steps) {
  curve.validate();
  return schedule_from_progress(cumulative_progress(curve.t, curve.h_na),
                                strategy_type::eds, steps);
}

time_schedule wds_schedule(const wasserstein_curve& curve, int steps) {
  curve.validate();
  progress_curve progress;
  progress.t = curve.t;
  progress.c = curve.w_cum;
  progress.validate();
  return schedule_from_progress(progress, strategy_type::wds, steps);
}

}  // namespace dds
