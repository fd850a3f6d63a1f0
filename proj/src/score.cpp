#include "dds/score.hpp"

#include <cmath>

#include "dds/errors.hpp"

namespace dds {

// ---- oracle ----------------------------------------------------------------

oracle_score::oracle_score(rate_kernel kernel, noise_schedule noise,
                           distribution p0)
    : kernel_(kernel), noise_(noise), p0_(std::move(p0)) {
  kernel_.validate();
  noise_.validate();
  p0_.validate();
  if (p0_.size() != kernel_.num_states())
    throw config_error("oracle score: distribution size does not match kernel");
}

void oracle_score::ratios(const int* x, int len, double t, double* out) const {
  distribution pt = evolve_marginal(kernel_, p0_, noise_.sigma_bar(t));
  int v = kernel_.num_states();
  for (int i = 0; i < len; ++i) {
    int xi = x[i];
    if (xi < 0 || xi >= v)
      throw config_error("oracle score: token out of range");
    double px = pt.p[xi];
    if (px < 1e-15)
      throw numerical_error("oracle score: singular state with mass below 1e-15");
    for (int y = 0; y < v; ++y) out[i * v + y] = pt.p[y] / px;
    out[i * v + xi] = 1.0;
  }
}

// ---- forward corruption ------------------------------------------------------

int sample_state(const distribution& d, rng& g) {
  return g.categorical(d.p, 1.0);
}

corrupt_example corrupt(const rate_kernel& k, const noise_schedule& ns,
                        const std::vector<int>& x0, double t, rng& g) {
  corrupt_example ex;
  ex.x0 = x0;
  ex.t = t;
  ex.x_t.resize(x0.size());
  double sbar = ns.sigma_bar(t);
  double stay = std::exp(-(k.type == kernel_type::uniform ? k.vocab : 1) * sbar);
  for (size_t i = 0; i < x0.size(); ++i) {
    if (g.u01() < stay) {
      ex.x_t[i] = x0[i];
    } else if (k.type == kernel_type::uniform) {
      ex.x_t[i] = static_cast<int>(g.uniform_int(k.vocab));
    } else {
      ex.x_t[i] = k.mask_state();
    }
  }
  return ex;
}

double transition_ratio(const rate_kernel& k, const noise_schedule& ns,
                        double t, int x0, int xt, int y) {
  double sbar = ns.sigma_bar(t);
  double denom = transition_probability(k, sbar, x0, xt);
  if (denom <= 0.0)
    throw numerical_error("transition ratio: observed state has zero mass");
  return transition_probability(k, sbar, x0, y) / denom;
}

// ---- divergence --------------------------------------------------------------

double dwdse_pointwise(const rate_kernel& k, const noise_schedule& ns,
                       const corrupt_example& ex, const double* s, int len,
                       double* grad_s) {
  int v = k.num_states();
  double sigma = ns.sigma(ex.t);
  double loss = 0.0;
  if (grad_s)
    for (int i = 0; i < len * v; ++i) grad_s[i] = 0.0;
  for (int i = 0; i < len; ++i) {
    int xt = ex.x_t[i];
    for (int y = 0; y < v; ++y) {
      if (y == xt) continue;
      double base = k.base_rate(y, xt);
      if (base == 0.0) continue;
      double w = sigma * base;
      double r = transition_ratio(k, ns, ex.t, ex.x0[i], xt, y);
      double sy = s[i * v + y];
      if (!(sy > 0.0))
        throw numerical_error("divergence: non-positive score ratio");
      double term = sy;
      if (r > 0.0) term += -r * std::log(sy) + r * (std::log(r) - 1.0);
      loss += w * term;
      if (grad_s) grad_s[i * v + y] = w * (1.0 - r / sy);
    }
  }
  return loss;
}

std::function<std::vector<int>(rng&)> draw_from_distribution(distribution p0) {
  p0.validate();
  return [p0](rng& g) { return std::vector<int>{sample_state(p0, g)}; };
}

std::function<std::vector<int>(rng&)> draw_from_dataset(
    std::vector<std::vector<int>> data) {
  if (data.empty()) throw config_error("dataset: empty");
  return [data = std::move(data)](rng& g) {
    return data[g.uniform_int(data.size())];
  };
}

double dwdse_loss(const score_model& model, const rate_kernel& k,
                  const noise_schedule& ns,
                  const std::vector<std::vector<int>>& data, double eps_t,
                  int n_mc, uint64_t seed) {
  if (data.empty()) throw config_error("divergence: empty dataset");
  double total = 0.0;
  for (int m = 0; m < n_mc; ++m) {
    rng g(seed, m);
    const auto& x0 = data[g.uniform_int(data.size())];
    double t = eps_t + (1.0 - eps_t) * g.u01();
    corrupt_example ex = corrupt(k, ns, x0, t, g);
    std::vector<double> s = model.ratios(ex.x_t, t);
    total += dwdse_pointwise(k, ns, ex, s.data(),
                             static_cast<int>(ex.x_t.size()), nullptr);
  }
  return total / n_mc;
}

}  // namespace dds
