#pragma once

#include <functional>
#include <vector>

#include "dds/ctmc.hpp"
#include "dds/noise.hpp"
#include "dds/rng.hpp"

namespace dds {

// ---- ratio models ----------------------------------------------------------
//
// A score model estimates, for every position i of a sequence x and every
// state y, the marginal ratio s(x, t)_{i,y} = p_t(x with y at i) / p_t(x).
// Ratios are laid out row-major as out[i * V + y] with V = num_states. The
// diagonal entry (y = x[i]) is fixed at 1.

class score_model {
 public:
  virtual ~score_model() = default;
  virtual int num_states() const = 0;
  virtual void ratios(const int* x, int len, double t, double* out) const = 0;

  std::vector<double> ratios(const std::vector<int>& x, double t) const {
    std::vector<double> out(x.size() * num_states());
    ratios(x.data(), static_cast<int>(x.size()), t, out.data());
    return out;
  }
};

// Exact ratios for data that is i.i.d. across positions with single-token
// marginal p0, computed from the closed-form forward marginals.
class oracle_score : public score_model {
 public:
  using score_model::ratios;

  oracle_score(rate_kernel kernel, noise_schedule noise, distribution p0);

  int num_states() const override { return kernel_.num_states(); }
  void ratios(const int* x, int len, double t, double* out) const override;

 private:
  rate_kernel kernel_;
  noise_schedule noise_;
  distribution p0_;
};

// ---- forward corruption ------------------------------------------------------

int sample_state(const distribution& d, rng& g);

// Data sources for sampling-based sweeps and training.
std::function<std::vector<int>(rng&)> draw_from_distribution(distribution p0);
std::function<std::vector<int>(rng&)> draw_from_dataset(
    std::vector<std::vector<int>> data);

struct corrupt_example {
  std::vector<int> x0;
  std::vector<int> x_t;
  double t = 0.0;
};

// Applies the forward kernel to each position of x0 independently up to time t.
corrupt_example corrupt(const rate_kernel& k, const noise_schedule& ns,
                        const std::vector<int>& x0, double t, rng& g);

// Ratio of single-position corruption probabilities
// p_{t|0}(y | x0) / p_{t|0}(xt | x0).
double transition_ratio(const rate_kernel& k, const noise_schedule& ns,
                        double t, int x0, int xt, int y);

// ---- divergence --------------------------------------------------------------
//
// Pointwise objective at a corrupted example, summed over positions i and
// destination states y weighted by the forward rate of y -> x_t[i]:
//   w * [ s_y - r ln s_y + r (ln r - 1) ],   r = transition_ratio.
// Non-negative, zero exactly when s matches r. grad_s (optional, same layout
// as s) receives d/ds_y = w * (1 - r / s_y).

double dwdse_pointwise(const rate_kernel& k, const noise_schedule& ns,
                       const corrupt_example& ex, const double* s, int len,
                       double* grad_s);

// Monte Carlo estimate of the expected divergence: x0 drawn from data, t
// uniform on [eps_t, 1], x_t from the forward kernel.
double dwdse_loss(const score_model& model, const rate_kernel& k,
                  const noise_schedule& ns,
                  const std::vector<std::vector<int>>& data, double eps_t,
                  int n_mc, uint64_t seed);

}  // namespace dds
