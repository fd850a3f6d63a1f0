#include "dds/sampler.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "dds/errors.hpp"

namespace dds {

namespace {

void check_compatible(const time_schedule& sched, const score_model& model,
                      const rate_kernel& k) {
  sched.validate();
  k.validate();
  if (model.num_states() != k.num_states())
    throw config_error("score model state count does not match kernel");
  if (sched.vocab != 0 && sched.vocab != k.vocab)
    throw config_error("schedule was built for a different vocabulary");
  if (sched.vocab != 0 && sched.kernel != k.type)
    throw config_error("schedule was built for a different kernel");
}

// One leap for every token of x, using preallocated scratch. When
// force_unmask is set (absorbing kernels, final step only), tokens that are
// still masked afterwards move to the state with the largest reverse rate
// under the same frozen scores, and *forced counts them.
void leap(std::vector<int>& x, const score_model& model, const rate_kernel& k,
          const noise_schedule& ns, double t_from, double t_to, rng& g,
          bool force_unmask, int* forced, std::vector<double>& scores,
          std::vector<double>& rates) {
  if (!(t_from >= t_to))
    throw config_error("tau leap must move backward in time");
  int len = static_cast<int>(x.size());
  int n = k.num_states();
  for (int i = 0; i < len; ++i)
    if (x[i] < 0 || x[i] >= n)
      throw config_error("token out of range at position " + std::to_string(i));
  if (t_from == t_to && !force_unmask) return;

  scores.resize(static_cast<size_t>(len) * n);
  rates.resize(n);
  model.ratios(x.data(), len, t_from, scores.data());
  double sigma = ns.sigma(t_from);
  double dt_eff = (ns.sigma_bar(t_from) - ns.sigma_bar(t_to)) / sigma;

  for (int i = 0; i < len; ++i) {
    const double* row = scores.data() + static_cast<size_t>(i) * n;
    double total = 0.0;
    for (int y = 0; y < n; ++y) {
      double r = y == x[i] ? 0.0 : sigma * k.base_rate(y, x[i]) * row[y];
      if (!std::isfinite(r) || r < 0.0)
        throw numerical_error("bad reverse rate at position " +
                              std::to_string(i) + ", t=" +
                              std::to_string(t_from));
      rates[y] = r;
      total += r;
    }
    if (total > 0.0 && dt_eff > 0.0) {
      double p_jump = -std::expm1(-total * dt_eff);
      if (g.u01() < p_jump) x[i] = g.categorical(rates.data(), n, total);
    }
    if (force_unmask && x[i] == k.mask_state()) {
      int best = 0;
      for (int y = 1; y < k.vocab; ++y)
        if (rates[y] > rates[best]) best = y;
      x[i] = best;
      ++*forced;
    }
  }
}

void run_sequence(const time_schedule& sched, const score_model& model,
                  const rate_kernel& k, const noise_schedule& ns, int seq_len,
                  uint64_t seed, int index, std::vector<int>& out,
                  int& forced) {
  rng g(seed, static_cast<uint64_t>(index));
  out = init_from_prior(k, seq_len, g);
  forced = 0;
  std::vector<double> scores, rates;
  for (int step = sched.steps; step >= 1; --step) {
    bool final_step = step == 1 && k.is_absorbing();
    leap(out, model, k, ns, sched.times[step], sched.times[step - 1], g,
         final_step, &forced, scores, rates);
  }
}

sample_batch sample_impl(const time_schedule& sched, const score_model& model,
                         const rate_kernel& k, const noise_schedule& ns,
                         int batch, int seq_len, uint64_t seed,
                         bool threaded) {
  check_compatible(sched, model, k);
  if (batch < 1) throw config_error("sampler: batch must be positive");
  if (seq_len < 1) throw config_error("sampler: length must be positive");
  sample_batch out;
  out.sequences.resize(batch);
  out.forced_unmasks.assign(batch, 0);
  out.nfe = sched.steps;

  bool failed_config = false, failed_numeric = false;
  std::string what;
  if (threaded) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int b = 0; b < batch; ++b) {
      try {
        run_sequence(sched, model, k, ns, seq_len, seed, b, out.sequences[b],
                     out.forced_unmasks[b]);
      } catch (const numerical_error& e) {
#ifdef _OPENMP
#pragma omp critical
#endif
        {
          failed_numeric = true;
          what = e.what();
        }
      } catch (const std::exception& e) {
#ifdef _OPENMP
#pragma omp critical
#endif
        {
          failed_config = true;
          what = e.what();
        }
      }
    }
  } else {
    for (int b = 0; b < batch; ++b)
      run_sequence(sched, model, k, ns, seq_len, seed, b, out.sequences[b],
                   out.forced_unmasks[b]);
  }
  if (failed_numeric) throw numerical_error(what);
  if (failed_config) throw config_error(what);
  return out;
}

}  // namespace

std::vector<int> init_from_prior(const rate_kernel& k, int seq_len, rng& g) {
  if (seq_len < 1) throw config_error("sampler: length must be positive");
  std::vector<int> x(seq_len);
  if (k.is_absorbing()) {
    for (int i = 0; i < seq_len; ++i) x[i] = k.mask_state();
  } else {
    for (int i = 0; i < seq_len; ++i)
      x[i] = static_cast<int>(g.uniform_int(static_cast<uint64_t>(k.vocab)));
  }
  return x;
}

void tau_leap_step(std::vector<int>& x, const score_model& model,
                   const rate_kernel& k, const noise_schedule& ns,
                   double t_from, double t_to, rng& g) {
  k.validate();
  if (model.num_states() != k.num_states())
    throw config_error("score model state count does not match kernel");
  std::vector<double> scores, rates;
  int forced = 0;
  leap(x, model, k, ns, t_from, t_to, g, false, &forced, scores, rates);
}

sample_batch sample(const time_schedule& sched, const score_model& model,
                    const rate_kernel& k, const noise_schedule& ns, int batch,
                    int seq_len, uint64_t seed) {
  return sample_impl(sched, model, k, ns, batch, seq_len, seed, true);
}

sample_batch sample_serial(const time_schedule& sched, const score_model& model,
                           const rate_kernel& k, const noise_schedule& ns,
                           int batch, int seq_len, uint64_t seed) {
  return sample_impl(sched, model, k, ns, batch, seq_len, seed, false);
}

}  // namespace dds
