#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dds/ctmc.hpp"
#include "dds/mlp.hpp"
#include "dds/noise.hpp"
#include "dds/rng.hpp"
#include "dds/scheduler.hpp"
#include "dds/thermo.hpp"

namespace dds {

// ---- datasets --------------------------------------------------------------------

// Counting-down sequences: each token decrements its predecessor until zero,
// after which the next token resets to a uniformly random value.
struct countdown_spec {
  int vocab = 32;
  int seq_len = 16;

  void validate() const;
};

std::vector<int> gen_countdown_sequence(const countdown_spec& spec, rng& g);
std::vector<std::vector<int>> gen_countdown(const countdown_spec& spec, int n,
                                            rng& g);

// Exact binomial pmf over {0..trials}.
distribution binomial_dataset(int trials = 14, double prob = 0.5);

// ---- metrics ---------------------------------------------------------------------

// Fraction of adjacent pairs (a, b) violating the countdown rule: a pair is
// valid when a > 0 and b = a-1, or when a = 0 (free reset). Tokens outside
// [0, vocab) always count as violations.
double rule_violation_rate(const std::vector<int>& seq, int vocab);
double rule_violation_rate(const std::vector<std::vector<int>>& seqs,
                           int vocab);
// Mean violation rate with its standard error across sequences.
estimate rule_violation_report(const std::vector<std::vector<int>>& seqs,
                               int vocab);

double hellinger(const distribution& p, const distribution& q);
double total_variation(const distribution& p, const distribution& q);

struct metric_row {
  std::string strategy;
  int steps = 0;
  std::string metric;
  double value = 0.0;
  double se = 0.0;
  int n = 0;
};

// ---- dynamics experiment ------------------------------------------------------------

enum class score_mode { oracle, network };

score_mode score_mode_from_name(const std::string& name);
std::string score_mode_name(score_mode mode);

// Ground-truth (enumeration) and score-based entropy plus transport curves
// for the single-token binomial toy, mirroring the four dynamics rows.
struct binomial_config {
  kernel_type kernel = kernel_type::uniform;
  int trials = 14;
  double prob = 0.5;
  noise_schedule noise{};
  int grid_points = 257;
  int n_mc = 1024;
  score_mode mode = score_mode::network;
  int train_steps = 2000;
  int train_batch = 64;
  uint64_t seed = 0;

  void validate() const;
};

struct binomial_result {
  entropy_curve exact_entropy;
  wasserstein_curve exact_transport;
  entropy_curve model_entropy;
  wasserstein_curve model_transport;
  train_report training;  // steps = 0 in oracle mode
};

binomial_result run_binomial_experiment(const binomial_config& cfg);

// ---- schedule experiment -------------------------------------------------------------

// Absorbing-kernel countdown pipeline: train (or receive) a ratio network,
// estimate its entropy and transport curves, build one schedule per
// (strategy, budget) cell, sample, and score rule violations.
struct countdown_config {
  countdown_spec data{};
  noise_schedule noise{0.01, 20.0};
  std::vector<int> budgets = {4, 8, 16};
  std::vector<strategy_type> strategies = {
      strategy_type::uniform, strategy_type::eds, strategy_type::wds};
  int train_steps = 20000;
  int train_batch = 64;
  int curve_points = 257;
  int curve_mc = 512;
  int n_eval = 1024;
  uint64_t seed = 0;

  rate_kernel kernel() const {
    return rate_kernel{kernel_type::absorbing, data.vocab};
  }
  // Derived substream roots, recorded in manifests.
  uint64_t train_seed() const { return substream_seed(seed, 1); }
  uint64_t curve_seed() const { return substream_seed(seed, 2); }
  uint64_t cell_seed(int cell) const {
    return substream_seed(seed, 16 + static_cast<uint64_t>(cell));
  }
  void validate() const;
};

mlp_score train_countdown_model(const countdown_config& cfg,
                                train_report* report = nullptr);

struct countdown_cell {
  strategy_type strategy = strategy_type::uniform;
  int steps = 0;
  uint64_t seed = 0;
  estimate violation;
  int n = 0;
};

struct countdown_result {
  entropy_curve curve;
  wasserstein_curve transport;
  std::vector<time_schedule> schedules;  // aligned with cells
  std::vector<countdown_cell> cells;
  std::vector<metric_row> rows() const;
};

countdown_result run_countdown_experiment(const mlp_score& model,
                                          const countdown_config& cfg);

}  // namespace dds
