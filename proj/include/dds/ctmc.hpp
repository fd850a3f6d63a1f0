#pragma once

#include <string>
#include <vector>

namespace dds {

// ---- forward kernels -------------------------------------------------------
//
// Rate matrices use the row convention: entry (from, to) is the jump rate
// from -> to, rows sum to zero. The time-dependent generator is
// sigma(t) * base_rate.

enum class kernel_type { uniform, absorbing };

struct rate_kernel {
  kernel_type type = kernel_type::uniform;
  int vocab = 2;  // data tokens; the absorbing kernel adds one mask state

  bool is_absorbing() const { return type == kernel_type::absorbing; }
  int num_states() const { return is_absorbing() ? vocab + 1 : vocab; }
  int mask_state() const { return vocab; }

  double base_rate(int from, int to) const;
  void validate() const;
};

std::string kernel_name(kernel_type t);
kernel_type kernel_from_name(const std::string& name);

// ---- distributions ---------------------------------------------------------

constexpr int kMaxStates = 4096;

struct distribution {
  std::vector<double> p;

  int size() const { return static_cast<int>(p.size()); }
  void validate() const;  // non-negative, sums to 1 within 1e-9, capped size
};

double entropy(const distribution& d);

// ---- closed-form evolution -------------------------------------------------

// Probability of ending in `to` after starting in `from` and integrating the
// forward generator over accumulated noise sbar.
double transition_probability(const rate_kernel& k, double sbar, int from,
                              int to);

distribution evolve_marginal(const rate_kernel& k, const distribution& p0,
                             double sbar);

distribution stationary_distribution(const rate_kernel& k);

// Generative-direction jump rate per unit sigma at state distribution p:
// off-diagonal (from != to) is p(to)/p(from) * base_rate(to, from), the
// diagonal is minus the sum of the off-diagonal row. States with mass below
// 1e-15 are rejected as singular.
double reverse_rate(const rate_kernel& k, const distribution& p, int from,
                    int to);

// ---- dense transition operators ---------------------------------------------

struct transition_operator {
  int n = 0;
  std::vector<double> m;  // row-major n*n, rows sum to one

  static transition_operator build(const rate_kernel& k, double sbar);
  distribution apply(const distribution& p0) const;
  transition_operator compose(const transition_operator& next) const;
  void validate() const;  // row-stochastic within 1e-9
};

}  // namespace dds
