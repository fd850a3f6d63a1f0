#include "dds/ctmc.hpp"

#include <cmath>
#include <cstdlib>

#include "dds/errors.hpp"

namespace dds {

// ---- forward kernels -------------------------------------------------------

double rate_kernel::base_rate(int from, int to) const {
  if (type == kernel_type::uniform) {
    if (from == to) return -static_cast<double>(vocab - 1);
    return 1.0;
  }
  // Absorbing: data tokens jump only into the mask; the mask never leaves.
  if (from == mask_state()) return 0.0;
  if (to == mask_state()) return 1.0;
  return from == to ? -1.0 : 0.0;
}

void rate_kernel::validate() const {
  if (vocab < 2) throw config_error("kernel: vocab must be at least 2");
  if (num_states() > kMaxStates)
    throw config_error("kernel: state count exceeds cap of " +
                       std::to_string(kMaxStates));
}

std::string kernel_name(kernel_type t) {
  return t == kernel_type::uniform ? "uniform" : "absorbing";
}

kernel_type kernel_from_name(const std::string& name) {
  if (name == "uniform") return kernel_type::uniform;
  if (name == "absorbing") return kernel_type::absorbing;
  throw config_error("unknown kernel '" + name + "'");
}

// ---- distributions ---------------------------------------------------------

void distribution::validate() const {
  if (p.empty()) throw config_error("distribution: empty");
  if (size() > kMaxStates)
    throw config_error("distribution: state count exceeds cap of " +
                       std::to_string(kMaxStates));
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0))
      throw config_error("distribution: negative or non-finite entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw config_error("distribution: mass " + std::to_string(sum) +
                       " is not 1 within 1e-9");
}

double entropy(const distribution& d) {
  double h = 0.0;
  for (double v : d.p)
    if (v > 0.0) h -= v * std::log(v);
  return h;
}

// ---- closed-form evolution -------------------------------------------------

double transition_probability(const rate_kernel& k, double sbar, int from,
                              int to) {
  if (sbar < 0.0) throw config_error("transition: negative integrated noise");
  int n = k.num_states();
  if (from < 0 || from >= n || to < 0 || to >= n)
    throw config_error("transition: state index out of range");
  if (k.type == kernel_type::uniform) {
    double u = std::exp(-static_cast<double>(k.vocab) * sbar);
    double base = (1.0 - u) / k.vocab;
    return from == to ? base + u : base;
  }
  if (from == k.mask_state()) return to == k.mask_state() ? 1.0 : 0.0;
  double stay = std::exp(-sbar);
  if (to == from) return stay;
  if (to == k.mask_state()) return 1.0 - stay;
  return 0.0;
}

distribution evolve_marginal(const rate_kernel& k, const distribution& p0,
                             double sbar) {
  if (p0.size() != k.num_states())
    throw config_error("evolve: distribution size does not match kernel");
  if (sbar < 0.0) throw config_error("evolve: negative integrated noise");
  distribution out;
  out.p.resize(p0.p.size());
  if (k.type == kernel_type::uniform) {
    double u = std::exp(-static_cast<double>(k.vocab) * sbar);
    double base = (1.0 - u) / k.vocab;
    for (int y = 0; y < k.vocab; ++y) out.p[y] = base + u * p0.p[y];
  } else {
    double stay = std::exp(-sbar);
    int mask = k.mask_state();
    double data_mass = 0.0;
    for (int y = 0; y < k.vocab; ++y) {
      out.p[y] = stay * p0.p[y];
      data_mass += p0.p[y];
    }
    out.p[mask] = p0.p[mask] + (1.0 - stay) * data_mass;
  }
  return out;
}

distribution stationary_distribution(const rate_kernel& k) {
  distribution out;
  out.p.assign(k.num_states(), 0.0);
  if (k.type == kernel_type::uniform) {
    for (int y = 0; y < k.vocab; ++y) out.p[y] = 1.0 / k.vocab;
  } else {
    out.p[k.mask_state()] = 1.0;
  }
  return out;
}

double reverse_rate(const rate_kernel& k, const distribution& p, int from,
                    int to) {
  int n = k.num_states();
  if (p.size() != n)
    throw config_error("reverse rate: distribution size does not match kernel");
  if (from < 0 || from >= n || to < 0 || to >= n)
    throw config_error("reverse rate: state index out of range");
  if (p.p[from] < 1e-15)
    throw numerical_error("reverse rate: singular state with mass below 1e-15");
  if (from != to) {
    double base = k.base_rate(to, from);
    if (base == 0.0) return 0.0;
    return p.p[to] / p.p[from] * base;
  }
  double total = 0.0;
  for (int y = 0; y < n; ++y) {
    if (y == from) continue;
    double base = k.base_rate(y, from);
    if (base == 0.0) continue;
    total += p.p[y] / p.p[from] * base;
  }
  return -total;
}

// ---- dense transition operators ---------------------------------------------

transition_operator transition_operator::build(const rate_kernel& k,
                                               double sbar) {
  transition_operator t;
  t.n = k.num_states();
  t.m.resize(static_cast<size_t>(t.n) * t.n);
  for (int a = 0; a < t.n; ++a)
    for (int b = 0; b < t.n; ++b)
      t.m[static_cast<size_t>(a) * t.n + b] =
          transition_probability(k, sbar, a, b);
  return t;
}

distribution transition_operator::apply(const distribution& p0) const {
  if (p0.size() != n)
    throw config_error("operator apply: distribution size mismatch");
  distribution out;
  out.p.assign(n, 0.0);
  for (int a = 0; a < n; ++a) {
    double pa = p0.p[a];
    if (pa == 0.0) continue;
    const double* row = &m[static_cast<size_t>(a) * n];
    for (int b = 0; b < n; ++b) out.p[b] += pa * row[b];
  }
  return out;
}

transition_operator transition_operator::compose(
    const transition_operator& next) const {
  if (next.n != n) throw config_error("operator compose: size mismatch");
  transition_operator out;
  out.n = n;
  out.m.assign(static_cast<size_t>(n) * n, 0.0);
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) {
      double v = m[static_cast<size_t>(a) * n + c];
      if (v == 0.0) continue;
      const double* row = &next.m[static_cast<size_t>(c) * n];
      double* out_row = &out.m[static_cast<size_t>(a) * n];
      for (int b = 0; b < n; ++b) out_row[b] += v * row[b];
    }
  return out;
}

void transition_operator::validate() const {
  for (int a = 0; a < n; ++a) {
    double sum = 0.0;
    for (int b = 0; b < n; ++b) {
      double v = m[static_cast<size_t>(a) * n + b];
      if (!(v >= 0.0))
        throw numerical_error("operator: negative or non-finite entry");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw numerical_error("operator: row " + std::to_string(a) +
                            " sums to " + std::to_string(sum));
  }
}

}  // namespace dds
