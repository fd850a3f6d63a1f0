#include "dds/bench.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "dds/errors.hpp"
#include "dds/sampler.hpp"
#include "dds/score.hpp"

namespace dds {

// ---- datasets --------------------------------------------------------------------

void countdown_spec::validate() const {
  if (vocab < 2) throw config_error("countdown: vocab must be at least 2");
  if (seq_len < 2) throw config_error("countdown: length must be at least 2");
}

std::vector<int> gen_countdown_sequence(const countdown_spec& spec, rng& g) {
  spec.validate();
  std::vector<int> x(spec.seq_len);
  x[0] = static_cast<int>(g.uniform_int(static_cast<uint64_t>(spec.vocab)));
  for (int i = 1; i < spec.seq_len; ++i)
    x[i] = x[i - 1] > 0
               ? x[i - 1] - 1
               : static_cast<int>(
                     g.uniform_int(static_cast<uint64_t>(spec.vocab)));
  return x;
}

std::vector<std::vector<int>> gen_countdown(const countdown_spec& spec, int n,
                                            rng& g) {
  if (n < 1) throw config_error("countdown: need at least one sequence");
  std::vector<std::vector<int>> out(n);
  for (int i = 0; i < n; ++i) out[i] = gen_countdown_sequence(spec, g);
  return out;
}

distribution binomial_dataset(int trials, double prob) {
  if (trials < 1) throw config_error("binomial: trials must be positive");
  if (!(prob > 0.0 && prob < 1.0))
    throw config_error("binomial: probability must lie in (0, 1)");
  distribution d;
  d.p.resize(trials + 1);
  d.p[0] = std::pow(1.0 - prob, trials);
  double odds = prob / (1.0 - prob);
  for (int k = 1; k <= trials; ++k)
    d.p[k] = d.p[k - 1] * odds * (trials - k + 1) / k;
  d.validate();
  return d;
}

// ---- metrics ---------------------------------------------------------------------

double rule_violation_rate(const std::vector<int>& seq, int vocab) {
  if (seq.size() < 2)
    throw config_error("violation rate needs at least one adjacent pair");
  int bad = 0;
  for (size_t i = 0; i + 1 < seq.size(); ++i) {
    int a = seq[i], b = seq[i + 1];
    bool in_vocab = a >= 0 && a < vocab && b >= 0 && b < vocab;
    bool valid = in_vocab && (a == 0 || b == a - 1);
    if (!valid) ++bad;
  }
  return static_cast<double>(bad) / (seq.size() - 1);
}

double rule_violation_rate(const std::vector<std::vector<int>>& seqs,
                           int vocab) {
  if (seqs.empty()) throw config_error("violation rate: no sequences");
  double bad = 0.0, pairs = 0.0;
  for (const auto& s : seqs) {
    bad += rule_violation_rate(s, vocab) * (s.size() - 1);
    pairs += static_cast<double>(s.size() - 1);
  }
  return bad / pairs;
}

estimate rule_violation_report(const std::vector<std::vector<int>>& seqs,
                               int vocab) {
  if (seqs.empty()) throw config_error("violation rate: no sequences");
  size_t n = seqs.size();
  std::vector<double> rates(n);
  for (size_t i = 0; i < n; ++i) rates[i] = rule_violation_rate(seqs[i], vocab);
  estimate e;
  for (double r : rates) e.value += r;
  e.value /= static_cast<double>(n);
  if (n > 1) {
    double ss = 0.0;
    for (double r : rates) ss += (r - e.value) * (r - e.value);
    e.se = std::sqrt(ss / (static_cast<double>(n) * (n - 1)));
  }
  return e;
}

namespace {

void check_same_support(const distribution& p, const distribution& q) {
  p.validate();
  q.validate();
  if (p.size() != q.size())
    throw config_error("metric: distributions have different supports");
}

}  // namespace

double hellinger(const distribution& p, const distribution& q) {
  check_same_support(p, q);
  double bc = 0.0;
  for (int i = 0; i < p.size(); ++i) bc += std::sqrt(p.p[i] * q.p[i]);
  return std::sqrt(std::max(0.0, 1.0 - bc));
}

double total_variation(const distribution& p, const distribution& q) {
  check_same_support(p, q);
  double tv = 0.0;
  for (int i = 0; i < p.size(); ++i) tv += 0.5 * std::abs(p.p[i] - q.p[i]);
  return tv;
}

// ---- dynamics experiment ------------------------------------------------------------

score_mode score_mode_from_name(const std::string& name) {
  if (name == "oracle") return score_mode::oracle;
  if (name == "network") return score_mode::network;
  throw config_error("unknown score mode: " + name);
}

std::string score_mode_name(score_mode mode) {
  return mode == score_mode::oracle ? "oracle" : "network";
}

void binomial_config::validate() const {
  noise.validate();
  if (trials < 1) throw config_error("dynamics run: trials must be positive");
  if (!(prob > 0.0 && prob < 1.0))
    throw config_error("dynamics run: probability must lie in (0, 1)");
  if (grid_points < 2) throw config_error("dynamics run: grid too small");
  if (n_mc < 2) throw config_error("dynamics run: need at least 2 samples");
  if (mode == score_mode::network && train_steps < 1)
    throw config_error("dynamics run: network mode needs training steps");
  if (train_batch < 1) throw config_error("dynamics run: bad batch size");
}

binomial_result run_binomial_experiment(const binomial_config& cfg) {
  cfg.validate();
  rate_kernel k{cfg.kernel, cfg.trials + 1};
  distribution p0 = binomial_dataset(cfg.trials, cfg.prob);
  if (k.is_absorbing()) p0.p.push_back(0.0);
  std::vector<double> grid = time_grid(1e-5, cfg.grid_points);

  binomial_result out;
  out.exact_entropy = exact_curve(k, cfg.noise, p0, grid);
  out.exact_transport =
      wasserstein_bound(out.exact_entropy, wbound_mode::activity_nonadiabatic);

  auto draw = draw_from_distribution(p0);
  if (cfg.mode == score_mode::oracle) {
    oracle_score model(k, cfg.noise, p0);
    out.model_entropy = estimate_curve(model, k, cfg.noise, draw, grid,
                                       cfg.n_mc, substream_seed(cfg.seed, 3));
  } else {
    mlp_config mc;
    mc.seq_len = 1;
    mc.num_states = k.num_states();
    mlp_score model(mc);
    model.init_random(substream_seed(cfg.seed, 0));
    train_config tc;
    tc.steps = cfg.train_steps;
    tc.batch = cfg.train_batch;
    tc.seed = substream_seed(cfg.seed, 1);
    out.training = train(model, k, cfg.noise, draw, tc);
    out.model_entropy = estimate_curve(model, k, cfg.noise, draw, grid,
                                       cfg.n_mc, substream_seed(cfg.seed, 3));
  }
  out.model_transport =
      wasserstein_bound(out.model_entropy, wbound_mode::activity_nonadiabatic);
  return out;
}

// ---- schedule experiment -------------------------------------------------------------

void countdown_config::validate() const {
  data.validate();
  noise.validate();
  if (budgets.empty()) throw config_error("schedule run: no budgets");
  for (int b : budgets)
    if (b < 1) throw config_error("schedule run: budgets must be positive");
  if (strategies.empty()) throw config_error("schedule run: no strategies");
  if (train_steps < 1 || train_batch < 1)
    throw config_error("schedule run: bad training setup");
  if (curve_points < 2 || curve_mc < 2)
    throw config_error("schedule run: curve setup too small");
  if (n_eval < 2) throw config_error("schedule run: need at least 2 samples");
}

mlp_score train_countdown_model(const countdown_config& cfg,
                                train_report* report) {
  cfg.validate();
  rate_kernel k = cfg.kernel();
  mlp_config mc;
  mc.seq_len = cfg.data.seq_len;
  mc.num_states = k.num_states();
  mlp_score model(mc);
  model.init_random(substream_seed(cfg.seed, 0));
  train_config tc;
  tc.steps = cfg.train_steps;
  tc.batch = cfg.train_batch;
  tc.seed = cfg.train_seed();
  auto draw = [spec = cfg.data](rng& g) {
    return gen_countdown_sequence(spec, g);
  };
  train_report r = train(model, k, cfg.noise, draw, tc);
  if (report != nullptr) *report = r;
  return model;
}

std::vector<metric_row> countdown_result::rows() const {
  std::vector<metric_row> out;
  out.reserve(cells.size());
  for (const countdown_cell& c : cells) {
    metric_row r;
    r.strategy = strategy_name(c.strategy);
    r.steps = c.steps;
    r.metric = "rule_violation";
    r.value = c.violation.value;
    r.se = c.violation.se;
    r.n = c.n;
    out.push_back(r);
  }
  return out;
}

countdown_result run_countdown_experiment(const mlp_score& model,
                                          const countdown_config& cfg) {
  cfg.validate();
  rate_kernel k = cfg.kernel();
  if (model.config().num_states != k.num_states() ||
      model.config().seq_len != cfg.data.seq_len)
    throw config_error("schedule run: model shape does not match the task");

  std::vector<double> grid = time_grid(1e-5, cfg.curve_points);
  auto draw = [spec = cfg.data](rng& g) {
    return gen_countdown_sequence(spec, g);
  };

  countdown_result out;
  out.curve = estimate_curve(model, k, cfg.noise, draw, grid, cfg.curve_mc,
                             cfg.curve_seed());
  out.transport =
      wasserstein_bound(out.curve, wbound_mode::activity_nonadiabatic);

  int cell = 0;
  for (strategy_type strategy : cfg.strategies) {
    for (int steps : cfg.budgets) {
      time_schedule sched;
      switch (strategy) {
        case strategy_type::uniform: sched = uniform_schedule(steps); break;
        case strategy_type::eds: sched = eds_schedule(out.curve, steps); break;
        case strategy_type::wds:
          sched = wds_schedule(out.transport, steps);
          break;
      }
      sched.kernel = k.type;
      sched.vocab = k.vocab;
      sched.sigma_min = cfg.noise.sigma_min;
      sched.sigma_max = cfg.noise.sigma_max;
      sched.seed = cfg.cell_seed(cell);

      sample_batch batch = sample(sched, model, k, cfg.noise, cfg.n_eval,
                                  cfg.data.seq_len, sched.seed);
      countdown_cell c;
      c.strategy = strategy;
      c.steps = steps;
      c.seed = sched.seed;
      c.violation = rule_violation_report(batch.sequences, cfg.data.vocab);
      c.n = cfg.n_eval;
      out.schedules.push_back(sched);
      out.cells.push_back(c);
      ++cell;
    }
  }
  return out;
}

}  // namespace dds
