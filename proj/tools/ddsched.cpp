#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>
#include <json.hpp>

#include "dds/bench.hpp"
#include "dds/errors.hpp"
#include "dds/io.hpp"
#include "dds/mlp.hpp"
#include "dds/sampler.hpp"
#include "dds/scheduler.hpp"
#include "dds/score.hpp"
#include "dds/sha256.hpp"
#include "dds/thermo.hpp"

namespace {

using nlohmann::json;

// ---- shared plumbing -------------------------------------------------------------

std::string out_root() {
  const char* env = std::getenv("DDSCHED_OUT");
  return env != nullptr && *env != '\0' ? std::string(env) : std::string(".");
}

void apply_threads(int threads) {
  if (threads < 0) throw dds::config_error("--threads must be non-negative");
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw dds::config_error("cannot create directory '" + dir + "'");
}

void ensure_parent(const std::string& path) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) ensure_dir(p.parent_path().string());
}

// ---- dataset resolution -----------------------------------------------------------

struct task_options {
  std::string data = "binomial";
  int trials = 14;
  double prob = 0.5;
  int vocab = 32;
  int seq_len = 16;
};

void add_task_flags(CLI::App* cmd, task_options& t) {
  cmd->add_option("--data", t.data, "dataset: binomial or countdown")
      ->capture_default_str();
  cmd->add_option("--trials", t.trials, "binomial trial count")
      ->capture_default_str();
  cmd->add_option("--prob", t.prob, "binomial success probability")
      ->capture_default_str();
  cmd->add_option("--vocab", t.vocab, "countdown vocabulary size")
      ->capture_default_str();
  cmd->add_option("--len", t.seq_len, "countdown sequence length")
      ->capture_default_str();
}

// Kernel and noise defaults follow the dataset when not given explicitly.
dds::kernel_type resolve_kernel(const std::string& flag,
                                const std::string& data) {
  if (!flag.empty()) return dds::kernel_from_name(flag);
  return data == "countdown" ? dds::kernel_type::absorbing
                             : dds::kernel_type::uniform;
}

dds::noise_schedule resolve_noise(double sigma_min, double sigma_max,
                                  const std::string& data) {
  dds::noise_schedule ns;
  if (data == "countdown") ns = dds::noise_schedule{0.01, 20.0};
  if (sigma_min > 0.0) ns.sigma_min = sigma_min;
  if (sigma_max > 0.0) ns.sigma_max = sigma_max;
  ns.validate();
  return ns;
}

struct task {
  dds::rate_kernel kernel{dds::kernel_type::uniform, 2};
  int seq_len = 1;
  dds::distribution p0;
  bool has_p0 = false;
  std::function<std::vector<int>(dds::rng&)> draw;
};

task make_task(const task_options& o, dds::kernel_type kt) {
  task t;
  if (o.data == "binomial") {
    t.kernel = dds::rate_kernel{kt, o.trials + 1};
    t.p0 = dds::binomial_dataset(o.trials, o.prob);
    if (t.kernel.is_absorbing()) t.p0.p.push_back(0.0);
    t.has_p0 = true;
    t.seq_len = 1;
    t.draw = dds::draw_from_distribution(t.p0);
  } else if (o.data == "countdown") {
    dds::countdown_spec spec;
    spec.vocab = o.vocab;
    spec.seq_len = o.seq_len;
    spec.validate();
    t.kernel = dds::rate_kernel{kt, spec.vocab};
    t.seq_len = spec.seq_len;
    t.draw = [spec](dds::rng& g) {
      return dds::gen_countdown_sequence(spec, g);
    };
  } else {
    throw dds::config_error("unknown dataset: " + o.data);
  }
  t.kernel.validate();
  return t;
}

json task_json(const task_options& o) {
  json j;
  j["data"] = o.data;
  if (o.data == "binomial") {
    j["trials"] = o.trials;
    j["prob"] = o.prob;
  } else {
    j["vocab"] = o.vocab;
    j["len"] = o.seq_len;
  }
  return j;
}

json kernel_json(dds::kernel_type kt, int vocab,
                 const dds::noise_schedule& ns) {
  json j;
  j["kernel"] = dds::kernel_name(kt);
  j["vocab"] = vocab;
  j["sigma_min"] = ns.sigma_min;
  j["sigma_max"] = ns.sigma_max;
  return j;
}

// "oracle" or a path to a saved ratio network.
std::unique_ptr<dds::score_model> make_score(const std::string& score,
                                             const task& t,
                                             const dds::noise_schedule& ns) {
  if (score == "oracle") {
    if (!t.has_p0)
      throw dds::config_error(
          "oracle score is only available for the binomial dataset");
    return std::make_unique<dds::oracle_score>(t.kernel, ns, t.p0);
  }
  auto model = std::make_unique<dds::mlp_score>(dds::mlp_score::load(score));
  if (model->num_states() != t.kernel.num_states())
    throw dds::config_error(
        "model '" + score + "' covers " + std::to_string(model->num_states()) +
        " states but the kernel has " + std::to_string(t.kernel.num_states()));
  if (model->config().seq_len != t.seq_len)
    throw dds::config_error(
        "model '" + score + "' expects length " +
        std::to_string(model->config().seq_len) + " sequences, not " +
        std::to_string(t.seq_len));
  return model;
}

void write_manifest(const std::string& path, const json& j) {
  dds::write_text_file(path, j.dump(2) + "\n");
  std::printf("wrote %s\n", path.c_str());
}

// ---- estimate ----------------------------------------------------------------------

struct estimate_options {
  task_options task;
  std::string kernel;
  std::string score = "oracle";
  int n_mc = 1024;
  int grid_points = 257;
  double eps = 1e-5;
  std::string wbound = "activity-nonadiabatic";
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  uint64_t seed = 0;
  std::string out;
  int threads = 0;
};

void run_estimate(const estimate_options& o) {
  apply_threads(o.threads);
  dds::kernel_type kt = resolve_kernel(o.kernel, o.task.data);
  task t = make_task(o.task, kt);
  dds::noise_schedule ns = resolve_noise(o.sigma_min, o.sigma_max, o.task.data);
  std::unique_ptr<dds::score_model> model = make_score(o.score, t, ns);

  std::vector<double> grid = dds::time_grid(o.eps, o.grid_points);
  dds::entropy_curve entropy = dds::estimate_curve(*model, t.kernel, ns, t.draw,
                                                   grid, o.n_mc, o.seed);
  dds::wasserstein_curve transport =
      dds::wasserstein_bound(entropy, dds::wbound_from_name(o.wbound));

  std::string dir = o.out.empty() ? out_root() + "/estimate" : o.out;
  ensure_dir(dir);
  std::string curves = dir + "/curves.csv";
  dds::write_curve_csv(curves, {entropy, transport});
  std::printf("wrote %s\n", curves.c_str());

  json m;
  m["version"] = 1;
  m["command"] = "estimate";
  m["data"] = task_json(o.task);
  m["kernel"] = kernel_json(kt, t.kernel.vocab, ns);
  m["score"] = o.score;
  if (o.score != "oracle") m["score_sha256"] = dds::sha256_file(o.score);
  m["n"] = o.n_mc;
  m["grid_points"] = o.grid_points;
  m["eps"] = o.eps;
  m["wbound"] = o.wbound;
  m["seed"] = o.seed;
  m["outputs"]["curves.csv"] = dds::sha256_file(curves);
  write_manifest(dir + "/manifest.json", m);
}

// ---- schedule ----------------------------------------------------------------------

struct schedule_options {
  std::string strategy;
  int steps = 0;
  std::string curves;
  double eps = 1e-5;
  std::string kernel;
  int vocab = 0;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  uint64_t seed = 0;
  std::string out;
};

void run_schedule(const schedule_options& o) {
  dds::strategy_type st = dds::strategy_from_name(o.strategy);
  dds::time_schedule s;
  if (st == dds::strategy_type::uniform) {
    s = dds::uniform_schedule(o.steps, o.eps);
  } else {
    if (o.curves.empty())
      throw dds::config_error("--curves is required for " + o.strategy +
                              " schedules");
    dds::curve_file cf = dds::read_curve_csv(o.curves);
    s = st == dds::strategy_type::eds ? dds::eds_schedule(cf.entropy, o.steps)
                                      : dds::wds_schedule(cf.transport, o.steps);
    s.source_curve_sha256 = dds::sha256_file(o.curves);
  }

  if (o.vocab != 0 && o.kernel.empty())
    throw dds::config_error("--vocab needs --kernel to pin the kernel block");
  if (!o.kernel.empty()) {
    if (o.vocab <= 0)
      throw dds::config_error("--kernel needs a positive --vocab");
    s.kernel = dds::kernel_from_name(o.kernel);
    s.vocab = o.vocab;
    dds::noise_schedule ns{o.sigma_min, o.sigma_max};
    ns.validate();
    s.sigma_min = ns.sigma_min;
    s.sigma_max = ns.sigma_max;
  }
  s.seed = o.seed;
  s.validate();

  std::string out = o.out.empty() ? out_root() + "/schedule.json" : o.out;
  ensure_parent(out);
  dds::write_schedule_json(out, s);
  std::printf("wrote %s\n", out.c_str());
}

// ---- sample ------------------------------------------------------------------------

struct sample_options {
  std::string sched;
  std::string score = "oracle";
  int count = 0;
  task_options task;
  std::string kernel;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  uint64_t seed = 0;
  std::string out;
  int threads = 0;
};

void run_sample(const sample_options& o) {
  apply_threads(o.threads);
  dds::time_schedule sched = dds::read_schedule_json(o.sched);
  bool has_meta = sched.vocab != 0;

  dds::kernel_type kt;
  if (!o.kernel.empty()) {
    kt = dds::kernel_from_name(o.kernel);
    if (has_meta && kt != sched.kernel)
      throw dds::config_error("--kernel disagrees with the schedule's kernel");
  } else {
    kt = has_meta ? sched.kernel : resolve_kernel("", o.task.data);
  }

  dds::noise_schedule ns =
      has_meta ? dds::noise_schedule{sched.sigma_min, sched.sigma_max}
               : resolve_noise(0.0, 0.0, o.task.data);
  if (o.sigma_min > 0.0) {
    if (has_meta && o.sigma_min != sched.sigma_min)
      throw dds::config_error("--sigma-min disagrees with the schedule");
    ns.sigma_min = o.sigma_min;
  }
  if (o.sigma_max > 0.0) {
    if (has_meta && o.sigma_max != sched.sigma_max)
      throw dds::config_error("--sigma-max disagrees with the schedule");
    ns.sigma_max = o.sigma_max;
  }
  ns.validate();

  task t = make_task(o.task, kt);
  std::unique_ptr<dds::score_model> model = make_score(o.score, t, ns);
  dds::sample_batch batch =
      dds::sample(sched, *model, t.kernel, ns, o.count, t.seq_len, o.seed);

  std::string out = o.out.empty() ? out_root() + "/samples.txt" : o.out;
  ensure_parent(out);
  dds::samples_meta meta;
  meta.schedule_sha256 = dds::sha256_file(o.sched);
  meta.strategy = dds::strategy_name(sched.strategy);
  meta.seed = o.seed;
  meta.steps = sched.steps;
  meta.nfe = batch.nfe;
  meta.count = o.count;
  meta.seq_len = t.seq_len;
  meta.kernel = t.kernel.type;
  meta.vocab = t.kernel.vocab;
  meta.sigma_min = ns.sigma_min;
  meta.sigma_max = ns.sigma_max;
  for (int f : batch.forced_unmasks) meta.forced_unmasks += f;
  dds::write_samples(out, batch.sequences, meta);
  std::printf("wrote %s and %s.meta.json\n", out.c_str(), out.c_str());
}

// ---- eval --------------------------------------------------------------------------

struct eval_options {
  std::string metric;
  std::string samples;
  std::string target = "binomial";
  int trials = 14;
  double prob = 0.5;
  std::string out;
};

void run_eval(const eval_options& o) {
  std::vector<std::vector<int>> seqs = dds::read_samples(o.samples);
  dds::samples_meta meta = dds::read_samples_meta(o.samples);

  dds::metric_row row;
  row.strategy = meta.strategy.empty() ? "unknown" : meta.strategy;
  row.steps = meta.steps;
  row.n = static_cast<int>(seqs.size());

  if (o.metric == "countdown") {
    dds::estimate est = dds::rule_violation_report(seqs, meta.vocab);
    row.metric = "rule_violation";
    row.value = est.value;
    row.se = est.se;
  } else if (o.metric == "tv" || o.metric == "hellinger") {
    if (o.target != "binomial")
      throw dds::config_error("unknown target: " + o.target);
    dds::distribution target = dds::binomial_dataset(o.trials, o.prob);
    if (meta.kernel == dds::kernel_type::absorbing) target.p.push_back(0.0);
    int states = target.size();
    std::vector<double> counts(states, 0.0);
    double total = 0.0;
    for (const std::vector<int>& s : seqs)
      for (int tok : s) {
        if (tok < 0 || tok >= states)
          throw dds::config_error("token " + std::to_string(tok) +
                                  " lies outside the target support");
        counts[tok] += 1.0;
        total += 1.0;
      }
    dds::distribution empirical;
    empirical.p = counts;
    for (double& v : empirical.p) v /= total;
    row.metric = o.metric;
    row.value = o.metric == "tv" ? dds::total_variation(empirical, target)
                                 : dds::hellinger(empirical, target);
    row.se = 0.0;
  } else {
    throw dds::config_error("unknown evaluation task: " + o.metric);
  }

  std::fputs(dds::report_csv_text({row}).c_str(), stdout);
  if (!o.out.empty()) {
    ensure_parent(o.out);
    dds::write_report_csv(o.out, {row});
    std::printf("wrote %s\n", o.out.c_str());
  }
}

// ---- train -------------------------------------------------------------------------

struct tool_train_options {
  task_options task;
  std::string kernel;
  int steps = 20000;
  int batch = 64;
  double lr = 1e-3;
  int hidden = 128;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  uint64_t seed = 0;
  std::string out;
  int threads = 0;
};

void run_train(const tool_train_options& o) {
  apply_threads(o.threads);
  dds::kernel_type kt = resolve_kernel(o.kernel, o.task.data);
  task t = make_task(o.task, kt);
  dds::noise_schedule ns = resolve_noise(o.sigma_min, o.sigma_max, o.task.data);

  dds::mlp_config mc;
  mc.seq_len = t.seq_len;
  mc.num_states = t.kernel.num_states();
  mc.hidden = o.hidden;
  dds::mlp_score model(mc);
  model.init_random(dds::substream_seed(o.seed, 0));

  dds::train_config tc;
  tc.steps = o.steps;
  tc.batch = o.batch;
  tc.lr = o.lr;
  tc.seed = dds::substream_seed(o.seed, 1);
  dds::train_report rep = dds::train(model, t.kernel, ns, t.draw, tc);

  std::string out = o.out.empty() ? out_root() + "/model.json" : o.out;
  ensure_parent(out);
  model.save(out);
  std::printf("wrote %s\n", out.c_str());

  json m;
  m["version"] = 1;
  m["command"] = "train";
  m["data"] = task_json(o.task);
  m["kernel"] = kernel_json(kt, t.kernel.vocab, ns);
  m["steps"] = o.steps;
  m["batch"] = o.batch;
  m["lr"] = o.lr;
  m["hidden"] = o.hidden;
  m["seed"] = o.seed;
  m["init_seed"] = dds::substream_seed(o.seed, 0);
  m["train_seed"] = dds::substream_seed(o.seed, 1);
  m["initial_loss"] = rep.initial_loss;
  m["final_loss"] = rep.final_loss;
  m["outputs"][std::filesystem::path(out).filename().string()] =
      dds::sha256_file(out);
  write_manifest(out + ".manifest.json", m);
}

// ---- reproduce ---------------------------------------------------------------------

struct reproduce_options {
  std::string experiment;
  uint64_t seed = 0;
  std::string out;
  int threads = 0;
  std::string kernel;
  std::string mode = "network";
  int grid_points = 257;
  int n_mc = 1024;
  int train_steps = 0;
  int train_batch = 64;
  std::vector<int> budgets;
  std::vector<std::string> strategies;
  int curve_points = 257;
  int curve_mc = 512;
  int n_eval = 1024;
  std::string model;
};

void reproduce_binomial(const reproduce_options& o) {
  std::string dir = o.out.empty() ? out_root() + "/binomial" : o.out;
  ensure_dir(dir);

  std::vector<dds::kernel_type> kernels;
  if (o.kernel.empty())
    kernels = {dds::kernel_type::uniform, dds::kernel_type::absorbing};
  else
    kernels = {dds::kernel_from_name(o.kernel)};

  json m;
  m["version"] = 1;
  m["command"] = "reproduce";
  m["experiment"] = "binomial";
  m["mode"] = o.mode;
  m["grid_points"] = o.grid_points;
  m["n"] = o.n_mc;
  m["seed"] = o.seed;

  for (dds::kernel_type kt : kernels) {
    dds::binomial_config cfg;
    cfg.kernel = kt;
    cfg.grid_points = o.grid_points;
    cfg.n_mc = o.n_mc;
    cfg.mode = dds::score_mode_from_name(o.mode);
    if (o.train_steps > 0) cfg.train_steps = o.train_steps;
    cfg.train_batch = o.train_batch;
    cfg.seed = dds::substream_seed(
        o.seed, kt == dds::kernel_type::uniform ? 10 : 11);
    dds::binomial_result res = dds::run_binomial_experiment(cfg);

    std::string kname = dds::kernel_name(kt);
    std::string exact_path = dir + "/" + kname + "_exact.csv";
    std::string model_path = dir + "/" + kname + "_model.csv";
    dds::write_curve_csv(exact_path, {res.exact_entropy, res.exact_transport});
    dds::write_curve_csv(model_path, {res.model_entropy, res.model_transport});
    std::printf("wrote %s\n", exact_path.c_str());
    std::printf("wrote %s\n", model_path.c_str());

    json run;
    run["seed"] = cfg.seed;
    run["init_seed"] = dds::substream_seed(cfg.seed, 0);
    run["train_seed"] = dds::substream_seed(cfg.seed, 1);
    run["estimate_seed"] = dds::substream_seed(cfg.seed, 3);
    run["train_steps"] = cfg.train_steps;
    if (cfg.mode == dds::score_mode::network) {
      run["initial_loss"] = res.training.initial_loss;
      run["final_loss"] = res.training.final_loss;
    }
    m["runs"][kname] = run;
    m["outputs"][kname + "_exact.csv"] = dds::sha256_file(exact_path);
    m["outputs"][kname + "_model.csv"] = dds::sha256_file(model_path);
  }
  write_manifest(dir + "/manifest.json", m);
}

void reproduce_countdown(const reproduce_options& o) {
  std::string dir = o.out.empty() ? out_root() + "/countdown" : o.out;
  ensure_dir(dir);
  ensure_dir(dir + "/schedules");

  dds::countdown_config cfg;
  if (!o.budgets.empty()) cfg.budgets = o.budgets;
  if (!o.strategies.empty()) {
    cfg.strategies.clear();
    for (const std::string& name : o.strategies)
      cfg.strategies.push_back(dds::strategy_from_name(name));
  }
  if (o.train_steps > 0) cfg.train_steps = o.train_steps;
  cfg.train_batch = o.train_batch;
  cfg.curve_points = o.curve_points;
  cfg.curve_mc = o.curve_mc;
  cfg.n_eval = o.n_eval;
  cfg.seed = o.seed;
  cfg.validate();

  json m;
  m["version"] = 1;
  m["command"] = "reproduce";
  m["experiment"] = "countdown";
  m["data"] = {{"vocab", cfg.data.vocab}, {"len", cfg.data.seq_len}};
  m["kernel"] = kernel_json(dds::kernel_type::absorbing, cfg.data.vocab,
                            cfg.noise);
  m["budgets"] = cfg.budgets;
  json strategies = json::array();
  for (dds::strategy_type st : cfg.strategies)
    strategies.push_back(dds::strategy_name(st));
  m["strategies"] = strategies;
  m["train_steps"] = cfg.train_steps;
  m["train_batch"] = cfg.train_batch;
  m["curve_points"] = cfg.curve_points;
  m["curve_mc"] = cfg.curve_mc;
  m["n_eval"] = cfg.n_eval;
  m["seed"] = cfg.seed;
  m["curve_seed"] = cfg.curve_seed();

  dds::train_report rep;
  dds::mlp_score model =
      o.model.empty() ? dds::train_countdown_model(cfg, &rep)
                      : dds::mlp_score::load(o.model);
  if (o.model.empty()) {
    m["init_seed"] = dds::substream_seed(cfg.seed, 0);
    m["train_seed"] = cfg.train_seed();
    m["initial_loss"] = rep.initial_loss;
    m["final_loss"] = rep.final_loss;
  } else {
    m["model"] = o.model;
  }
  std::string model_path = dir + "/model.json";
  model.save(model_path);
  std::printf("wrote %s\n", model_path.c_str());

  dds::countdown_result res = dds::run_countdown_experiment(model, cfg);

  std::string curves_path = dir + "/curves.csv";
  dds::write_curve_csv(curves_path, {res.curve, res.transport});
  std::printf("wrote %s\n", curves_path.c_str());
  std::string curves_sha = dds::sha256_file(curves_path);

  std::string report_path = dir + "/report.csv";
  dds::write_report_csv(report_path, res.rows());
  std::printf("wrote %s\n", report_path.c_str());

  json cells = json::array();
  m["outputs"]["model.json"] = dds::sha256_file(model_path);
  m["outputs"]["curves.csv"] = curves_sha;
  m["outputs"]["report.csv"] = dds::sha256_file(report_path);
  for (size_t i = 0; i < res.cells.size(); ++i) {
    const dds::countdown_cell& c = res.cells[i];
    dds::time_schedule sched = res.schedules[i];
    sched.source_curve_sha256 = curves_sha;
    std::string name = "schedules/" + dds::strategy_name(c.strategy) + "_K" +
                       std::to_string(c.steps) + ".json";
    dds::write_schedule_json(dir + "/" + name, sched);
    m["outputs"][name] = dds::sha256_file(dir + "/" + name);

    json cell;
    cell["strategy"] = dds::strategy_name(c.strategy);
    cell["K"] = c.steps;
    cell["seed"] = c.seed;
    cell["rule_violation"] = c.violation.value;
    cell["stderr"] = c.violation.se;
    cell["n"] = c.n;
    cells.push_back(cell);
  }
  m["cells"] = cells;
  std::printf("wrote %s/schedules (%zu files)\n", dir.c_str(),
              res.schedules.size());
  write_manifest(dir + "/manifest.json", m);
}

void run_reproduce(const reproduce_options& o) {
  apply_threads(o.threads);
  if (o.experiment == "binomial")
    reproduce_binomial(o);
  else if (o.experiment == "countdown")
    reproduce_countdown(o);
  else
    throw dds::config_error("unknown experiment: " + o.experiment);
}

// ---- wiring ------------------------------------------------------------------------

void add_noise_flags(CLI::App* cmd, double& sigma_min, double& sigma_max) {
  cmd->add_option("--sigma-min", sigma_min,
                  "noise floor (0 = dataset default)");
  cmd->add_option("--sigma-max", sigma_max,
                  "noise ceiling (0 = dataset default)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "discrete-diffusion schedule toolkit: entropy and transport curves, "
      "EDS/WDS schedules, tau-leaping sampling, and experiment harnesses"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "INI file with one section per command; flags override it");

  estimate_options est;
  CLI::App* c_est = app.add_subcommand(
      "estimate", "sweep entropy and transport curves over a time grid");
  add_task_flags(c_est, est.task);
  c_est->add_option("--kernel", est.kernel,
                    "uniform or absorbing (default: by dataset)");
  c_est->add_option("--score", est.score, "'oracle' or a model file")
      ->capture_default_str();
  c_est->add_option("--n", est.n_mc, "samples per grid point")
      ->capture_default_str();
  c_est->add_option("--grid", est.grid_points, "grid points")
      ->capture_default_str();
  c_est->add_option("--eps", est.eps, "left end of the time grid")
      ->capture_default_str();
  c_est->add_option("--wbound", est.wbound, "transport bound mode")
      ->capture_default_str();
  add_noise_flags(c_est, est.sigma_min, est.sigma_max);
  c_est->add_option("--seed", est.seed, "RNG seed")->required();
  c_est->add_option("--out", est.out, "output directory");
  c_est->add_option("--threads", est.threads, "worker cap (0 = hardware)");
  c_est->callback([&est] { run_estimate(est); });

  schedule_options sch;
  CLI::App* c_sch = app.add_subcommand(
      "schedule", "build a sampling schedule from a curve file");
  c_sch->add_option("--strategy", sch.strategy, "uniform, eds, or wds")
      ->required();
  c_sch->add_option("-K,--steps", sch.steps, "number of sampler steps")
      ->required()
      ->check(CLI::PositiveNumber);
  c_sch->add_option("--curves", sch.curves, "curve CSV (eds/wds only)");
  c_sch->add_option("--eps", sch.eps, "left endpoint for uniform schedules")
      ->capture_default_str();
  c_sch->add_option("--kernel", sch.kernel,
                    "kernel to stamp into the schedule");
  c_sch->add_option("--vocab", sch.vocab, "vocabulary to stamp");
  add_noise_flags(c_sch, sch.sigma_min, sch.sigma_max);
  c_sch->add_option("--seed", sch.seed, "seed recorded for downstream runs");
  c_sch->add_option("--out", sch.out, "output JSON path");
  c_sch->callback([&sch] { run_schedule(sch); });

  sample_options smp;
  CLI::App* c_smp = app.add_subcommand(
      "sample", "run the tau-leaping sampler along a schedule");
  c_smp->add_option("--sched", smp.sched, "schedule JSON")->required();
  c_smp->add_option("--score", smp.score, "'oracle' or a model file")
      ->capture_default_str();
  c_smp->add_option("--count", smp.count, "sequences to generate")
      ->required()
      ->check(CLI::PositiveNumber);
  add_task_flags(c_smp, smp.task);
  c_smp->add_option("--kernel", smp.kernel,
                    "uniform or absorbing (default: from schedule)");
  add_noise_flags(c_smp, smp.sigma_min, smp.sigma_max);
  c_smp->add_option("--seed", smp.seed, "RNG seed")->required();
  c_smp->add_option("--out", smp.out, "output samples path");
  c_smp->add_option("--threads", smp.threads, "worker cap (0 = hardware)");
  c_smp->callback([&smp] { run_sample(smp); });

  eval_options evl;
  CLI::App* c_evl =
      app.add_subcommand("eval", "score a sample file against a task");
  c_evl->add_option("task", evl.metric, "countdown, tv, or hellinger")
      ->required();
  c_evl->add_option("--samples", evl.samples, "samples path")->required();
  c_evl->add_option("--target", evl.target, "reference distribution")
      ->capture_default_str();
  c_evl->add_option("--trials", evl.trials, "binomial trial count")
      ->capture_default_str();
  c_evl->add_option("--prob", evl.prob, "binomial success probability")
      ->capture_default_str();
  c_evl->add_option("--out", evl.out, "also write the report CSV here");
  c_evl->callback([&evl] { run_eval(evl); });

  tool_train_options trn;
  CLI::App* c_trn =
      app.add_subcommand("train", "train a ratio network on a dataset");
  add_task_flags(c_trn, trn.task);
  trn.task.data = "countdown";
  c_trn->get_option("--data")->default_val("countdown");
  c_trn->add_option("--kernel", trn.kernel,
                    "uniform or absorbing (default: by dataset)");
  c_trn->add_option("--steps", trn.steps, "training steps")
      ->capture_default_str();
  c_trn->add_option("--batch", trn.batch, "batch size")->capture_default_str();
  c_trn->add_option("--lr", trn.lr, "learning rate")->capture_default_str();
  c_trn->add_option("--hidden", trn.hidden, "hidden width")
      ->capture_default_str();
  add_noise_flags(c_trn, trn.sigma_min, trn.sigma_max);
  c_trn->add_option("--seed", trn.seed, "RNG seed")->required();
  c_trn->add_option("--out", trn.out, "output model path");
  c_trn->add_option("--threads", trn.threads, "worker cap (0 = hardware)");
  c_trn->callback([&trn] { run_train(trn); });

  reproduce_options rep;
  CLI::App* c_rep = app.add_subcommand(
      "reproduce", "run a full experiment into an artifact directory");
  c_rep->add_option("experiment", rep.experiment, "binomial or countdown")
      ->required();
  c_rep->add_option("--seed", rep.seed, "RNG seed")->required();
  c_rep->add_option("--out", rep.out, "artifact directory");
  c_rep->add_option("--threads", rep.threads, "worker cap (0 = hardware)");
  c_rep->add_option("--kernel", rep.kernel,
                    "binomial: restrict to one kernel (default: both)");
  c_rep->add_option("--mode", rep.mode, "binomial: oracle or network")
      ->capture_default_str();
  c_rep->add_option("--grid", rep.grid_points, "binomial: grid points")
      ->capture_default_str();
  c_rep->add_option("--n", rep.n_mc, "binomial: samples per grid point")
      ->capture_default_str();
  c_rep->add_option("--train-steps", rep.train_steps,
                    "training steps (0 = experiment default)");
  c_rep->add_option("--train-batch", rep.train_batch, "training batch size")
      ->capture_default_str();
  c_rep->add_option("--budgets", rep.budgets, "countdown: step budgets")
      ->delimiter(',');
  c_rep->add_option("--strategies", rep.strategies, "countdown: strategies")
      ->delimiter(',');
  c_rep->add_option("--curve-points", rep.curve_points,
                    "countdown: curve grid points")
      ->capture_default_str();
  c_rep->add_option("--curve-mc", rep.curve_mc,
                    "countdown: samples per curve point")
      ->capture_default_str();
  c_rep->add_option("--n-eval", rep.n_eval, "countdown: sequences per cell")
      ->capture_default_str();
  c_rep->add_option("--model", rep.model,
                    "countdown: pre-trained model (skips training)");
  c_rep->callback([&rep] { run_reproduce(rep); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const dds::config_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const dds::numerical_error& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return 1;
  }
  return 0;
}
