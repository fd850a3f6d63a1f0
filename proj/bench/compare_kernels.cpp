// Benchmark: OpenMP kernels against their serial reference twins.
// Times curve estimation, sampling, and the training gradient, and checks
// that the parallel paths reproduce the serial outputs exactly.
// Run: bench_parallel [--reps N] [--threads N]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dds/bench.hpp"
#include "dds/ctmc.hpp"
#include "dds/mlp.hpp"
#include "dds/noise.hpp"
#include "dds/rng.hpp"
#include "dds/sampler.hpp"
#include "dds/scheduler.hpp"
#include "dds/score.hpp"
#include "dds/thermo.hpp"

namespace {

using clock_type = std::chrono::steady_clock;

struct bench_config {
  int reps = 3;
  int curve_points = 129;
  int curve_mc = 512;
  int sample_count = 2000;
  int sample_steps = 256;
  int grad_batch = 64;
};

template <typename F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    auto t0 = clock_type::now();
    f();
    double s = std::chrono::duration<double>(clock_type::now() - t0).count();
    best = std::min(best, s);
  }
  return best;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

void report(const char* name, double serial_s, double parallel_s, bool match) {
  std::printf("%-18s serial %8.3fs   parallel %8.3fs   speedup %5.2fx   %s\n",
              name, serial_s, parallel_s, serial_s / parallel_s,
              match ? "outputs identical" : "OUTPUTS DIFFER");
}

// ---- curve estimation ------------------------------------------------------

bool bench_curve(const bench_config& cfg) {
  dds::rate_kernel k{dds::kernel_type::absorbing, 15};
  dds::noise_schedule ns{0.01, 5.0};
  dds::distribution p0 = dds::binomial_dataset(14, 0.5);
  p0.p.push_back(0.0);
  dds::oracle_score model(k, ns, p0);
  auto draw = dds::draw_from_distribution(p0);
  std::vector<double> grid = dds::time_grid(1e-5, cfg.curve_points);

  dds::entropy_curve serial_out, parallel_out;
  double ts = best_of(cfg.reps, [&] {
    serial_out = dds::estimate_curve_serial(model, k, ns, draw, grid,
                                            cfg.curve_mc, 7);
  });
  double tp = best_of(cfg.reps, [&] {
    parallel_out = dds::estimate_curve(model, k, ns, draw, grid, cfg.curve_mc, 7);
  });
  bool match =
      max_abs_diff(serial_out.h_na, parallel_out.h_na) == 0.0 &&
      max_abs_diff(serial_out.h_na_se, parallel_out.h_na_se) == 0.0 &&
      max_abs_diff(serial_out.activity, parallel_out.activity) == 0.0;
  report("curve estimation", ts, tp, match);
  return match;
}

// ---- sampling ----------------------------------------------------------------

bool bench_sample(const bench_config& cfg) {
  dds::rate_kernel k{dds::kernel_type::absorbing, 15};
  dds::noise_schedule ns{0.01, 5.0};
  dds::distribution p0 = dds::binomial_dataset(14, 0.5);
  p0.p.push_back(0.0);
  dds::oracle_score model(k, ns, p0);
  dds::time_schedule sched = dds::uniform_schedule(cfg.sample_steps);

  dds::sample_batch serial_out, parallel_out;
  double ts = best_of(cfg.reps, [&] {
    serial_out = dds::sample_serial(sched, model, k, ns, cfg.sample_count, 4, 7);
  });
  double tp = best_of(cfg.reps, [&] {
    parallel_out = dds::sample(sched, model, k, ns, cfg.sample_count, 4, 7);
  });
  bool match = serial_out.sequences == parallel_out.sequences &&
               serial_out.forced_unmasks == parallel_out.forced_unmasks;
  report("sampling", ts, tp, match);
  return match;
}

// ---- training gradient -------------------------------------------------------

bool bench_gradient(const bench_config& cfg) {
  dds::countdown_spec spec;
  dds::rate_kernel k{dds::kernel_type::absorbing, spec.vocab};
  dds::noise_schedule ns{0.01, 20.0};
  dds::mlp_config mc;
  mc.seq_len = spec.seq_len;
  mc.num_states = k.num_states();
  dds::mlp_score model(mc);
  model.init_random(7);

  dds::rng g(11);
  std::vector<dds::corrupt_example> batch;
  for (int i = 0; i < cfg.grad_batch; ++i) {
    std::vector<int> x0 = dds::gen_countdown_sequence(spec, g);
    batch.push_back(dds::corrupt(k, ns, x0, 1e-5 + (1.0 - 1e-5) * g.u01(), g));
  }

  std::vector<double> serial_grad, parallel_grad;
  double serial_loss = 0.0, parallel_loss = 0.0;
  double ts = best_of(cfg.reps, [&] {
    serial_loss = dds::dwdse_loss_grad_serial(model, k, ns, batch, serial_grad);
  });
  double tp = best_of(cfg.reps, [&] {
    parallel_loss = dds::dwdse_loss_grad(model, k, ns, batch, parallel_grad);
  });
  bool match = serial_loss == parallel_loss &&
               max_abs_diff(serial_grad, parallel_grad) == 0.0;
  report("loss gradient", ts, tp, match);
  return match;
}

}  // namespace

int main(int argc, char** argv) {
  bench_config cfg;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--reps") == 0 && i + 1 < argc) {
      cfg.reps = std::atoi(argv[++i]);
    } else if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc) {
#ifdef _OPENMP
      omp_set_num_threads(std::atoi(argv[++i]));
#else
      ++i;
#endif
    } else {
      std::fprintf(stderr, "usage: bench_parallel [--reps N] [--threads N]\n");
      return 2;
    }
  }
  if (cfg.reps < 1) cfg.reps = 1;

#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads %d, best of %d reps\n",
              omp_get_max_threads(), cfg.reps);
#else
  std::printf("OpenMP disabled, best of %d reps\n", cfg.reps);
#endif

  bool ok = true;
  ok = bench_curve(cfg) && ok;
  ok = bench_sample(cfg) && ok;
  ok = bench_gradient(cfg) && ok;
  return ok ? 0 : 1;
}
