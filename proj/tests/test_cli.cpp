#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "dds/errors.hpp"
#include "dds/io.hpp"
#include "dds/mlp.hpp"
#include "dds/scheduler.hpp"
#include "dds/sha256.hpp"

// Binary path injected by the build; every case drives the real executable.
#ifndef DDSCHED_BIN
#error "DDSCHED_BIN must point at the ddsched executable"
#endif

namespace {

namespace fs = std::filesystem;

struct cli_result {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  if (!fs::exists(path)) return "";
  return dds::read_text_file(path);
}

// Runs the tool with stdout/stderr captured to files inside dir.
cli_result run_cli(const std::string& dir, const std::string& args) {
  std::string out_path = dir + "/stdout.txt";
  std::string err_path = dir + "/stderr.txt";
  std::string cmd = std::string(DDSCHED_BIN) + " " + args + " >" + out_path +
                    " 2>" + err_path;
  int raw = std::system(cmd.c_str());
  cli_result r;
  r.code = raw < 0 ? raw : WEXITSTATUS(raw);
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  return r;
}

std::string fresh_dir(const std::string& name) {
  std::string dir = "cli_tmp/" + name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("binomial pipeline runs end to end") {
  std::string dir = fresh_dir("pipeline");

  cli_result est = run_cli(
      dir, "estimate --kernel uniform --data binomial --score oracle"
           " --n 128 --grid 33 --seed 7 --out " + dir + "/run");
  REQUIRE(est.code == 0);
  REQUIRE(fs::exists(dir + "/run/curves.csv"));
  REQUIRE(fs::exists(dir + "/run/manifest.json"));

  cli_result sch = run_cli(
      dir, "schedule --strategy eds -K 8 --curves " + dir + "/run/curves.csv" +
           " --kernel uniform --vocab 15 --sigma-min 0.01 --sigma-max 5" +
           " --out " + dir + "/run/eds.json");
  REQUIRE(sch.code == 0);
  dds::time_schedule s = dds::read_schedule_json(dir + "/run/eds.json");
  CHECK(s.strategy == dds::strategy_type::eds);
  CHECK(s.steps == 8);
  CHECK(s.times.size() == 9);
  CHECK(s.source_curve_sha256 ==
        dds::sha256_file(dir + "/run/curves.csv"));

  cli_result smp = run_cli(
      dir, "sample --sched " + dir + "/run/eds.json" +
           " --score oracle --data binomial --count 400 --seed 11 --out " +
           dir + "/run/samples.txt");
  REQUIRE(smp.code == 0);
  std::vector<std::vector<int>> seqs =
      dds::read_samples(dir + "/run/samples.txt");
  CHECK(seqs.size() == 400);
  dds::samples_meta meta = dds::read_samples_meta(dir + "/run/samples.txt");
  CHECK(meta.nfe == 8);
  CHECK(meta.steps == 8);
  CHECK(meta.strategy == "eds");
  CHECK(meta.schedule_sha256 == dds::sha256_file(dir + "/run/eds.json"));

  cli_result evl = run_cli(
      dir, "eval tv --samples " + dir + "/run/samples.txt" +
           " --target binomial --out " + dir + "/run/report.csv");
  REQUIRE(evl.code == 0);
  std::vector<dds::metric_row> rows =
      dds::read_report_csv(dir + "/run/report.csv");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].strategy == "eds");
  CHECK(rows[0].steps == 8);
  CHECK(rows[0].metric == "tv");
  CHECK(rows[0].value >= 0.0);
  CHECK(rows[0].value <= 1.0);
  CHECK(contains(evl.out, "strategy,K,metric,value,stderr,n"));
}

TEST_CASE("uniform schedules need no curve file") {
  std::string dir = fresh_dir("uniform");
  cli_result r = run_cli(
      dir, "schedule --strategy uniform -K 4 --out " + dir + "/u.json");
  REQUIRE(r.code == 0);
  dds::time_schedule s = dds::read_schedule_json(dir + "/u.json");
  CHECK(s.steps == 4);
  CHECK(s.times.front() == doctest::Approx(1e-5));
  CHECK(s.times.back() == 1.0);
}

TEST_CASE("bad invocations exit with the usage code") {
  std::string dir = fresh_dir("usage");

  cli_result no_seed = run_cli(
      dir, "estimate --kernel uniform --data binomial --score oracle --out " +
               dir);
  CHECK(no_seed.code == 2);
  CHECK(contains(no_seed.err, "--seed"));

  cli_result no_cmd = run_cli(dir, "");
  CHECK(no_cmd.code == 2);

  cli_result bad_task = run_cli(dir, "eval frobnicate --samples missing.txt");
  CHECK(bad_task.code == 2);

  cli_result bad_strategy = run_cli(
      dir, "schedule --strategy diagonal -K 4 --out " + dir + "/x.json");
  CHECK(bad_strategy.code == 2);

  cli_result missing_curve = run_cli(
      dir, "schedule --strategy eds -K 4 --curves " + dir +
               "/nope.csv --out " + dir + "/x.json");
  CHECK(missing_curve.code == 2);
}

TEST_CASE("corrupt curve files are rejected with a line number") {
  std::string dir = fresh_dir("corrupt");
  dds::write_text_file(dir + "/bad.csv",
                       "t,h_na,h_na_se,h_na_cum,activity,w_rate,w_cum\n"
                       "1e-05,0,0,0,1,0,0\n"
                       "0.5,zero,0,0,1,0,0\n");
  cli_result r = run_cli(
      dir, "schedule --strategy eds -K 4 --curves " + dir + "/bad.csv" +
           " --out " + dir + "/x.json");
  CHECK(r.code == 2);
  CHECK(contains(r.err, "line 3"));
}

TEST_CASE("schedule and flag kernels must agree") {
  std::string dir = fresh_dir("mismatch");
  REQUIRE(run_cli(dir, "schedule --strategy uniform -K 4 --kernel absorbing"
                       " --vocab 15 --sigma-min 0.01 --sigma-max 5 --out " +
                       dir + "/a.json").code == 0);
  cli_result r = run_cli(
      dir, "sample --sched " + dir + "/a.json" +
           " --score oracle --data binomial --kernel uniform"
           " --count 10 --seed 3 --out " + dir + "/s.txt");
  CHECK(r.code == 2);
  CHECK(contains(r.err, "kernel"));

  // Vocabulary mismatch surfaces even without an explicit kernel flag.
  cli_result v = run_cli(
      dir, "sample --sched " + dir + "/a.json" +
           " --score oracle --data binomial --trials 9"
           " --count 10 --seed 3 --out " + dir + "/s.txt");
  CHECK(v.code == 2);
}

TEST_CASE("numerical failures exit with their own code") {
  std::string dir = fresh_dir("numerical");
  dds::mlp_config mc;
  mc.seq_len = 1;
  mc.num_states = 15;
  mc.hidden = 8;
  dds::mlp_score broken(mc);
  for (double& p : broken.params()) p = 1e4;
  broken.save(dir + "/broken.json");

  REQUIRE(run_cli(dir, "schedule --strategy uniform -K 4 --out " + dir +
                       "/u.json").code == 0);
  cli_result r = run_cli(
      dir, "sample --sched " + dir + "/u.json --score " + dir +
           "/broken.json --data binomial --count 10 --seed 3 --out " + dir +
           "/s.txt");
  CHECK(r.code == 3);
}

TEST_CASE("pipeline reruns are byte-identical across thread counts") {
  std::string dir = fresh_dir("determinism");
  std::string base = "estimate --kernel absorbing --data binomial"
                     " --score oracle --n 64 --grid 17 --seed 13 --out ";
  REQUIRE(run_cli(dir, base + dir + "/a --threads 1").code == 0);
  REQUIRE(run_cli(dir, base + dir + "/b --threads 4").code == 0);
  REQUIRE(run_cli(dir, base + dir + "/c").code == 0);
  std::string a = dds::read_text_file(dir + "/a/curves.csv");
  CHECK(a == dds::read_text_file(dir + "/b/curves.csv"));
  CHECK(a == dds::read_text_file(dir + "/c/curves.csv"));
  CHECK(dds::read_text_file(dir + "/a/manifest.json") ==
        dds::read_text_file(dir + "/b/manifest.json"));

  REQUIRE(run_cli(dir, "schedule --strategy wds -K 6 --curves " + dir +
                       "/a/curves.csv --out " + dir + "/w.json").code == 0);
  std::string sample_args = "sample --sched " + dir + "/w.json" +
                            " --score oracle --data binomial --kernel absorbing"
                            " --count 200 --seed 5 --out ";
  REQUIRE(run_cli(dir, sample_args + dir + "/s1.txt --threads 1").code == 0);
  REQUIRE(run_cli(dir, sample_args + dir + "/s2.txt --threads 4").code == 0);
  CHECK(dds::read_text_file(dir + "/s1.txt") ==
        dds::read_text_file(dir + "/s2.txt"));
  CHECK(dds::read_text_file(dir + "/s1.txt.meta.json") ==
        dds::read_text_file(dir + "/s2.txt.meta.json"));
}

TEST_CASE("trained network flows through sampling and evaluation") {
  std::string dir = fresh_dir("network");
  cli_result trn = run_cli(
      dir, "train --data countdown --vocab 8 --len 4 --steps 80 --batch 8"
           " --hidden 16 --seed 21 --out " + dir + "/model.json");
  REQUIRE(trn.code == 0);
  REQUIRE(fs::exists(dir + "/model.json.manifest.json"));
  dds::mlp_score model = dds::mlp_score::load(dir + "/model.json");
  CHECK(model.num_states() == 9);
  CHECK(model.config().seq_len == 4);

  REQUIRE(run_cli(dir, "schedule --strategy uniform -K 6 --kernel absorbing"
                       " --vocab 8 --sigma-min 0.01 --sigma-max 20 --out " +
                       dir + "/u.json").code == 0);
  cli_result smp = run_cli(
      dir, "sample --sched " + dir + "/u.json --score " + dir +
           "/model.json --data countdown --vocab 8 --len 4"
           " --count 100 --seed 2 --out " + dir + "/s.txt");
  REQUIRE(smp.code == 0);

  cli_result evl =
      run_cli(dir, "eval countdown --samples " + dir + "/s.txt");
  REQUIRE(evl.code == 0);
  CHECK(contains(evl.out, "uniform,6,rule_violation,"));

  // Masked states never leak into emitted samples.
  for (const std::vector<int>& s : dds::read_samples(dir + "/s.txt"))
    for (int tok : s) CHECK(tok < 8);
}

TEST_CASE("config files stand in for flags and flags win on conflict") {
  std::string dir = fresh_dir("config");
  dds::write_text_file(dir + "/run.ini",
                       "[schedule]\n"
                       "strategy=uniform\n"
                       "steps=5\n"
                       "out=" + dir + "/from_file.json\n");
  cli_result file_only =
      run_cli(dir, "--config " + dir + "/run.ini schedule");
  REQUIRE(file_only.code == 0);
  CHECK(dds::read_schedule_json(dir + "/from_file.json").steps == 5);

  cli_result overridden = run_cli(
      dir, "--config " + dir + "/run.ini schedule -K 9 --out " + dir +
           "/override.json");
  REQUIRE(overridden.code == 0);
  CHECK(dds::read_schedule_json(dir + "/override.json").steps == 9);
}

TEST_CASE("the environment variable sets the default output root") {
  std::string dir = fresh_dir("envroot");
  std::string abs = fs::absolute(dir).string();
  setenv("DDSCHED_OUT", abs.c_str(), 1);
  cli_result r = run_cli(dir, "schedule --strategy uniform -K 3");
  unsetenv("DDSCHED_OUT");
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir + "/schedule.json"));
  CHECK(dds::read_schedule_json(dir + "/schedule.json").steps == 3);
}
