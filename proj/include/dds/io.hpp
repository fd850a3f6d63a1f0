#pragma once

#include <string>
#include <vector>

#include "dds/bench.hpp"
#include "dds/ctmc.hpp"
#include "dds/scheduler.hpp"
#include "dds/thermo.hpp"

namespace dds {

// ---- primitives ------------------------------------------------------------------

// Shortest exact decimal form of a double (%.17g), used for every float
// column so files round-trip bit for bit.
std::string format_g17(double v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// ---- curve files -----------------------------------------------------------------
//
// Entropy and transport curves share the grid and travel together in one
// CSV. The two exact-only columns appear only when the entropy curve
// carries finite totals.

struct curve_file {
  entropy_curve entropy;
  wasserstein_curve transport;

  void validate() const;
};

std::string curve_csv_text(const curve_file& c);
void write_curve_csv(const std::string& path, const curve_file& c);
// Parse failures name the offending line.
curve_file read_curve_csv(const std::string& path);

// ---- schedule files --------------------------------------------------------------

std::string schedule_json_text(const time_schedule& s);
void write_schedule_json(const std::string& path, const time_schedule& s);
time_schedule read_schedule_json(const std::string& path);

// ---- sample files ----------------------------------------------------------------
//
// Samples are newline-delimited space-separated token rows; a sidecar
// <path>.meta.json records how they were produced.

struct samples_meta {
  std::string schedule_sha256;
  std::string strategy;
  uint64_t seed = 0;
  int steps = 0;
  int nfe = 0;
  int count = 0;
  int seq_len = 0;
  kernel_type kernel = kernel_type::uniform;
  int vocab = 0;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  int forced_unmasks = 0;
};

void write_samples(const std::string& path,
                   const std::vector<std::vector<int>>& seqs,
                   const samples_meta& meta);
std::vector<std::vector<int>> read_samples(const std::string& path);
samples_meta read_samples_meta(const std::string& samples_path);

// ---- report files ----------------------------------------------------------------

std::string report_csv_text(const std::vector<metric_row>& rows);
void write_report_csv(const std::string& path,
                      const std::vector<metric_row>& rows);
std::vector<metric_row> read_report_csv(const std::string& path);

}  // namespace dds
