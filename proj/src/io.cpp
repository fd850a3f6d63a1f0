#include "dds/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dds/errors.hpp"

namespace dds {

namespace {

using nlohmann::json;

const char* kCurveHeader = "t,h_na,h_na_se,h_na_cum,activity,w_rate,w_cum";
const char* kCurveHeaderTotals =
    "t,h_na,h_na_se,h_na_cum,activity,w_rate,w_cum,h_ad,h_tot";
const char* kReportHeader = "strategy,K,metric,value,stderr,n";

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  size_t start = 0;
  while (start < text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    size_t end = line.find(',', start);
    if (end == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, end - start));
    start = end + 1;
  }
  return fields;
}

double parse_double(const std::string& field, const std::string& path,
                    size_t line) {
  const char* begin = field.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (field.empty() || end != begin + field.size())
    throw config_error(path + ": line " + std::to_string(line) +
                       ": bad number '" + field + "'");
  return v;
}

long parse_long(const std::string& field, const std::string& path,
                size_t line) {
  const char* begin = field.c_str();
  char* end = nullptr;
  long v = std::strtol(begin, &end, 10);
  if (field.empty() || end != begin + field.size())
    throw config_error(path + ": line " + std::to_string(line) +
                       ": bad integer '" + field + "'");
  return v;
}

json parse_json_text(const std::string& text, const std::string& path) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw config_error(path + ": " + e.what());
  }
}

json kernel_block(kernel_type type, int vocab, double sigma_min,
                  double sigma_max) {
  json j;
  j["kernel"] = kernel_name(type);
  j["vocab"] = vocab;
  j["sigma_min"] = sigma_min;
  j["sigma_max"] = sigma_max;
  return j;
}

}  // namespace

// ---- primitives ------------------------------------------------------------------

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot open file: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw config_error("cannot write file: " + path);
  out << text;
  out.flush();
  if (!out) throw config_error("write failed: " + path);
}

// ---- curve files -----------------------------------------------------------------

void curve_file::validate() const {
  entropy.validate();
  transport.validate();
  if (entropy.t != transport.t)
    throw config_error("curve file: entropy and transport grids differ");
}

std::string curve_csv_text(const curve_file& c) {
  c.validate();
  bool totals = c.entropy.has_totals();
  std::string out = totals ? kCurveHeaderTotals : kCurveHeader;
  out += '\n';
  for (size_t i = 0; i < c.entropy.t.size(); ++i) {
    out += format_g17(c.entropy.t[i]);
    out += ',';
    out += format_g17(c.entropy.h_na[i]);
    out += ',';
    out += format_g17(c.entropy.h_na_se[i]);
    out += ',';
    out += format_g17(c.entropy.h_na_cum[i]);
    out += ',';
    out += format_g17(c.entropy.activity[i]);
    out += ',';
    out += format_g17(c.transport.w_rate[i]);
    out += ',';
    out += format_g17(c.transport.w_cum[i]);
    if (totals) {
      out += ',';
      out += format_g17(c.entropy.h_ad[i]);
      out += ',';
      out += format_g17(c.entropy.h_tot[i]);
    }
    out += '\n';
  }
  return out;
}

void write_curve_csv(const std::string& path, const curve_file& c) {
  write_text_file(path, curve_csv_text(c));
}

curve_file read_curve_csv(const std::string& path) {
  std::vector<std::string> lines = split_lines(read_text_file(path));
  if (lines.empty()) throw config_error(path + ": empty curve file");
  bool totals;
  if (lines[0] == kCurveHeader) {
    totals = false;
  } else if (lines[0] == kCurveHeaderTotals) {
    totals = true;
  } else {
    throw config_error(path + ": line 1: unexpected header '" + lines[0] + "'");
  }
  size_t n_cols = totals ? 9 : 7;
  curve_file c;
  for (size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty() && li + 1 == lines.size()) break;
    std::vector<std::string> f = split_fields(lines[li]);
    if (f.size() != n_cols)
      throw config_error(path + ": line " + std::to_string(li + 1) +
                         ": expected " + std::to_string(n_cols) +
                         " fields, got " + std::to_string(f.size()));
    size_t ln = li + 1;
    c.entropy.t.push_back(parse_double(f[0], path, ln));
    c.entropy.h_na.push_back(parse_double(f[1], path, ln));
    c.entropy.h_na_se.push_back(parse_double(f[2], path, ln));
    c.entropy.h_na_cum.push_back(parse_double(f[3], path, ln));
    c.entropy.activity.push_back(parse_double(f[4], path, ln));
    c.transport.w_rate.push_back(parse_double(f[5], path, ln));
    c.transport.w_cum.push_back(parse_double(f[6], path, ln));
    if (totals) {
      c.entropy.h_ad.push_back(parse_double(f[7], path, ln));
      c.entropy.h_tot.push_back(parse_double(f[8], path, ln));
    }
  }
  c.transport.t = c.entropy.t;
  try {
    c.validate();
  } catch (const config_error& e) {
    throw config_error(path + ": " + e.what());
  }
  return c;
}

// ---- schedule files --------------------------------------------------------------

std::string schedule_json_text(const time_schedule& s) {
  s.validate();
  json j;
  j["version"] = 1;
  j["strategy"] = strategy_name(s.strategy);
  j["K"] = s.steps;
  j["times"] = s.times;
  j["kernel"] = kernel_block(s.kernel, s.vocab, s.sigma_min, s.sigma_max);
  j["source_curve_sha256"] = s.source_curve_sha256;
  j["seed"] = s.seed;
  return j.dump(2) + "\n";
}

void write_schedule_json(const std::string& path, const time_schedule& s) {
  write_text_file(path, schedule_json_text(s));
}

time_schedule read_schedule_json(const std::string& path) {
  json j = parse_json_text(read_text_file(path), path);
  time_schedule s;
  try {
    if (j.at("version").get<int>() != 1)
      throw config_error(path + ": unsupported schedule version");
    s.strategy = strategy_from_name(j.at("strategy").get<std::string>());
    s.steps = j.at("K").get<int>();
    s.times = j.at("times").get<std::vector<double>>();
    const json& k = j.at("kernel");
    s.kernel = kernel_from_name(k.at("kernel").get<std::string>());
    s.vocab = k.at("vocab").get<int>();
    s.sigma_min = k.at("sigma_min").get<double>();
    s.sigma_max = k.at("sigma_max").get<double>();
    s.source_curve_sha256 = j.at("source_curve_sha256").get<std::string>();
    s.seed = j.at("seed").get<uint64_t>();
  } catch (const json::exception& e) {
    throw config_error(path + ": " + e.what());
  }
  try {
    s.validate();
  } catch (const config_error& e) {
    throw config_error(path + ": " + e.what());
  }
  return s;
}

// ---- sample files ----------------------------------------------------------------

void write_samples(const std::string& path,
                   const std::vector<std::vector<int>>& seqs,
                   const samples_meta& meta) {
  if (seqs.empty()) throw config_error("samples: nothing to write");
  std::string out;
  for (const auto& s : seqs) {
    for (size_t i = 0; i < s.size(); ++i) {
      if (i > 0) out += ' ';
      out += std::to_string(s[i]);
    }
    out += '\n';
  }
  write_text_file(path, out);

  json j;
  j["version"] = 1;
  j["schedule_sha256"] = meta.schedule_sha256;
  j["strategy"] = meta.strategy;
  j["seed"] = meta.seed;
  j["K"] = meta.steps;
  j["nfe"] = meta.nfe;
  j["count"] = meta.count;
  j["seq_len"] = meta.seq_len;
  j["kernel"] =
      kernel_block(meta.kernel, meta.vocab, meta.sigma_min, meta.sigma_max);
  j["forced_unmasks"] = meta.forced_unmasks;
  write_text_file(path + ".meta.json", j.dump(2) + "\n");
}

std::vector<std::vector<int>> read_samples(const std::string& path) {
  std::vector<std::string> lines = split_lines(read_text_file(path));
  std::vector<std::vector<int>> seqs;
  for (size_t li = 0; li < lines.size(); ++li) {
    if (lines[li].empty() && li + 1 == lines.size()) break;
    std::vector<int> row;
    const std::string& line = lines[li];
    size_t start = 0;
    while (start < line.size()) {
      size_t end = line.find(' ', start);
      std::string tok = end == std::string::npos
                            ? line.substr(start)
                            : line.substr(start, end - start);
      row.push_back(
          static_cast<int>(parse_long(tok, path, li + 1)));
      if (end == std::string::npos) break;
      start = end + 1;
    }
    if (row.empty())
      throw config_error(path + ": line " + std::to_string(li + 1) +
                         ": empty row");
    seqs.push_back(std::move(row));
  }
  if (seqs.empty()) throw config_error(path + ": no samples");
  return seqs;
}

samples_meta read_samples_meta(const std::string& samples_path) {
  std::string path = samples_path + ".meta.json";
  json j = parse_json_text(read_text_file(path), path);
  samples_meta m;
  try {
    if (j.at("version").get<int>() != 1)
      throw config_error(path + ": unsupported metadata version");
    m.schedule_sha256 = j.at("schedule_sha256").get<std::string>();
    m.strategy = j.at("strategy").get<std::string>();
    m.seed = j.at("seed").get<uint64_t>();
    m.steps = j.at("K").get<int>();
    m.nfe = j.at("nfe").get<int>();
    m.count = j.at("count").get<int>();
    m.seq_len = j.at("seq_len").get<int>();
    const json& k = j.at("kernel");
    m.kernel = kernel_from_name(k.at("kernel").get<std::string>());
    m.vocab = k.at("vocab").get<int>();
    m.sigma_min = k.at("sigma_min").get<double>();
    m.sigma_max = k.at("sigma_max").get<double>();
    m.forced_unmasks = j.at("forced_unmasks").get<int>();
  } catch (const json::exception& e) {
    throw config_error(path + ": " + e.what());
  }
  return m;
}

// ---- report files ----------------------------------------------------------------

std::string report_csv_text(const std::vector<metric_row>& rows) {
  std::string out = kReportHeader;
  out += '\n';
  for (const metric_row& r : rows) {
    out += r.strategy;
    out += ',';
    out += std::to_string(r.steps);
    out += ',';
    out += r.metric;
    out += ',';
    out += format_g17(r.value);
    out += ',';
    out += format_g17(r.se);
    out += ',';
    out += std::to_string(r.n);
    out += '\n';
  }
  return out;
}

void write_report_csv(const std::string& path,
                      const std::vector<metric_row>& rows) {
  write_text_file(path, report_csv_text(rows));
}

std::vector<metric_row> read_report_csv(const std::string& path) {
  std::vector<std::string> lines = split_lines(read_text_file(path));
  if (lines.empty() || lines[0] != kReportHeader)
    throw config_error(path + ": line 1: unexpected header");
  std::vector<metric_row> rows;
  for (size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty() && li + 1 == lines.size()) break;
    std::vector<std::string> f = split_fields(lines[li]);
    if (f.size() != 6)
      throw config_error(path + ": line " + std::to_string(li + 1) +
                         ": expected 6 fields, got " + std::to_string(f.size()));
    size_t ln = li + 1;
    metric_row r;
    r.strategy = f[0];
    r.steps = static_cast<int>(parse_long(f[1], path, ln));
    r.metric = f[2];
    r.value = parse_double(f[3], path, ln);
    r.se = parse_double(f[4], path, ln);
    r.n = static_cast<int>(parse_long(f[5], path, ln));
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace dds
