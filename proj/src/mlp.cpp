#include "dds/mlp.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <json.hpp>

#include "dds/errors.hpp"

namespace dds {

namespace {
constexpr int kGradChunks = 16;
}

// ---- network ----------------------------------------------------------------

void mlp_config::validate() const {
  if (seq_len < 1) throw config_error("mlp: seq_len must be positive");
  if (num_states < 2) throw config_error("mlp: need at least two states");
  if (hidden < 1) throw config_error("mlp: hidden width must be positive");
  if (time_features < 2 || time_features % 2 != 0)
    throw config_error("mlp: time_features must be a positive even count");
}

mlp_score::mlp_score(mlp_config cfg) : cfg_(cfg) {
  cfg_.validate();
  size_t d = cfg_.input_dim(), h = cfg_.hidden, o = cfg_.output_dim();
  params_.assign(h * d + h + h * h + h + o * h + o, 0.0);
}

size_t mlp_score::b1_() const {
  return static_cast<size_t>(cfg_.hidden) * cfg_.input_dim();
}
size_t mlp_score::w2_() const { return b1_() + cfg_.hidden; }
size_t mlp_score::b2_() const {
  return w2_() + static_cast<size_t>(cfg_.hidden) * cfg_.hidden;
}
size_t mlp_score::w3_() const { return b2_() + cfg_.hidden; }
size_t mlp_score::b3_() const {
  return w3_() + static_cast<size_t>(cfg_.output_dim()) * cfg_.hidden;
}

void mlp_score::encode_time(double t, double* f) const {
  double freq = 1.0;
  for (int m = 0; m < cfg_.time_features / 2; ++m) {
    f[2 * m] = std::sin(2.0 * M_PI * freq * t);
    f[2 * m + 1] = std::cos(2.0 * M_PI * freq * t);
    freq *= 2.0;
  }
}

void mlp_score::init_random(uint64_t seed) {
  rng g(seed);
  auto normal = [&g]() {
    double u1 = 1.0 - g.u01(), u2 = g.u01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  };
  size_t d = cfg_.input_dim(), h = cfg_.hidden, o = cfg_.output_dim();
  double s1 = 1.0 / std::sqrt(static_cast<double>(d));
  double s2 = 1.0 / std::sqrt(static_cast<double>(h));
  for (size_t i = 0; i < h * d; ++i) params_[w1_() + i] = s1 * normal();
  for (size_t i = 0; i < h * h; ++i) params_[w2_() + i] = s2 * normal();
  for (size_t i = 0; i < o * h; ++i) params_[w3_() + i] = s2 * normal();
  for (size_t i = 0; i < h; ++i) params_[b1_() + i] = 0.0;
  for (size_t i = 0; i < h; ++i) params_[b2_() + i] = 0.0;
  for (size_t i = 0; i < o; ++i) params_[b3_() + i] = 0.0;
}

void mlp_score::forward(const int* x, double t, double* out, double* h1,
                        double* h2) const {
  int d = cfg_.input_dim(), h = cfg_.hidden, o = cfg_.output_dim();
  int v = cfg_.num_states, len = cfg_.seq_len;
  double tf[64];
  encode_time(t, tf);
  const double* w1 = params_.data() + w1_();
  const double* b1 = params_.data() + b1_();
  const double* w2 = params_.data() + w2_();
  const double* b2 = params_.data() + b2_();
  const double* w3 = params_.data() + w3_();
  const double* b3 = params_.data() + b3_();

  for (int j = 0; j < h; ++j) {
    const double* row = w1 + static_cast<size_t>(j) * d;
    double acc = b1[j];
    for (int i = 0; i < len; ++i) acc += row[i * v + x[i]];
    for (int f = 0; f < cfg_.time_features; ++f)
      acc += row[len * v + f] * tf[f];
    h1[j] = std::tanh(acc);
  }
  for (int j = 0; j < h; ++j) {
    const double* row = w2 + static_cast<size_t>(j) * h;
    double acc = b2[j];
    for (int i = 0; i < h; ++i) acc += row[i] * h1[i];
    h2[j] = std::tanh(acc);
  }
  for (int j = 0; j < o; ++j) {
    const double* row = w3 + static_cast<size_t>(j) * h;
    double acc = b3[j];
    for (int i = 0; i < h; ++i) acc += row[i] * h2[i];
    out[j] = acc;
  }
}

void mlp_score::ratios(const int* x, int len, double t, double* out) const {
  if (len != cfg_.seq_len)
    throw config_error("mlp: sequence length does not match configuration");
  int v = cfg_.num_states;
  for (int i = 0; i < len; ++i)
    if (x[i] < 0 || x[i] >= v) throw config_error("mlp: token out of range");
  std::vector<double> h1(cfg_.hidden), h2(cfg_.hidden);
  forward(x, t, out, h1.data(), h2.data());
  for (int i = 0; i < len * v; ++i) out[i] = std::exp(out[i]);
  for (int i = 0; i < len; ++i) out[i * v + x[i]] = 1.0;
}

void mlp_score::backward(const int* x, double t, const double* h1,
                         const double* h2, const double* delta_out,
                         double* grad) const {
  int d = cfg_.input_dim(), h = cfg_.hidden, o = cfg_.output_dim();
  int v = cfg_.num_states, len = cfg_.seq_len;
  double tf[64];
  encode_time(t, tf);
  const double* w2 = params_.data() + w2_();
  const double* w3 = params_.data() + w3_();
  double* g_w1 = grad + w1_();
  double* g_b1 = grad + b1_();
  double* g_w2 = grad + w2_();
  double* g_b2 = grad + b2_();
  double* g_w3 = grad + w3_();
  double* g_b3 = grad + b3_();

  std::vector<double> dh2(h, 0.0), dh1(h, 0.0);
  for (int j = 0; j < o; ++j) {
    double dj = delta_out[j];
    if (dj == 0.0) continue;
    g_b3[j] += dj;
    double* gw = g_w3 + static_cast<size_t>(j) * h;
    const double* wr = w3 + static_cast<size_t>(j) * h;
    for (int i = 0; i < h; ++i) {
      gw[i] += dj * h2[i];
      dh2[i] += wr[i] * dj;
    }
  }
  for (int j = 0; j < h; ++j) {
    double dj = dh2[j] * (1.0 - h2[j] * h2[j]);
    if (dj == 0.0) continue;
    g_b2[j] += dj;
    double* gw = g_w2 + static_cast<size_t>(j) * h;
    const double* wr = w2 + static_cast<size_t>(j) * h;
    for (int i = 0; i < h; ++i) {
      gw[i] += dj * h1[i];
      dh1[i] += wr[i] * dj;
    }
  }
  for (int j = 0; j < h; ++j) {
    double dj = dh1[j] * (1.0 - h1[j] * h1[j]);
    if (dj == 0.0) continue;
    g_b1[j] += dj;
    double* gw = g_w1 + static_cast<size_t>(j) * d;
    for (int i = 0; i < len; ++i) gw[i * v + x[i]] += dj;
    for (int f = 0; f < cfg_.time_features; ++f)
      gw[len * v + f] += dj * tf[f];
  }
}

void mlp_score::save(const std::string& path) const {
  nlohmann::json j;
  j["seq_len"] = cfg_.seq_len;
  j["num_states"] = cfg_.num_states;
  j["hidden"] = cfg_.hidden;
  j["time_features"] = cfg_.time_features;
  j["params"] = params_;
  std::ofstream out(path);
  if (!out) throw config_error("cannot write model file '" + path + "'");
  out << j.dump(2) << "\n";
}

mlp_score mlp_score::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot read model file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw config_error("model file '" + path + "': " + e.what());
  }
  try {
    mlp_config cfg;
    cfg.seq_len = j.at("seq_len").get<int>();
    cfg.num_states = j.at("num_states").get<int>();
    cfg.hidden = j.at("hidden").get<int>();
    cfg.time_features = j.at("time_features").get<int>();
    mlp_score model(cfg);
    auto p = j.at("params").get<std::vector<double>>();
    if (p.size() != model.num_params())
      throw config_error("model file '" + path + "': parameter count mismatch");
    model.params() = std::move(p);
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw config_error("model file '" + path + "': " + e.what());
  }
}

// ---- batch objective ----------------------------------------------------------

namespace {

struct chunk_accum {
  double loss = 0.0;
  std::vector<double> grad;
};

void run_chunk(const mlp_score& model, const rate_kernel& k,
               const noise_schedule& ns,
               const std::vector<corrupt_example>& batch, size_t lo, size_t hi,
               chunk_accum& acc) {
  const mlp_config& cfg = model.config();
  int v = cfg.num_states, len = cfg.seq_len, o = cfg.output_dim();
  std::vector<double> out(o), h1(cfg.hidden), h2(cfg.hidden);
  std::vector<double> s(o), grad_s(o), delta(o);
  for (size_t e = lo; e < hi; ++e) {
    const corrupt_example& ex = batch[e];
    model.forward(ex.x_t.data(), ex.t, out.data(), h1.data(), h2.data());
    for (int i = 0; i < o; ++i) s[i] = std::exp(out[i]);
    for (int i = 0; i < len; ++i) s[i * v + ex.x_t[i]] = 1.0;
    acc.loss +=
        dwdse_pointwise(k, ns, ex, s.data(), len, grad_s.data());
    for (int i = 0; i < o; ++i) delta[i] = grad_s[i] * s[i];
    for (int i = 0; i < len; ++i) delta[i * v + ex.x_t[i]] = 0.0;
    model.backward(ex.x_t.data(), ex.t, h1.data(), h2.data(), delta.data(),
                   acc.grad.data());
  }
}

double reduce_chunks(std::vector<chunk_accum>& chunks, size_t n_batch,
                     std::vector<double>& grad) {
  double loss = 0.0;
  for (const chunk_accum& c : chunks) {
    loss += c.loss;
    for (size_t i = 0; i < grad.size(); ++i) grad[i] += c.grad[i];
  }
  double inv = 1.0 / static_cast<double>(n_batch);
  for (double& g : grad) g *= inv;
  return loss * inv;
}

}  // namespace

double dwdse_loss_grad(const mlp_score& model, const rate_kernel& k,
                       const noise_schedule& ns,
                       const std::vector<corrupt_example>& batch,
                       std::vector<double>& grad) {
  grad.assign(model.num_params(), 0.0);
  if (batch.empty()) throw config_error("divergence: empty batch");
  std::vector<chunk_accum> chunks(kGradChunks);
  size_t n = batch.size();
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int c = 0; c < kGradChunks; ++c) {
    chunks[c].grad.assign(model.num_params(), 0.0);
    size_t lo = n * c / kGradChunks, hi = n * (c + 1) / kGradChunks;
    run_chunk(model, k, ns, batch, lo, hi, chunks[c]);
  }
  return reduce_chunks(chunks, n, grad);
}

double dwdse_loss_grad_serial(const mlp_score& model, const rate_kernel& k,
                              const noise_schedule& ns,
                              const std::vector<corrupt_example>& batch,
                              std::vector<double>& grad) {
  grad.assign(model.num_params(), 0.0);
  if (batch.empty()) throw config_error("divergence: empty batch");
  std::vector<chunk_accum> chunks(kGradChunks);
  size_t n = batch.size();
  for (int c = 0; c < kGradChunks; ++c) {
    chunks[c].grad.assign(model.num_params(), 0.0);
    size_t lo = n * c / kGradChunks, hi = n * (c + 1) / kGradChunks;
    run_chunk(model, k, ns, batch, lo, hi, chunks[c]);
  }
  return reduce_chunks(chunks, n, grad);
}

// ---- training -------------------------------------------------------------------

train_report train(mlp_score& model, const rate_kernel& k,
                   const noise_schedule& ns,
                   const std::function<std::vector<int>(rng&)>& draw_x0,
                   const train_config& cfg) {
  if (cfg.steps < 0) throw config_error("train: negative step count");
  if (cfg.batch < 1) throw config_error("train: batch must be positive");
  train_report report;
  report.steps = cfg.steps;
  if (cfg.steps == 0) return report;
  report.losses.reserve(cfg.steps);

  size_t np = model.num_params();
  std::vector<double> grad(np), m(np, 0.0), v(np, 0.0);
  std::vector<corrupt_example> batch(cfg.batch);
  const double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;

  for (int step = 0; step < cfg.steps; ++step) {
    for (int b = 0; b < cfg.batch; ++b) {
      rng g(cfg.seed, static_cast<uint64_t>(step) * cfg.batch + b);
      std::vector<int> x0 = draw_x0(g);
      double t = cfg.eps_t + (1.0 - cfg.eps_t) * g.u01();
      batch[b] = corrupt(k, ns, x0, t, g);
    }
    double loss = dwdse_loss_grad(model, k, ns, batch, grad);
    if (!std::isfinite(loss))
      throw numerical_error("train: non-finite loss at step " +
                            std::to_string(step));
    if (step == 0) report.initial_loss = loss;
    report.final_loss = loss;
    report.losses.push_back(loss);

    double norm2 = 0.0;
    for (double g2 : grad) norm2 += g2 * g2;
    double norm = std::sqrt(norm2);
    double scale = norm > cfg.clip ? cfg.clip / norm : 1.0;

    double bc1 = 1.0 - std::pow(beta1, step + 1);
    double bc2 = 1.0 - std::pow(beta2, step + 1);
    std::vector<double>& p = model.params();
    for (size_t i = 0; i < np; ++i) {
      double gi = grad[i] * scale;
      m[i] = beta1 * m[i] + (1.0 - beta1) * gi;
      v[i] = beta2 * v[i] + (1.0 - beta2) * gi * gi;
      p[i] -= cfg.lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + adam_eps);
    }
  }
  return report;
}

}  // namespace dds
