#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dds/score.hpp"

namespace dds {

// ---- network ----------------------------------------------------------------
//
// Two tanh hidden layers over a one-hot sequence encoding concatenated with
// sinusoidal time features. The head is log-space: ratios are exp(output),
// so the all-zero parameter vector scores every transition at exactly 1.

struct mlp_config {
  int seq_len = 1;
  int num_states = 2;
  int hidden = 128;
  int time_features = 8;  // sin/cos pairs at doubling frequencies

  int input_dim() const { return seq_len * num_states + time_features; }
  int output_dim() const { return seq_len * num_states; }
  void validate() const;
};

class mlp_score : public score_model {
 public:
  using score_model::ratios;

  explicit mlp_score(mlp_config cfg);

  const mlp_config& config() const { return cfg_; }
  int num_states() const override { return cfg_.num_states; }
  void ratios(const int* x, int len, double t, double* out) const override;

  // He-style random init; zero biases.
  void init_random(uint64_t seed);

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  size_t num_params() const { return params_.size(); }

  // Log-ratio head and hidden activations (each sized hidden).
  void forward(const int* x, double t, double* out, double* h1,
               double* h2) const;
  // Accumulates the parameter gradient of one example into grad given the
  // head gradient delta_out.
  void backward(const int* x, double t, const double* h1, const double* h2,
                const double* delta_out, double* grad) const;

  void save(const std::string& path) const;
  static mlp_score load(const std::string& path);

 private:
  mlp_config cfg_;
  std::vector<double> params_;

  size_t w1_() const { return 0; }
  size_t b1_() const;
  size_t w2_() const;
  size_t b2_() const;
  size_t w3_() const;
  size_t b3_() const;
  void encode_time(double t, double* f) const;
};

// ---- batch objective ----------------------------------------------------------
//
// Mean divergence over a fixed batch plus the parameter gradient. Work is
// split into a fixed number of chunks accumulated in a fixed order, so the
// result is byte-identical for every thread count; the _serial variant runs
// the identical chunk loop without threads.

double dwdse_loss_grad(const mlp_score& model, const rate_kernel& k,
                       const noise_schedule& ns,
                       const std::vector<corrupt_example>& batch,
                       std::vector<double>& grad);
double dwdse_loss_grad_serial(const mlp_score& model, const rate_kernel& k,
                              const noise_schedule& ns,
                              const std::vector<corrupt_example>& batch,
                              std::vector<double>& grad);

// ---- training -------------------------------------------------------------------

struct train_config {
  int steps = 20000;
  int batch = 64;
  double lr = 1e-3;
  double clip = 10.0;
  double eps_t = 1e-5;
  uint64_t seed = 0;
};

struct train_report {
  double initial_loss = 0.0;
  double final_loss = 0.0;
  int steps = 0;
  std::vector<double> losses;  // per-step batch losses
};

// Draws x0, corrupts it at a uniform time, and applies Adam with global-norm
// clipping. Batches are derived from (seed, step, slot) substreams, so a run
// is reproducible for any thread count.
train_report train(mlp_score& model, const rate_kernel& k,
                   const noise_schedule& ns,
                   const std::function<std::vector<int>(rng&)>& draw_x0,
                   const train_config& cfg);

}  // namespace dds
