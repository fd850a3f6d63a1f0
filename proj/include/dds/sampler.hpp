#pragma once

#include <cstdint>
#include <vector>

#include "dds/ctmc.hpp"
#include "dds/noise.hpp"
#include "dds/rng.hpp"
#include "dds/scheduler.hpp"
#include "dds/score.hpp"

namespace dds {

// ---- reverse-process simulation ------------------------------------------------
//
// Euler tau-leaping along a time schedule, per token. Within a step the
// reverse rates are frozen at the step's start time; the step width is the
// closed-form noise increment over the step divided by sigma at the start,
// so the leap matches the noise actually accrued rather than the raw time
// difference.

// Draws the reference state the reverse process starts from: i.i.d. uniform
// tokens for bidirectional kernels, all-mask for absorbing ones.
std::vector<int> init_from_prior(const rate_kernel& k, int seq_len, rng& g);

// One leap from t_from down to t_to, mutating x in place. Scores are
// evaluated once at t_from for the whole sequence; each token then jumps at
// most once, with probability 1 - exp(-R_total * dt_eff) and destination
// drawn proportionally to the per-state reverse rates.
void tau_leap_step(std::vector<int>& x, const score_model& model,
                   const rate_kernel& k, const noise_schedule& ns,
                   double t_from, double t_to, rng& g);

struct sample_batch {
  std::vector<std::vector<int>> sequences;
  int nfe = 0;                      // score evaluations per sequence
  std::vector<int> forced_unmasks;  // per sequence; nonzero only for absorbing
};

// Walks the schedule from its last time down to its first, one tau-leap per
// step. Sequences use independent (seed, index) substreams and may run in
// parallel; the serial twin produces byte-identical output. For absorbing
// kernels, tokens still masked after the final leap are forced to the
// argmax-rate state under that step's frozen scores, so outputs never
// contain masks.
sample_batch sample(const time_schedule& sched, const score_model& model,
                    const rate_kernel& k, const noise_schedule& ns, int batch,
                    int seq_len, uint64_t seed);
sample_batch sample_serial(const time_schedule& sched, const score_model& model,
                           const rate_kernel& k, const noise_schedule& ns,
                           int batch, int seq_len, uint64_t seed);

}  // namespace dds
