#pragma once

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "cpr/gram_recovery.hpp"
#include "cpr/local_recovery.hpp"
#include "cpr/sampling.hpp"
#include "cpr/signal.hpp"
#include "cpr/stitching.hpp"
#include "cpr/tolerances.hpp"

namespace cpr {

enum class Pathway { hermite, gram };

struct RecoveryConfig {
  Pathway pathway = Pathway::hermite;
  Generator generator;
  NodeSet nodes;       // defaulted from the generator when empty
  double period = 1.0;
  double noise = 0.0;  // epsilon-bar used when sampling
  std::uint64_t seed = 0;
  Tolerances tolerances;

  explicit RecoveryConfig(Generator g) : generator(std::move(g)) {}
};

// Fills in default nodes (Hermite: Chebyshev 2N-1/2N-5; gram: the basis
// system nodes) and widens noise-sensitive thresholds for noisy runs.
RecoveryConfig make_config(Generator g, Pathway pathway = Pathway::hermite, double period = 1.0,
                           double noise = 0.0, std::uint64_t seed = 0);

struct IntervalDiag {
  int j = 0;
  double residual = 0.0;
  bool real_flag = false;
};

struct RecoveryResult {
  CoeffSeq coeffs;
  AlignmentState alignment;
  std::vector<IntervalDiag> interval_diagnostics;
  double cond_f = 0.0;
  double cond_df = 0.0;
  bool cond_warning = false;
};

SampleSet sample_signal(const CoeffSeq& c, const RecoveryConfig& cfg);
RecoveryResult recover_signal(const SampleSet& samples, const RecoveryConfig& cfg);

struct ErrorReport {
  double l2_rel = 0.0;
  double max_rel_re = 0.0;
  double max_rel_im = 0.0;
  double max_abs_re = 0.0;
  double max_abs_im = 0.0;
  double dist = 0.0;

  nlohmann::json to_json() const;
};

ErrorReport verify_recovery(const CoeffSeq& truth, const CoeffSeq& recovered);

// One seeded draw of random coefficients with Re, Im uniform in the given
// bounds, avoiding non-retrievable draws when requested.
CoeffSeq random_coeffs(int offset, int count, double lo, double hi, std::uint64_t seed);

struct TrialResult {
  std::uint64_t seed = 0;
  bool ok = false;  // recovery ran to completion
  ErrorReport report;
  std::string error;
};

// sample -> recover -> verify, catching recovery errors.
TrialResult run_trial(const CoeffSeq& truth, const RecoveryConfig& cfg);

// The reconstruction-experiment configuration: five coefficients on offsets
// -3..1, period-2 dilated quadratic generator run at cubic order, noise 1e-5.
RecoveryConfig figure1_config(std::uint64_t seed, double noise = 1e-5,
                              bool printed_psi = false);

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace cpr
