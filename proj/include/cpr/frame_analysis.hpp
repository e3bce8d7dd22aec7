#pragma once

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "cpr/generator.hpp"

namespace cpr {

// Real measurement frame: Vandermonde rows for function samples and
// derivative rows for Hermite samples.
struct FrameVector {
  Eigen::VectorXd v;
  double node = 0.0;
  bool derivative = false;
};

struct RealFrame {
  int dim = 0;  // N
  std::vector<FrameVector> vectors;
};

// psi_n = (1, g, ..., g^{N-1}) for g in gamma (2N-1 nodes) and
// psi~_n = (0, 1, 2g', ..., (N-1) g'^{N-2}) for g' in gamma_prime (2N-5).
RealFrame vandermonde_frame(int N, const std::vector<double>& gamma,
                            const std::vector<double>& gamma_prime);

// Exact dimension of span{Phi(x)Phi(x)^T, x in (0,1)} (optionally together
// with the derivative span), computed in rational arithmetic.
int spanning_dimension(const Generator& g, bool use_derivative);

// True iff span{a a^T : a in frame} is all of the symmetric matrices; then
// the window Gram is determined and recovery up to conjugation follows.
bool cpr_sufficient(const RealFrame& frame);

struct CertifyReport {
  int trials = 0;
  int failures = 0;
  double max_dist = 0.0;
  double mean_dist = 0.0;
};

// Monte-Carlo certification through the constructive recovery: random
// vectors, phaseless Hermite measurements, recover_block, equivalence
// distance. Probabilistic evidence, not a proof.
CertifyReport certify_by_recovery(const RealFrame& frame, int trials, std::uint64_t seed);

enum class FalsifyStatus { certificate, inconclusive, rank_deficient };

struct FalsifyReport {
  FalsifyStatus status = FalsifyStatus::inconclusive;
  int restarts_used = 0;
  double residual = 0.0;       // max |a^T S a| over the frame at the certificate
  double separation = 0.0;     // dist_up_to_equiv(x, y)
  Eigen::VectorXcd x, y;       // certificate pair when found
  std::string note;

  nlohmann::json to_json() const;
};

// Best-effort search for a symmetric S = Re(xx* - yy*) annihilated by every
// frame outer product: null-space restriction plus eigenvalue-signature
// descent. "inconclusive" is a valid outcome.
FalsifyReport falsify_cpr(const RealFrame& frame, int restarts, std::uint64_t seed);

}  // namespace cpr
