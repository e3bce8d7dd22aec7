#pragma once

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "cpr/signal.hpp"

namespace cpr {

// Sampling nodes inside one period cell (0, period). gamma carries the
// 2N-1 function nodes, gamma_prime the 2N-5 derivative nodes (empty below
// order 3). Shift j samples at gamma + j*period.
struct NodeSet {
  std::vector<double> gamma;
  std::vector<double> gamma_prime;
  double period = 1.0;

  nlohmann::json to_json() const;
  static NodeSet from_json(const nlohmann::json& j);
};

// Chebyshev-distributed nodes mapped affinely into (0.01, 0.99)*period.
NodeSet default_nodes(int order, double period = 1.0);

// Gram-pathway node set: the basis-selection nodes go into gamma.
NodeSet nodes_from_list(std::vector<double> gamma, double period = 1.0);

struct IntervalSamples {
  int j = 0;
  std::vector<double> f;   // |f(gamma + j*period)|^2 (+ clamped noise)
  std::vector<double> df;  // |f'(gamma' + j*period)|^2 (+ clamped noise)
};

struct SampleSet {
  NodeSet nodes;
  double noise = 0.0;  // noise level epsilon-bar
  std::uint64_t seed = 0;
  double sup_norm = 0.0;  // dense-grid estimate of ||f||_inf
  std::vector<IntervalSamples> intervals;

  nlohmann::json to_json() const;
  static SampleSet from_json(const nlohmann::json& j);
  std::string to_csv() const;  // columns: j,node,kind,value
  static SampleSet from_csv(const std::string& text, const NodeSet& nodes, double noise,
                            std::uint64_t seed);
};

// Noisy phaseless Hermite samples of f(t) = sum_k c_k g(t/period - k) on
// every interval meeting the support: values |f|^2 + ||f||_inf^2 eps with
// eps uniform in [-noise, noise], clamped at zero. Per-interval noise
// streams are derived deterministically from (seed, j).
SampleSet take_samples(const CoeffSeq& c, const Generator& g, const NodeSet& nodes,
                       double noise, std::uint64_t seed);

}  // namespace cpr
