#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cmath>

#include "cpr/errors.hpp"
#include "cpr/sampling.hpp"

using namespace cpr;

namespace {
const cplx I{0.0, 1.0};
}

TEST_CASE("default node cardinalities") {
  const NodeSet n3 = default_nodes(3);
  CHECK(n3.gamma.size() == 5);
  CHECK(n3.gamma_prime.size() == 1);
  const NodeSet n4 = default_nodes(4);
  CHECK(n4.gamma.size() == 7);
  CHECK(n4.gamma_prime.size() == 3);
  CHECK_THROWS_AS(default_nodes(2), SpecError);
  for (double g : n4.gamma) {
    CHECK(g > 0.0);
    CHECK(g < 1.0);
  }
  const NodeSet dil = default_nodes(3, 2.0);
  for (double g : dil.gamma) CHECK(g < 2.0);
}

TEST_CASE("noiseless samples equal the squared signal") {
  const Generator b3 = bspline(3);
  const CoeffSeq c(0, {cplx{1, 0.5}, cplx{-1, 2}, cplx{0.3, -0.7}});
  const NodeSet nodes = default_nodes(3);
  const SampleSet s = take_samples(c, b3, nodes, 0.0, 99);
  REQUIRE(s.intervals.size() == static_cast<std::size_t>(c.k_plus() + 3 - c.k_minus()));
  for (const auto& iv : s.intervals) {
    for (std::size_t i = 0; i < nodes.gamma.size(); ++i) {
      const double expect = std::norm(eval_signal(c, b3, nodes.gamma[i] + iv.j));
      CHECK(std::abs(iv.f[i] - expect) < 1e-14 * std::max(1.0, expect));
    }
    for (std::size_t i = 0; i < nodes.gamma_prime.size(); ++i) {
      const double expect = std::norm(eval_signal_deriv(c, b3, nodes.gamma_prime[i] + iv.j));
      CHECK(std::abs(iv.df[i] - expect) < 1e-14 * std::max(1.0, expect));
    }
  }
}

TEST_CASE("dilated sampling matches the physical signal") {
  // period 2: f(t) = sum c_k g(t/2 - k)
  const Generator g = fig1_generator(false);
  const CoeffSeq c(0, {cplx{1, 1}, cplx{0.5, -1}});
  NodeSet nodes = default_nodes(4, 2.0);
  const SampleSet s = take_samples(c, g, nodes, 0.0, 1);
  for (const auto& iv : s.intervals) {
    for (std::size_t i = 0; i < nodes.gamma.size(); ++i) {
      const double t = nodes.gamma[i] + 2.0 * iv.j;
      const double expect = std::norm(eval_signal(c, g, t / 2.0));
      CHECK(std::abs(iv.f[i] - expect) < 1e-13 * std::max(1.0, expect));
    }
    for (std::size_t i = 0; i < nodes.gamma_prime.size(); ++i) {
      // physical derivative carries the 1/period factor
      const double t = nodes.gamma_prime[i] + 2.0 * iv.j;
      const double expect = std::norm(eval_signal_deriv(c, g, t / 2.0) / 2.0);
      CHECK(std::abs(iv.df[i] - expect) < 1e-13 * std::max(1.0, expect));
    }
  }
}

TEST_CASE("sampling determinism and gauge invariance") {
  const Generator b3 = bspline(3);
  const CoeffSeq c(-1, {cplx{0.2, 1}, cplx{-1, 0.4}, cplx{1, 1}});
  const NodeSet nodes = default_nodes(3);

  const SampleSet a = take_samples(c, b3, nodes, 1e-5, 1234);
  const SampleSet b = take_samples(c, b3, nodes, 1e-5, 1234);
  REQUIRE(a.intervals.size() == b.intervals.size());
  for (std::size_t i = 0; i < a.intervals.size(); ++i) {
    CHECK(a.intervals[i].f == b.intervals[i].f);  // bit identical
    CHECK(a.intervals[i].df == b.intervals[i].df);
  }

  // |f| is invariant under conjugation and multiplication by i, exactly.
  std::vector<cplx> conj_v, rot_v;
  for (const auto& z : c.coeffs) {
    conj_v.push_back(std::conj(z));
    rot_v.push_back(I * z);
  }
  const SampleSet sc = take_samples(CoeffSeq(-1, conj_v), b3, nodes, 1e-5, 1234);
  const SampleSet sr = take_samples(CoeffSeq(-1, rot_v), b3, nodes, 1e-5, 1234);
  for (std::size_t i = 0; i < a.intervals.size(); ++i) {
    CHECK(a.intervals[i].f == sc.intervals[i].f);
    CHECK(a.intervals[i].f == sr.intervals[i].f);
    CHECK(a.intervals[i].df == sc.intervals[i].df);
    CHECK(a.intervals[i].df == sr.intervals[i].df);
  }
}

TEST_CASE("zero signal samples identically zero") {
  const SampleSet s = take_samples(CoeffSeq{}, bspline(3), default_nodes(3), 0.0, 5);
  CHECK(s.intervals.empty());
}

TEST_CASE("noise respects the level and the clamp") {
  const Generator b3 = bspline(3);
  const CoeffSeq c(0, {cplx{1, 0}});
  const NodeSet nodes = default_nodes(3);
  const double eps = 1e-2;
  const SampleSet clean = take_samples(c, b3, nodes, 0.0, 7);
  const SampleSet noisy = take_samples(c, b3, nodes, eps, 7);
  const double bound = noisy.sup_norm * noisy.sup_norm * eps;
  for (std::size_t i = 0; i < clean.intervals.size(); ++i)
    for (std::size_t k = 0; k < clean.intervals[i].f.size(); ++k) {
      CHECK(noisy.intervals[i].f[k] >= 0.0);
      CHECK(std::abs(noisy.intervals[i].f[k] - clean.intervals[i].f[k]) <= bound + 1e-15);
    }
}

TEST_CASE("sample set serialization round trips") {
  const Generator b3 = bspline(3);
  const CoeffSeq c(2, {cplx{1, -1}, cplx{0, 2}});
  const NodeSet nodes = default_nodes(3);
  const SampleSet s = take_samples(c, b3, nodes, 1e-4, 42);

  const SampleSet js = SampleSet::from_json(s.to_json());
  REQUIRE(js.intervals.size() == s.intervals.size());
  for (std::size_t i = 0; i < s.intervals.size(); ++i) {
    CHECK(js.intervals[i].j == s.intervals[i].j);
    CHECK(js.intervals[i].f == s.intervals[i].f);
    CHECK(js.intervals[i].df == s.intervals[i].df);
  }

  const SampleSet cs = SampleSet::from_csv(s.to_csv(), s.nodes, s.noise, s.seed);
  REQUIRE(cs.intervals.size() == s.intervals.size());
  for (std::size_t i = 0; i < s.intervals.size(); ++i) {
    CHECK(cs.intervals[i].f == s.intervals[i].f);
    CHECK(cs.intervals[i].df == s.intervals[i].df);
  }
}
