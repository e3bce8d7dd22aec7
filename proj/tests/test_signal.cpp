#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cmath>
#include <random>

#include "cpr/errors.hpp"
#include "cpr/signal.hpp"

using namespace cpr;

namespace {

CoeffSeq seq(int offset, std::initializer_list<cplx> values) {
  return CoeffSeq(offset, std::vector<cplx>(values));
}

const cplx I{0.0, 1.0};

}  // namespace

TEST_CASE("coefficient sequence normalization") {
  const CoeffSeq c(0, {cplx{0, 0}, cplx{1, 0}, cplx{0, 1}, cplx{0, 0}});
  CHECK(c.k_minus() == 1);
  CHECK(c.k_plus() == 2);
  CHECK(c.at(0) == cplx{0, 0});
  CHECK(c.at(1) == cplx{1, 0});
  CHECK(CoeffSeq(5, {}).empty());
}

TEST_CASE("eval_signal on spline windows") {
  const Generator b3 = bspline(3);
  CHECK(std::abs(eval_signal(seq(0, {1.0}), b3, 1.5) - 0.75) < 1e-14);
  CHECK(eval_signal(CoeffSeq{}, b3, 0.3) == cplx{0, 0});
  // c0 = 1, c1 = i at x = 1: B3(1) = 1/2, B3(0) = 0
  const cplx v = eval_signal(seq(0, {1.0, I}), b3, 1.0);
  CHECK(std::abs(v - cplx{0.5, 0.0}) < 1e-14);
  // derivative agrees with finite differences
  const CoeffSeq c = seq(0, {cplx{1, 0.5}, cplx{-2, 1}, cplx{0.25, -1}});
  for (double x : {0.3, 1.7, 2.4, 3.6}) {
    const double h = 1e-6;
    const cplx fd = (eval_signal(c, b3, x + h) - eval_signal(c, b3, x - h)) / (2.0 * h);
    CHECK(std::abs(eval_signal_deriv(c, b3, x) - fd) < 1e-7);
  }
}

TEST_CASE("decompose examples") {
  SUBCASE("(1, i)") {
    const Decomposition d = decompose(seq(0, {1.0, I}));
    CHECK(d.k_minus == 0);
    CHECK(d.k_plus == 1);
    CHECK(std::abs(d.xi1 - cplx{1, 0}) < 1e-15);
    CHECK(d.kappa_minus == 0);
    CHECK(std::abs(d.xi2 - I) < 1e-15);
    REQUIRE(d.kappa_plus.has_value());
    CHECK(*d.kappa_plus == 1);
    CHECK_FALSE(d.kf_nonempty);
  }
  SUBCASE("real sequence") {
    const Decomposition d = decompose(seq(-2, {1.0, -0.5, 2.0}));
    CHECK(d.kappa_minus == d.k_plus);
    CHECK_FALSE(d.kf_nonempty);
  }
  SUBCASE("(1, 1+i, i, 2)") {
    const Decomposition d = decompose(seq(0, {1.0, cplx{1, 1}, I, 2.0}));
    CHECK(d.kappa_minus == 0);
    REQUIRE(d.kappa_plus.has_value());
    CHECK(*d.kappa_plus == 3);
    CHECK(d.kf_nonempty);
    CHECK(d.kf_lo == 1);
    CHECK(d.kf_hi == 2);
  }
  SUBCASE("zero rejected") {
    CHECK_THROWS_AS(decompose(CoeffSeq{}), RecoveryError);
  }
}

TEST_CASE("decompose tail properties") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<cplx> v(6);
    for (auto& z : v) z = {uni(rng), uni(rng)};
    // force a real head of random length
    const int head = static_cast<int>(rng() % 3);
    for (int i = 0; i <= head; ++i) v[i] = {uni(rng), 0.0};
    if (std::abs(v[0]) < 0.1) v[0] = 1.0;
    const CoeffSeq c(0, v);
    const Decomposition d = decompose(c);
    for (int k = c.k_minus(); k <= d.kappa_minus; ++k)
      CHECK(std::abs(std::imag(std::conj(d.xi1) * c.at(k))) < 1e-9);
    if (d.kappa_minus < d.k_plus)
      CHECK(std::abs(std::imag(std::conj(d.xi1) * c.at(d.kappa_minus + 1))) > 1e-10);
    REQUIRE(d.kappa_plus.has_value());
    for (int k = *d.kappa_plus; k <= c.k_plus(); ++k)
      CHECK(std::abs(std::imag(std::conj(d.xi2) * c.at(k))) < 1e-9);
  }
}

TEST_CASE("is_cpr on the support-length-3 examples") {
  SUBCASE("separated bumps fail the zero-window condition") {
    const CprWitness w = is_cpr(seq(0, {1.0, 0.0, 0.0, 1.0}), 3);
    CHECK_FALSE(w.retrievable);
    CHECK(w.condition == "zero-window");
    CHECK(w.index == 1);
  }
  SUBCASE("(1, i) passes") {
    const CprWitness w = is_cpr(seq(0, {1.0, I}), 3);
    CHECK(w.retrievable);
    CHECK(w.short_sequence);  // K+ - K- = 1 < L-1
  }
  SUBCASE("(1, i, 1, 1) passes with the aligned-window checks at k=1,2") {
    const CoeffSeq c = seq(0, {1.0, I, 1.0, 1.0});
    CHECK(std::abs(std::imag(c.at(0) * std::conj(c.at(1)))) == doctest::Approx(1.0));
    CHECK(std::abs(std::imag(c.at(1) * std::conj(c.at(2)))) == doctest::Approx(1.0));
    const CprWitness w = is_cpr(c, 3);
    CHECK(w.retrievable);
  }
  SUBCASE("aligned window inside the complex middle fails") {
    // consecutive colinear pair (i, 2i) inside a complex zone
    const CprWitness w = is_cpr(seq(0, {1.0, I, 2.0 * I, 1.0}), 3);
    CHECK_FALSE(w.retrievable);
    CHECK(w.condition == "aligned-window");
    CHECK(w.index == 2);
  }
}

TEST_CASE("is_cpr degenerate support lengths") {
  CHECK(is_cpr(seq(4, {2.0 * I}), 1).retrievable);
  CHECK_FALSE(is_cpr(seq(0, {1.0, 1.0}), 1).retrievable);
  CHECK(is_cpr(seq(0, {1.0, I, 2.0 * I}), 2).retrievable);       // one break
  CHECK_FALSE(is_cpr(seq(0, {1.0, I, 1.0}), 2).retrievable);     // two breaks
  CHECK_FALSE(is_cpr(seq(0, {1.0, 0.0, 1.0}), 2).retrievable);   // interior zero
  CHECK_THROWS_AS(is_cpr(seq(0, {1.0}), 0), SpecError);
}

TEST_CASE("dist_up_to_equiv basics") {
  const CoeffSeq c = seq(0, {cplx{1, 0.3}, cplx{-0.5, 1}, cplx{2, -1}});
  SUBCASE("phase multiples and conjugates are at distance zero") {
    std::vector<cplx> v;
    for (const auto& z : c.coeffs) v.push_back(I * z);
    CHECK(dist_up_to_equiv(c, CoeffSeq(0, v)).dist < 1e-14);
    std::vector<cplx> w;
    for (const auto& z : c.coeffs) w.push_back(std::conj(z));
    CHECK(dist_up_to_equiv(c, CoeffSeq(0, w)).dist < 1e-14);
  }
  SUBCASE("orthogonal unit sequences") {
    const EquivResult r = dist_up_to_equiv(seq(0, {1.0, 0.0}), seq(1, {1.0}));
    CHECK(r.dist == doctest::Approx(std::sqrt(2.0)));
  }
  SUBCASE("pseudometric properties on random triples") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    auto rand_seq = [&](int n) {
      std::vector<cplx> v(n);
      for (auto& z : v) z = {uni(rng), uni(rng)};
      return CoeffSeq(0, v);
    };
    for (int t = 0; t < 40; ++t) {
      const CoeffSeq a = rand_seq(4), b = rand_seq(4), d = rand_seq(4);
      const double ab = dist_up_to_equiv(a, b).dist;
      const double ba = dist_up_to_equiv(b, a).dist;
      CHECK(ab == doctest::Approx(ba).epsilon(1e-10));
      const double ad = dist_up_to_equiv(a, d).dist;
      const double db = dist_up_to_equiv(d, b).dist;
      CHECK(ab <= ad + db + 1e-12);
    }
  }
}

TEST_CASE("ambiguity partner matches magnitudes but not the signal") {
  const Generator b3 = bspline(3);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);

  auto check_pair = [&](const CoeffSeq& c, const CprWitness& w) {
    const CoeffSeq g = ambiguity_partner(c, 3, w);
    // grid magnitude equality
    const int lo = c.k_minus(), hi = c.k_plus() + 3;
    for (int i = 0; i < 1000; ++i) {
      const double x = lo + (hi - lo) * (i + 0.5) / 1000.0;
      const double mf = std::abs(eval_signal(c, b3, x));
      const double mg = std::abs(eval_signal(g, b3, x));
      CHECK(std::abs(mf - mg) < 1e-12 * std::max(1.0, mf));
    }
    CHECK(dist_up_to_equiv(c, g).dist > 1e-3 * c.norm());
  };

  SUBCASE("zero-window failures") {
    for (int t = 0; t < 20; ++t) {
      std::vector<cplx> v = {{uni(rng), uni(rng)}, {uni(rng), uni(rng)}, 0.0, 0.0,
                             {uni(rng), uni(rng)}};
      if (std::abs(v[0]) < 0.1) v[0] = 1.0;
      if (std::abs(v[4]) < 0.1) v[4] = {0.0, 1.0};
      const CoeffSeq c(0, v);
      const CprWitness w = is_cpr(c, 3);
      REQUIRE_FALSE(w.retrievable);
      REQUIRE(w.condition == "zero-window");
      check_pair(c, w);
    }
  }
  SUBCASE("aligned-window failures") {
    const CoeffSeq c = seq(0, {1.0, I, 2.0 * I, 1.0});
    const CprWitness w = is_cpr(c, 3);
    REQUIRE(w.condition == "aligned-window");
    check_pair(c, w);
  }
}

TEST_CASE("coefficient JSON round trip") {
  const CoeffSeq c = seq(-3, {cplx{1, 2}, cplx{0, -1}, cplx{0.25, 0}});
  const CoeffSeq d = CoeffSeq::from_json(c.to_json());
  CHECK(d.offset == c.offset);
  REQUIRE(d.coeffs.size() == c.coeffs.size());
  for (std::size_t i = 0; i < c.coeffs.size(); ++i) CHECK(d.coeffs[i] == c.coeffs[i]);
}
