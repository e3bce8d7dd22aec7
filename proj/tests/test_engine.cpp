#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cmath>

#include "cpr/engine.hpp"
#include "cpr/errors.hpp"

using namespace cpr;

namespace {
const cplx I{0.0, 1.0};
}

TEST_CASE("noiseless spline round trip through the hermite pathway") {
  for (int N : {3, 4, 5}) {
    RecoveryConfig cfg = make_config(bspline(N));
    for (int t = 0; t < 10; ++t) {
      const CoeffSeq truth = random_coeffs(-2, 7, -1.0, 1.0, derive_seed(900 + N, t));
      if (!is_cpr(truth, N).retrievable) continue;
      cfg.seed = derive_seed(1, t);
      const SampleSet s = sample_signal(truth, cfg);
      const RecoveryResult r = recover_signal(s, cfg);
      CHECK(verify_recovery(truth, r.coeffs).dist < 1e-8 * truth.norm());
    }
  }
}

TEST_CASE("pathway agreement for phi1") {
  const CoeffSeq truth = random_coeffs(0, 6, -1.0, 1.0, 77);
  REQUIRE(is_cpr(truth, 3).retrievable);

  RecoveryConfig hermite_cfg = make_config(phi1(), Pathway::hermite);
  const RecoveryResult hr = recover_signal(sample_signal(truth, hermite_cfg), hermite_cfg);
  CHECK(verify_recovery(truth, hr.coeffs).dist < 1e-8 * truth.norm());

  RecoveryConfig gram_cfg = make_config(phi1(), Pathway::gram);
  const RecoveryResult gr = recover_signal(sample_signal(truth, gram_cfg), gram_cfg);
  CHECK(verify_recovery(truth, gr.coeffs).dist < 1e-8 * truth.norm());

  CHECK(dist_up_to_equiv(hr.coeffs, gr.coeffs).dist < 1e-8 * truth.norm());
}

TEST_CASE("zero samples produce the zero sequence") {
  RecoveryConfig cfg = make_config(bspline(3));
  const SampleSet s = sample_signal(CoeffSeq{}, cfg);
  const RecoveryResult r = recover_signal(s, cfg);
  CHECK(r.coeffs.empty());
}

TEST_CASE("determinism of the full trial") {
  RecoveryConfig cfg = figure1_config(/*seed=*/5);
  const CoeffSeq truth = random_coeffs(-3, 5, -1.0, 1.0, derive_seed(5, 99));
  const TrialResult a = run_trial(truth, cfg);
  const TrialResult b = run_trial(truth, cfg);
  REQUIRE(a.ok);
  REQUIRE(b.ok);
  CHECK(a.report.max_rel_re == b.report.max_rel_re);
  CHECK(a.report.max_rel_im == b.report.max_rel_im);
  CHECK(a.report.dist == b.report.dist);
}

TEST_CASE("figure-1 style noisy trial stays within a few percent") {
  int good = 0;
  for (int t = 0; t < 10; ++t) {
    RecoveryConfig cfg = figure1_config(derive_seed(2026, t));
    const CoeffSeq truth = random_coeffs(-3, 5, -1.0, 1.0, derive_seed(7, t));
    const TrialResult tr = run_trial(truth, cfg);
    if (tr.ok && tr.report.max_rel_re <= 0.1 && tr.report.max_rel_im <= 0.1) ++good;
  }
  CHECK(good >= 8);
}

TEST_CASE("gauge invariance of the recovered sequence") {
  RecoveryConfig cfg = make_config(bspline(3));
  const CoeffSeq truth = random_coeffs(0, 5, -1.0, 1.0, 31);
  REQUIRE(is_cpr(truth, 3).retrievable);
  const RecoveryResult base = recover_signal(sample_signal(truth, cfg), cfg);

  std::vector<cplx> tv;
  for (const auto& z : truth.coeffs) tv.push_back(I * std::conj(z));
  const CoeffSeq transformed(0, tv);
  const RecoveryResult tr = recover_signal(sample_signal(transformed, cfg), cfg);
  CHECK(dist_up_to_equiv(base.coeffs, tr.coeffs).dist < 1e-10 * truth.norm());
}

TEST_CASE("verify_recovery reports the caption statistics") {
  const CoeffSeq truth(0, {cplx{1, -0.5}, cplx{-0.25, 2}});
  std::vector<cplx> rec;
  for (const auto& z : truth.coeffs) rec.push_back(I * std::conj(z));
  const ErrorReport rep = verify_recovery(truth, CoeffSeq(0, rec));
  CHECK(rep.dist < 1e-14);
  CHECK(rep.max_rel_re < 1e-13);
  CHECK(rep.max_rel_im < 1e-13);
  const nlohmann::json j = rep.to_json();
  CHECK(j.contains("l2_rel"));
  CHECK(j.contains("max_rel_re"));
  CHECK(j.contains("max_rel_im"));

  // errors scale linearly with a small perturbation
  std::vector<cplx> pert = truth.coeffs;
  pert[0] += 1e-6;
  const ErrorReport rep2 = verify_recovery(truth, CoeffSeq(0, pert));
  CHECK(rep2.dist == doctest::Approx(1e-6).epsilon(1e-3));
}

TEST_CASE("interval errors carry the interval index") {
  RecoveryConfig cfg = make_config(bspline(3));
  const CoeffSeq truth = random_coeffs(0, 4, -1.0, 1.0, 3);
  SampleSet s = sample_signal(truth, cfg);
  for (auto& x : s.intervals[1].f) x = -1.0;  // impossible magnitudes
  try {
    recover_signal(s, cfg);
    FAIL("expected a recovery error");
  } catch (const RecoveryError& e) {
    CHECK(std::string(e.what()).find("j=") != std::string::npos);
  }
}
