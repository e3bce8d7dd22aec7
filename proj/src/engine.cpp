#include "cpr/engine.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "cpr/errors.hpp"

namespace cpr {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t x = seed ^ (salt * 0x9e3779b97f4a7c15ULL + 0x165667b19e3779f9ULL);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RecoveryConfig make_config(Generator g, Pathway pathway, double period, double noise,
                           std::uint64_t seed) {
  RecoveryConfig cfg(std::move(g));
  cfg.pathway = pathway;
  cfg.period = period;
  cfg.noise = noise;
  cfg.seed = seed;
  if (pathway == Pathway::hermite) {
    cfg.nodes = default_nodes(cfg.generator.order(), period);
  } else {
    const SymBasisSystem sys = build_basis_system(cfg.generator, {}, cfg.tolerances);
    std::vector<double> gamma = sys.nodes;
    for (double& x : gamma) x *= period;
    cfg.nodes = nodes_from_list(std::move(gamma), period);
  }
  // Index searches must sit above the noise floor, not machine precision.
  if (noise > 0.0) cfg.tolerances.am_zero_rel = std::max(cfg.tolerances.am_zero_rel, 10.0 * noise);
  return cfg;
}

SampleSet sample_signal(const CoeffSeq& c, const RecoveryConfig& cfg) {
  return take_samples(c, cfg.generator, cfg.nodes, cfg.noise, cfg.seed);
}

RecoveryResult recover_signal(const SampleSet& samples, const RecoveryConfig& cfg) {
  RecoveryResult res;
  if (samples.intervals.empty()) return res;  // zero samples -> zero sequence

  std::vector<std::pair<int, Eigen::VectorXcd>> windows;
  std::vector<double> residuals;
  if (cfg.pathway == Pathway::hermite) {
    // blocks recovered on the symmetric local coordinate and converted to
    // shift coefficients through the matching basis matrix
    const LocalBasisMatrix basis = local_basis_matrix_symmetric(cfg.generator);
    HermiteSampleSolver solver(samples.nodes, cfg.generator.order());
    res.cond_f = solver.cond_f();
    res.cond_df = solver.cond_df();
    res.cond_warning = solver.cond_warning(cfg.tolerances.cond_warn);
    for (const auto& iv : samples.intervals) {
      try {
        const AmSeq am = solver.solve_symmetric(iv.f, iv.df);
        LocalBlock blk = recover_block(am, cfg.tolerances);
        blk.j = iv.j;
        res.interval_diagnostics.push_back({iv.j, blk.residual, blk.real_flag});
        windows.emplace_back(iv.j, block_to_window(blk, basis));
        residuals.push_back(blk.residual);
      } catch (const RecoveryError& e) {
        throw RecoveryError("interval j=" + std::to_string(iv.j) + ": " + e.what());
      }
    }
  } else {
    const SymBasisSystem sys = build_basis_system(cfg.generator, {}, cfg.tolerances);
    res.cond_f = sys.cond;
    res.cond_warning = sys.cond > cfg.tolerances.cond_warn;
    for (const auto& iv : samples.intervals) {
      try {
        const Eigen::MatrixXd gram = gram_from_samples(sys, iv.f);
        windows.emplace_back(iv.j, factor_gram(gram, cfg.tolerances));
        res.interval_diagnostics.push_back({iv.j, 0.0, false});
      } catch (const RecoveryError& e) {
        throw RecoveryError("interval j=" + std::to_string(iv.j) + ": " + e.what());
      }
    }
  }

  StitchResult st = stitch(windows, cfg.tolerances, residuals);
  res.coeffs = std::move(st.coeffs);
  res.alignment = std::move(st.alignment);
  return res;
}

nlohmann::json ErrorReport::to_json() const {
  return {{"l2_rel", l2_rel},       {"max_rel_re", max_rel_re}, {"max_rel_im", max_rel_im},
          {"max_abs_re", max_abs_re}, {"max_abs_im", max_abs_im}, {"dist", dist}};
}

ErrorReport verify_recovery(const CoeffSeq& truth, const CoeffSeq& recovered) {
  const EquivResult eq = dist_up_to_equiv(truth, recovered);
  ErrorReport rep;
  rep.dist = eq.dist;
  const double n = truth.norm();
  rep.l2_rel = (n > 0.0) ? eq.dist / n : eq.dist;
  rep.max_rel_re = eq.max_rel_re;
  rep.max_rel_im = eq.max_rel_im;
  rep.max_abs_re = eq.max_abs_re;
  rep.max_abs_im = eq.max_abs_im;
  return rep;
}

CoeffSeq random_coeffs(int offset, int count, double lo, double hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(lo, hi);
  std::vector<cplx> c(count);
  for (int i = 0; i < count; ++i) {
    const double re = uni(rng);
    const double im = uni(rng);
    c[i] = {re, im};
  }
  return CoeffSeq(offset, std::move(c));
}

TrialResult run_trial(const CoeffSeq& truth, const RecoveryConfig& cfg) {
  TrialResult tr;
  tr.seed = cfg.seed;
  try {
    const SampleSet samples = sample_signal(truth, cfg);
    const RecoveryResult rec = recover_signal(samples, cfg);
    tr.report = verify_recovery(truth, rec.coeffs);
    tr.ok = true;
  } catch (const RecoveryError& e) {
    tr.error = e.what();
  }
  return tr;
}

RecoveryConfig figure1_config(std::uint64_t seed, double noise, bool printed_psi) {
  RecoveryConfig cfg = make_config(fig1_generator(printed_psi), Pathway::hermite,
                                   /*period=*/2.0, noise, seed);
  return cfg;
}

}  // namespace cpr
