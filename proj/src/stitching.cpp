#include "cpr/stitching.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

#include "cpr/errors.hpp"

namespace cpr {

Eigen::VectorXcd block_to_window(const LocalBlock& b, const LocalBasisMatrix& basis) {
  if (basis.H.cols() != b.d.size())
    throw SpecError("block_to_window: basis and block order mismatch");
  return basis.monomial_to_window(b.d);
}

namespace {

struct OverlapFit {
  double resid_id = 0.0;
  double resid_conj = 0.0;
  cplx phase_id{1.0, 0.0};
  cplx phase_conj{1.0, 0.0};
};

OverlapFit fit_overlap(const Eigen::VectorXcd& target, const Eigen::VectorXcd& cand) {
  OverlapFit fit;
  const double nt = target.squaredNorm();
  for (int s = 0; s < 2; ++s) {
    const Eigen::VectorXcd v = s ? cand.conjugate() : cand;
    const cplx ip = (target.array() * v.array().conjugate()).sum();
    const double nv = v.squaredNorm();
    const double r2 = std::max(0.0, nt + nv - 2.0 * std::abs(ip));
    const cplx z = (std::abs(ip) > 0.0) ? ip / std::abs(ip) : cplx{1.0, 0.0};
    if (s) {
      fit.resid_conj = std::sqrt(r2);
      fit.phase_conj = z;
    } else {
      fit.resid_id = std::sqrt(r2);
      fit.phase_id = z;
    }
  }
  return fit;
}

bool has_independent_pair(const Eigen::VectorXcd& w, double tau2) {
  for (Eigen::Index a = 0; a < w.size(); ++a)
    for (Eigen::Index b = a + 1; b < w.size(); ++b)
      if (std::abs(std::imag(w(a) * std::conj(w(b)))) > tau2) return true;
  return false;
}

}  // namespace

nlohmann::json AlignmentState::to_json() const {
  nlohmann::json ts = nlohmann::json::array();
  for (const auto& t : transforms)
    ts.push_back({{"j", t.j},
                  {"phase_re", t.phase.real()},
                  {"phase_im", t.phase.imag()},
                  {"conjugated", t.conjugated},
                  {"sigma_resolved", t.sigma_resolved}});
  nlohmann::json ub = nlohmann::json::array();
  for (int k : unresolved_boundaries) ub.push_back(k);
  return {{"anchor", anchor ? nlohmann::json(*anchor) : nlohmann::json()},
          {"real_fallback", real_fallback},
          {"transforms", ts},
          {"unresolved_boundaries", ub}};
}

StitchResult stitch(const std::vector<std::pair<int, Eigen::VectorXcd>>& windows,
                    const Tolerances& tol, const std::vector<double>& residuals) {
  StitchResult out;
  if (windows.empty()) return out;
  const int L = static_cast<int>(windows.front().second.size());
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (windows[i].second.size() != L) throw SpecError("stitch: ragged windows");
    if (i > 0 && windows[i].first != windows[i - 1].first + 1)
      throw SpecError("stitch: intervals must be consecutive");
  }
  if (!residuals.empty() && residuals.size() != windows.size())
    throw SpecError("stitch: residuals must match the windows");

  double wmax = 0.0;
  for (const auto& [j, w] : windows) wmax = std::max(wmax, w.cwiseAbs().maxCoeff());
  if (wmax <= 0.0) {
    out.alignment.real_fallback = true;
    return out;
  }
  const double tau2 = tol.anchor_rel * wmax * wmax;
  const double tiny = 1e-13 * wmax;

  int anchor_pos = -1;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (has_independent_pair(windows[i].second, tau2)) {
      anchor_pos = static_cast<int>(i);
      break;
    }
  }

  std::vector<Eigen::VectorXcd> aligned(windows.size());
  std::vector<IntervalTransform> transforms(windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i) transforms[i].j = windows[i].first;

  const bool real_fallback = (anchor_pos < 0);
  out.alignment.real_fallback = real_fallback;
  if (real_fallback) anchor_pos = 0;  // canonical windows are real vectors here
  out.alignment.anchor = windows[anchor_pos].first;
  aligned[anchor_pos] = windows[anchor_pos].second;

  // Progressive best-estimate assembly: every aligned window deposits its
  // coefficients, better (lower-residual) intervals winning overlaps. With
  // no residuals this reduces to the plain exposure rule: the anchor
  // contributes its window, every later interval only its new coefficient.
  const int lo = windows.front().first - L + 1;
  const int hi = windows.back().first;
  std::vector<cplx> acc(hi - lo + 1, cplx{0.0, 0.0});
  std::vector<double> acc_q(hi - lo + 1, std::numeric_limits<double>::infinity());
  auto deposit = [&](std::size_t i) {
    const double q = residuals.empty() ? 0.0 : residuals[i];
    const int base = windows[i].first - L + 1;
    for (int r = 0; r < L; ++r) {
      if (q < acc_q[base + r - lo]) {
        acc[base + r - lo] = aligned[i](r);
        acc_q[base + r - lo] = q;
      }
    }
  };
  deposit(anchor_pos);

  auto propagate = [&](std::size_t from, std::size_t to) {
    // Overlap shares L-1 coefficients; match against the best estimates
    // assembled so far rather than the neighbouring window alone, so a
    // noisy interval cannot drift the gauge of everything behind it.
    const bool rightward = to > from;
    const int obase = rightward ? windows[to].first - L + 1 : windows[to].first - L + 2;
    Eigen::VectorXcd target(L - 1);
    for (int r = 0; r < L - 1; ++r) {
      const int k = obase + r;
      target(r) = (k >= lo && k <= hi && std::isfinite(acc_q[k - lo])) ? acc[k - lo]
                                                                       : cplx{0.0, 0.0};
    }
    const Eigen::VectorXcd cand =
        rightward ? windows[to].second.head(L - 1).eval() : windows[to].second.tail(L - 1).eval();
    const int boundary = rightward ? windows[from].first : windows[to].first;

    OverlapFit fit = fit_overlap(target, cand);
    const double rb = std::min(fit.resid_id, fit.resid_conj);
    const double ro = std::max(fit.resid_id, fit.resid_conj);
    IntervalTransform& tr = transforms[to];
    bool use_conj = fit.resid_conj < fit.resid_id;
    bool resolved = ro > tol.sigma_margin * std::max(rb, tiny);
    if (target.norm() <= tiny && cand.norm() <= tiny) {
      // Vanishing overlap: the chain splits; keep the identity gauge.
      resolved = false;
      use_conj = false;
    } else {
      // Mismatch gated against the global window scale: small noisy
      // overlaps must not masquerade as inconsistent inputs.
      if (rb > tol.overlap_rel * wmax)
        throw RecoveryError("inconsistent blocks at interval j=" +
                            std::to_string(windows[to].first));
      if (real_fallback) {
        // Conjugation acts trivially on real windows; only the sign travels.
        resolved = true;
        use_conj = false;
      }
    }
    if (!resolved) {
      out.alignment.unresolved_boundaries.push_back(boundary);
      use_conj = false;
    }
    tr.conjugated = use_conj;
    tr.sigma_resolved = resolved;
    tr.phase = use_conj ? fit.phase_conj : fit.phase_id;
    aligned[to] = tr.phase * (use_conj ? windows[to].second.conjugate() : windows[to].second);
    deposit(to);
  };

  for (std::size_t i = anchor_pos + 1; i < windows.size(); ++i) propagate(i - 1, i);
  for (int i = anchor_pos - 1; i >= 0; --i) propagate(i + 1, i);

  out.coeffs = CoeffSeq(lo, std::move(acc));
  out.alignment.transforms = std::move(transforms);
  std::sort(out.alignment.unresolved_boundaries.begin(),
            out.alignment.unresolved_boundaries.end());
  return out;
}

}  // namespace cpr
