#pragma once

#include <nlohmann/json_fwd.hpp>

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "cpr/generator.hpp"

namespace cpr {

using cplx = std::complex<double>;

// Finitely supported coefficient sequence c_k, k = offset .. offset+size-1.
// Construction trims exact leading/trailing zeros so the stored ends are
// nonzero whenever the sequence is nonempty.
struct CoeffSeq {
  int offset = 0;
  std::vector<cplx> coeffs;

  CoeffSeq() = default;
  CoeffSeq(int offset_, std::vector<cplx> coeffs_);

  bool empty() const { return coeffs.empty(); }
  int k_minus() const { return offset; }
  int k_plus() const { return offset + static_cast<int>(coeffs.size()) - 1; }
  cplx at(int k) const;
  double norm() const;

  nlohmann::json to_json() const;
  static CoeffSeq from_json(const nlohmann::json& j);
};

cplx eval_signal(const CoeffSeq& c, const Generator& g, double x);
cplx eval_signal_deriv(const CoeffSeq& c, const Generator& g, double x);

// Canonical decomposition into a real left tail, a genuinely complex middle
// and a real right tail: xi1/xi2 are the phases of the first/last nonzero
// coefficient, kappa_minus/kappa_plus the largest/smallest indices bounding
// the real tails, kf the (possibly empty) middle index interval.
struct Decomposition {
  int k_minus = 0;
  int k_plus = 0;
  cplx xi1{1.0, 0.0};
  cplx xi2{1.0, 0.0};
  int kappa_minus = 0;
  std::optional<int> kappa_plus;  // nullopt encodes +infinity
  bool kf_nonempty = false;
  int kf_lo = 0;  // valid when kf_nonempty
  int kf_hi = 0;
};

Decomposition decompose(const CoeffSeq& c, double eta = 1e-10);

struct CprWitness {
  bool retrievable = false;
  std::string condition;  // "", "zero-window", "aligned-window", "L2-multiple-breaks", ...
  int index = 0;          // first violating k when not retrievable
  bool short_sequence = false;  // K+ - K- < L-1: the stated index range is degenerate
  std::string note;
};

// Theorem-style predicate: support-length L >= 3 uses the zero-window and
// aligned-window conditions, L = 2 the sign-breaking-pair rule, L = 1 the
// single-coefficient rule.
CprWitness is_cpr(const CoeffSeq& c, int L, double eta = 1e-10);

struct EquivResult {
  double dist = 0.0;
  bool conjugated = false;
  cplx phase{1.0, 0.0};
  CoeffSeq aligned;  // z * sigma(d), index-aligned with c's support union
  double max_rel_re = 0.0;
  double max_rel_im = 0.0;
  double max_abs_re = 0.0;  // absolute errors on entries excluded from the quotient
  double max_abs_im = 0.0;
};

// min over unimodular z and sigma in {id, conj} of ||c - z sigma(d)||_2,
// with the per-coefficient error statistics computed from the aligned copy.
EquivResult dist_up_to_equiv(const CoeffSeq& c, const CoeffSeq& d);
double dist_up_to_equiv(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);

// For a sequence failing the predicate, builds a partner with identical
// magnitudes everywhere that is not equivalent to c: a unimodular twist (or
// conjugation) of the segment right of a zero window, or a conjugate
// reflection about an aligned window's phase line.
CoeffSeq ambiguity_partner(const CoeffSeq& c, int L, const CprWitness& w);

}  // namespace cpr
