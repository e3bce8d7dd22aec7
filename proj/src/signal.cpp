#include "cpr/signal.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

#include "cpr/errors.hpp"

namespace cpr {

namespace {

double max_abs(const std::vector<cplx>& v) {
  double m = 0.0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace

CoeffSeq::CoeffSeq(int offset_, std::vector<cplx> coeffs_)
    : offset(offset_), coeffs(std::move(coeffs_)) {
  std::size_t lead = 0;
  while (lead < coeffs.size() && coeffs[lead] == cplx{0.0, 0.0}) ++lead;
  std::size_t tail = coeffs.size();
  while (tail > lead && coeffs[tail - 1] == cplx{0.0, 0.0}) --tail;
  if (lead > 0 || tail < coeffs.size()) {
    coeffs = std::vector<cplx>(coeffs.begin() + lead, coeffs.begin() + tail);
    offset += static_cast<int>(lead);
  }
  if (coeffs.empty()) offset = 0;
}

cplx CoeffSeq::at(int k) const {
  if (k < offset || k > k_plus() || coeffs.empty()) return {0.0, 0.0};
  return coeffs[k - offset];
}

double CoeffSeq::norm() const {
  double s = 0.0;
  for (const auto& z : coeffs) s += std::norm(z);
  return std::sqrt(s);
}

nlohmann::json CoeffSeq::to_json() const {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (const auto& z : coeffs) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  return {{"offset", offset}, {"re", re}, {"im", im}};
}

CoeffSeq CoeffSeq::from_json(const nlohmann::json& j) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "offset" && key != "re" && key != "im")
      throw SpecError("unknown coefficient key: " + key);
  }
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (re.size() != im.size()) throw SpecError("re/im length mismatch");
  std::vector<cplx> c(re.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = {re[i].get<double>(), im[i].get<double>()};
  return CoeffSeq(j.at("offset").get<int>(), std::move(c));
}

cplx eval_signal(const CoeffSeq& c, const Generator& g, double x) {
  if (c.empty()) return {0.0, 0.0};
  const int L = g.support_length();
  // phi(x-k) != 0 requires x-L < k <= x.
  int klo = static_cast<int>(std::floor(x - L)) + 1;
  int khi = static_cast<int>(std::floor(x));
  klo = std::max(klo, c.k_minus());
  khi = std::min(khi, c.k_plus());
  cplx acc{0.0, 0.0};
  for (int k = klo; k <= khi; ++k) acc += c.at(k) * g.eval(x - k);
  return acc;
}

cplx eval_signal_deriv(const CoeffSeq& c, const Generator& g, double x) {
  if (c.empty()) return {0.0, 0.0};
  const int L = g.support_length();
  int klo = static_cast<int>(std::floor(x - L)) + 1;
  int khi = static_cast<int>(std::floor(x));
  klo = std::max(klo, c.k_minus());
  khi = std::min(khi, c.k_plus());
  cplx acc{0.0, 0.0};
  for (int k = klo; k <= khi; ++k) acc += c.at(k) * g.eval_deriv(x - k);
  return acc;
}

Decomposition decompose(const CoeffSeq& c, double eta) {
  const double tau = eta * max_abs(c.coeffs);
  int km = c.k_minus(), kp = c.k_plus();
  while (km <= kp && std::abs(c.at(km)) <= tau) ++km;
  while (kp >= km && std::abs(c.at(kp)) <= tau) --kp;
  if (c.empty() || km > kp) throw RecoveryError("decompose: zero sequence");

  Decomposition d;
  d.k_minus = km;
  d.k_plus = kp;
  d.xi1 = c.at(km) / std::abs(c.at(km));
  d.xi2 = c.at(kp) / std::abs(c.at(kp));

  int kap_m = km;
  while (kap_m < kp && std::abs(std::imag(std::conj(d.xi1) * c.at(kap_m + 1))) <= tau) ++kap_m;
  if (kap_m == kp) kap_m = kp;  // sequence real up to the phase xi1
  d.kappa_minus = kap_m;

  // Smallest k > kappa_minus with Im(conj(xi2) c_l) ~ 0 for every l >= k.
  int kap_p = kp + 1;
  while (kap_p - 1 > d.kappa_minus &&
         std::abs(std::imag(std::conj(d.xi2) * c.at(kap_p - 1))) <= tau)
    --kap_p;
  d.kappa_plus = kap_p;

  d.kf_nonempty = (d.kappa_minus + 2 <= kap_p) && (kap_p < kp + 1);
  if (d.kf_nonempty) {
    d.kf_lo = d.kappa_minus + 1;
    d.kf_hi = kap_p - 1;
  }
  return d;
}

CprWitness is_cpr(const CoeffSeq& c, int L, double eta) {
  if (L < 1) throw SpecError("support length must be positive");
  CprWitness w;
  if (c.empty()) {
    w.retrievable = false;
    w.condition = "zero-sequence";
    return w;
  }
  const double amax = max_abs(c.coeffs);
  const double tau = eta * amax;
  const double tau2 = eta * amax * amax;
  const Decomposition dec = decompose(c, eta);
  const int km = dec.k_minus, kp = dec.k_plus;

  auto pair_breaks = [&](int n1, int n2) {
    return std::abs(std::imag(c.at(n1) * std::conj(c.at(n2)))) > tau2;
  };

  if (L == 1) {
    for (int k = km + 1; k <= kp; ++k) {
      if (std::abs(c.at(k)) > tau) {
        w.retrievable = false;
        w.condition = "L1-multiple-coefficients";
        w.index = k;
        return w;
      }
    }
    w.retrievable = true;
    return w;
  }

  if (L == 2) {
    for (int k = km; k <= kp; ++k) {
      if (std::abs(c.at(k)) <= tau) {
        w.retrievable = false;
        w.condition = "zero-window";
        w.index = k;
        return w;
      }
    }
    int breaks = 0;
    for (int k = km; k < kp; ++k) {
      if (pair_breaks(k, k + 1)) {
        ++breaks;
        if (breaks > 1) {
          w.retrievable = false;
          w.condition = "L2-multiple-breaks";
          w.index = k;
          return w;
        }
      }
    }
    w.retrievable = true;
    return w;
  }

  if (kp - km < L - 1) {
    w.short_sequence = true;
    w.note = "K+ - K- < L-1: the stated index ranges are evaluated literally";
  }
  // Zero-window condition: every window of L-1 consecutive indices inside
  // (K- - L + 1, K+ + 1) must contain a nonzero coefficient.
  for (int k = km - L + 2; k <= kp; ++k) {
    bool any = false;
    for (int l = 0; l < L - 1 && !any; ++l) any = std::abs(c.at(k + l)) > tau;
    if (!any) {
      w.retrievable = false;
      w.condition = "zero-window";
      w.index = k;
      return w;
    }
  }
  if (dec.kf_nonempty) {
    const int kap_p = *dec.kappa_plus;
    for (int k = dec.kappa_minus + 1; k <= kap_p + L - 3; ++k) {
      bool any = false;
      for (int n1 = k - L + 2; n1 <= k && !any; ++n1)
        for (int n2 = n1 + 1; n2 <= k && !any; ++n2) any = pair_breaks(n1, n2);
      if (!any) {
        w.retrievable = false;
        w.condition = "aligned-window";
        w.index = k;
        return w;
      }
    }
  }
  w.retrievable = true;
  return w;
}

namespace {

struct Alignment {
  double dist;
  bool conjugated;
  cplx phase;
};

Alignment best_alignment(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  Alignment best{std::numeric_limits<double>::infinity(), false, {1.0, 0.0}};
  for (int s = 0; s < 2; ++s) {
    const bool conj = (s == 1);
    cplx ip{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) {
      const cplx bi = conj ? std::conj(b[i]) : b[i];
      ip += a[i] * std::conj(bi);
    }
    const cplx z = (std::abs(ip) > 0.0) ? ip / std::abs(ip) : cplx{1.0, 0.0};
    // form the difference explicitly; the norm identity cancels badly
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const cplx bi = conj ? std::conj(b[i]) : b[i];
      d2 += std::norm(a[i] - z * bi);
    }
    const double d = std::sqrt(d2);
    if (d < best.dist) {
      best.dist = d;
      best.conjugated = conj;
      best.phase = z;
    }
  }
  return best;
}

}  // namespace

EquivResult dist_up_to_equiv(const CoeffSeq& c, const CoeffSeq& d) {
  EquivResult r;
  if (c.empty() && d.empty()) return r;
  const int lo = std::min(c.empty() ? d.k_minus() : c.k_minus(),
                          d.empty() ? c.k_minus() : d.k_minus());
  const int hi = std::max(c.empty() ? d.k_plus() : c.k_plus(),
                          d.empty() ? c.k_plus() : d.k_plus());
  std::vector<cplx> a, b;
  for (int k = lo; k <= hi; ++k) {
    a.push_back(c.at(k));
    b.push_back(d.at(k));
  }
  const Alignment al = best_alignment(a, b);
  r.dist = al.dist;
  r.conjugated = al.conjugated;
  r.phase = al.phase;

  std::vector<cplx> aligned(b.size());
  for (std::size_t i = 0; i < b.size(); ++i)
    aligned[i] = al.phase * (al.conjugated ? std::conj(b[i]) : b[i]);
  r.aligned = CoeffSeq(lo, aligned);

  const double floor_re = 1e-8 * max_abs(a);
  for (int k = lo; k <= hi; ++k) {
    const cplx truth = c.at(k);
    const cplx got = aligned[k - lo];
    const double ere = std::abs(truth.real() - got.real());
    const double eim = std::abs(truth.imag() - got.imag());
    if (std::abs(truth.real()) > floor_re)
      r.max_rel_re = std::max(r.max_rel_re, ere / std::abs(truth.real()));
    else
      r.max_abs_re = std::max(r.max_abs_re, ere);
    if (std::abs(truth.imag()) > floor_re)
      r.max_rel_im = std::max(r.max_rel_im, eim / std::abs(truth.imag()));
    else
      r.max_abs_im = std::max(r.max_abs_im, eim);
  }
  return r;
}

double dist_up_to_equiv(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  std::vector<cplx> av(a.data(), a.data() + a.size());
  std::vector<cplx> bv(b.data(), b.data() + b.size());
  return best_alignment(av, bv).dist;
}

CoeffSeq ambiguity_partner(const CoeffSeq& c, int L, const CprWitness& w) {
  if (w.retrievable) throw SpecError("ambiguity_partner: sequence is retrievable");
  const double scale = c.norm();

  auto transform_right = [&](int split, bool conjugate, cplx factor) {
    std::vector<cplx> g;
    for (int k = c.k_minus(); k <= c.k_plus(); ++k) {
      cplx v = c.at(k);
      if (k > split) v = factor * (conjugate ? std::conj(v) : v);
      g.push_back(v);
    }
    return CoeffSeq(c.k_minus(), std::move(g));
  };
  auto transform_left = [&](int split, cplx factor) {
    std::vector<cplx> g;
    for (int k = c.k_minus(); k <= c.k_plus(); ++k) {
      cplx v = c.at(k);
      if (k < split) v = factor * std::conj(v);
      g.push_back(v);
    }
    return CoeffSeq(c.k_minus(), std::move(g));
  };

  std::vector<CoeffSeq> candidates;
  if (w.condition == "zero-window") {
    // The window [k, k+L-2] vanishes, so parts left/right of it never share
    // an interval: any independent gauge on the right preserves magnitudes.
    const int split = w.index + L - 2;
    candidates.push_back(transform_right(split, false, cplx{0.0, 1.0}));
    candidates.push_back(transform_right(split, true, cplx{1.0, 0.0}));
    candidates.push_back(transform_right(split, false, std::polar(1.0, 0.7)));
  } else if (w.condition == "aligned-window" || w.condition == "L2-multiple-breaks") {
    // Window [k-L+2, k] sits on one phase line u*R; conjugate-reflection
    // about that line fixes the window pointwise and flips one side.
    const int wlo = w.index - L + 2, whi = w.index;
    cplx u{1.0, 0.0};
    double best = 0.0;
    for (int n = wlo; n <= whi; ++n) {
      if (std::abs(c.at(n)) > best) {
        best = std::abs(c.at(n));
        u = c.at(n) / std::abs(c.at(n));
      }
    }
    candidates.push_back(transform_right(whi, true, u * u));
    candidates.push_back(transform_left(wlo, u * u));
  } else if (w.condition == "L1-multiple-coefficients") {
    candidates.push_back(transform_right(w.index - 1, false, cplx{0.0, 1.0}));
  } else {
    throw SpecError("ambiguity_partner: unsupported witness " + w.condition);
  }

  for (const auto& g : candidates) {
    if (dist_up_to_equiv(c, g).dist > 1e-3 * scale) return g;
  }
  throw RecoveryError("ambiguity_partner: no inequivalent partner found");
}

}  // namespace cpr
