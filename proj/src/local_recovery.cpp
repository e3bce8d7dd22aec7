#include "cpr/local_recovery.hpp"

#include <algorithm>
#include <cmath>

#include "cpr/errors.hpp"

namespace cpr {

namespace {

Eigen::MatrixXd vandermonde(const std::vector<double>& nodes, int ncols) {
  Eigen::MatrixXd v(nodes.size(), ncols);
  for (std::size_t r = 0; r < nodes.size(); ++r) {
    double p = 1.0;
    for (int c = 0; c < ncols; ++c) {
      v(r, c) = p;
      p *= nodes[r];
    }
  }
  return v;
}

double condition_number(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) <= 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / (s(s.size() - 1));
}

// Pivoted-elimination solve plus one refinement step with a long double
// residual; the Vandermonde conditioning makes the extra digits count.
Eigen::VectorXd solve_refined(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu,
                              const Eigen::MatrixXd& v, const Eigen::VectorXd& b) {
  Eigen::VectorXd x = lu.solve(b);
  Eigen::VectorXd r(b.size());
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    long double acc = b(i);
    for (Eigen::Index j = 0; j < v.cols(); ++j)
      acc -= static_cast<long double>(v(i, j)) * static_cast<long double>(x(j));
    r(i) = static_cast<double>(acc);
  }
  x += lu.solve(r);
  return x;
}

}  // namespace

AmSeq am_of(const Eigen::VectorXcd& d) {
  const int n = static_cast<int>(d.size());
  AmSeq am;
  am.order = n;
  am.a = Eigen::VectorXd::Zero(2 * n - 1);
  am.a_deriv = Eigen::VectorXd::Zero(std::max(2 * n - 3, 0));
  Eigen::VectorXcd dp(n);
  for (int k = 0; k < n; ++k) dp(k) = static_cast<double>(k) * d(k);
  for (int m = 0; m <= 2 * n - 2; ++m) {
    std::complex<double> acc{0.0, 0.0}, accp{0.0, 0.0};
    for (int j = std::max(0, m - n + 1); j <= std::min(m, n - 1); ++j) {
      acc += d(j) * std::conj(d(m - j));
      accp += dp(j) * std::conj(dp(m - j));
    }
    am.a(m) = acc.real();
    if (m >= 2) am.a_deriv(m - 2) = accp.real();
  }
  return am;
}

HermiteSampleSolver::HermiteSampleSolver(const NodeSet& nodes, int order)
    : order_(order), period_(nodes.period) {
  if (order_ < 3) throw SpecError("Hermite pathway requires N >= 3");
  if (static_cast<int>(nodes.gamma.size()) != 2 * order_ - 1)
    throw SpecError("node set: expected 2N-1 function nodes");
  if (static_cast<int>(nodes.gamma_prime.size()) != 2 * order_ - 5)
    throw SpecError("node set: expected 2N-5 derivative nodes");
  if (!(period_ > 0.0)) throw SpecError("period must be positive");

  auto normalize = [&](const std::vector<double>& src, bool symmetric) {
    std::vector<double> u(src.size());
    for (std::size_t i = 0; i < src.size(); ++i) {
      u[i] = src[i] / period_;
      if (symmetric) u[i] = 2.0 * u[i] - 1.0;
    }
    auto sorted = u;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i)
      if (!(sorted[i] > sorted[i - 1])) throw RecoveryError("coincident sampling nodes");
    return u;
  };
  auto build = [&](System& sys, bool symmetric) {
    sys.nodes_f = normalize(nodes.gamma, symmetric);
    sys.nodes_df = normalize(nodes.gamma_prime, symmetric);
    sys.vand_f = vandermonde(sys.nodes_f, 2 * order_ - 1);
    sys.lu_f.compute(sys.vand_f);
    sys.cond_f = condition_number(sys.vand_f);
    sys.vand_df = vandermonde(sys.nodes_df, 2 * order_ - 5);
    sys.lu_df.compute(sys.vand_df);
    sys.cond_df = condition_number(sys.vand_df);
  };
  build(unit_, false);
  build(sym_, true);
  cond_f_ = unit_.cond_f;
  cond_df_ = unit_.cond_df;
}

AmSeq HermiteSampleSolver::solve_with(const System& sys, const std::vector<double>& values_f,
                                      const std::vector<double>& values_df,
                                      double deriv_scale) const {
  const int n = order_;
  if (static_cast<int>(values_f.size()) != 2 * n - 1 ||
      static_cast<int>(values_df.size()) != 2 * n - 5)
    throw SpecError("sample vectors do not match the node set");

  AmSeq am;
  am.order = n;
  am.a = solve_refined(sys.lu_f, sys.vand_f,
                       Eigen::Map<const Eigen::VectorXd>(values_f.data(), values_f.size()));

  // Top derivative coefficients follow from the function side identities
  // (N-1)(N-2) A_{2N-3} = A'_{2N-3} and (N-1)^2 A_{2N-2} = A'_{2N-2}.
  const double top1 = static_cast<double>((n - 1) * (n - 2)) * am.a(2 * n - 3);
  const double top2 = static_cast<double>((n - 1) * (n - 1)) * am.a(2 * n - 2);

  Eigen::VectorXd q(2 * n - 5);
  for (int i = 0; i < 2 * n - 5; ++i) {
    const double u = sys.nodes_df[i];
    q(i) = deriv_scale * values_df[i] - top1 * std::pow(u, 2 * n - 5) -
           top2 * std::pow(u, 2 * n - 4);
  }
  const Eigen::VectorXd low = solve_refined(sys.lu_df, sys.vand_df, q);

  am.a_deriv = Eigen::VectorXd::Zero(2 * n - 3);
  am.a_deriv.head(2 * n - 5) = low;
  am.a_deriv(2 * n - 5) = top1;
  am.a_deriv(2 * n - 4) = top2;
  // conditioning times the right-hand-side scale bounds the solution error
  double bmax = 0.0, qmax = 0.0;
  for (double v : values_f) bmax = std::max(bmax, std::abs(v));
  for (int i = 0; i < q.size(); ++i) qmax = std::max(qmax, std::abs(q(i)));
  am.accuracy = 100.0 * 2.2e-16 * (sys.cond_f * bmax + sys.cond_df * qmax);
  return am;
}

AmSeq HermiteSampleSolver::solve(const std::vector<double>& values_f,
                                 const std::vector<double>& values_df) const {
  return solve_with(unit_, values_f, values_df, period_ * period_);
}

AmSeq HermiteSampleSolver::solve_symmetric(const std::vector<double>& values_f,
                                           const std::vector<double>& values_df) const {
  // d(tau)/d(t_phys) = 2/period, so |p_tau'|^2 = |f'|^2 period^2 / 4.
  return solve_with(sym_, values_f, values_df, period_ * period_ / 4.0);
}

AmSeq am_from_samples(const std::vector<double>& values_f, const std::vector<double>& values_df,
                      const NodeSet& nodes) {
  const int order = (static_cast<int>(values_f.size()) + 1) / 2;
  HermiteSampleSolver solver(nodes, order);
  return solver.solve(values_f, values_df);
}

namespace {

LocalBlock sweep_block(const AmSeq& am, const Tolerances& tol, double zero_rel) {
  const int n = am.order;
  if (n < 1 || am.a.size() != 2 * n - 1) throw SpecError("malformed A_m sequence");
  LocalBlock blk;
  blk.d = Eigen::VectorXcd::Zero(n);

  const double scale = std::max(am.a.size() ? am.a.cwiseAbs().maxCoeff() : 0.0,
                                am.a_deriv.size() ? am.a_deriv.cwiseAbs().maxCoeff() : 0.0);
  const double tau = zero_rel * scale;
  auto finish = [&](bool complex_found, int k0, int n1) {
    blk.real_flag = !complex_found;
    if (complex_found) blk.k1 = k0 + n1;
    const AmSeq back = am_of(blk.d);
    double r2 = (back.a - am.a).squaredNorm();
    if (am.a_deriv.size() == back.a_deriv.size()) r2 += (back.a_deriv - am.a_deriv).squaredNorm();
    blk.residual = std::sqrt(r2);
    return blk;
  };

  if (scale <= 0.0) {
    blk.real_flag = true;
    return blk;
  }

  if (n >= 3) {
    // Data straight from samples satisfies these exactly; reject inputs that
    // are not even approximately in the model.
    const double id1 = static_cast<double>((n - 1) * (n - 2)) * am.a(2 * n - 3) - am.ad_at(2 * n - 3);
    const double id2 = static_cast<double>((n - 1) * (n - 1)) * am.a(2 * n - 2) - am.ad_at(2 * n - 2);
    const double idscale = static_cast<double>((n - 1) * (n - 1)) * scale;
    if (std::abs(id1) > tol.identity_rel * idscale || std::abs(id2) > tol.identity_rel * idscale)
      throw RecoveryError("A_m data violates the derivative identities");
  }

  int k0 = -1;
  for (int k = 0; k < n; ++k) {
    if (std::abs(am.a(2 * k)) > tau) {
      if (am.a(2 * k) < 0.0) throw RecoveryError("inconsistent magnitudes: negative |d_k0|^2");
      k0 = k;
      break;
    }
  }
  if (k0 < 0) {
    for (int m = 0; m < am.a.size(); ++m)
      if (std::abs(am.a(m)) > tau)
        throw RecoveryError("inconsistent magnitudes: odd A_m without even support");
    return finish(false, 0, -1);
  }
  blk.k0 = k0;

  const int M = n - 1 - k0;
  auto w = [&](int l) { return static_cast<double>(k0 + l); };
  std::vector<double> re(M + 1, 0.0), im(M + 1, 0.0);
  const double e0 = std::sqrt(am.a(2 * k0));
  re[0] = e0;
  blk.d(k0) = e0;

  bool complex_found = false;
  int n1 = -1;

  auto solve2 = [&](double a11, double a12, double a21, double a22, double b1, double b2,
                    double& x1, double& x2) {
    const double det = a11 * a22 - a12 * a21;
    const double rows = std::max({std::abs(a11), std::abs(a12), std::abs(a21), std::abs(a22), 1e-300});
    if (std::abs(det) < 1e-14 * rows * rows) throw RecoveryError("degenerate recovery step");
    x1 = (b1 * a22 - b2 * a12) / det;
    x2 = (a11 * b2 - a21 * b1) / det;
  };

  for (int m = 1; m <= 2 * M; ++m) {
    const int idx = 2 * k0 + m;
    if (!complex_found) {
      if (m % 2 == 1) {
        double s = 0.0;
        for (int l = std::max(1, m - M); l <= (m - 1) / 2; ++l) s += re[l] * re[m - l];
        if (m <= M) re[m] = (am.a(idx) - 2.0 * s) / (2.0 * e0);
      } else {
        const int half = m / 2;
        double s = 0.0, sd = 0.0;
        for (int l = std::max(1, m - M); l <= half - 1; ++l) {
          s += re[l] * re[m - l];
          sd += w(l) * w(m - l) * re[l] * re[m - l];
        }
        double abs2;
        if (m <= M) {
          double top;
          solve2(2.0 * e0, 1.0, 2.0 * w(0) * w(m) * e0, w(half) * w(half),
                 am.a(idx) - 2.0 * s, am.ad_at(idx) - 2.0 * sd, top, abs2);
          re[m] = top;
        } else {
          abs2 = am.a(idx) - 2.0 * s;
        }
        const double imag2 = abs2 - re[half] * re[half];
        if (imag2 > tau) {
          complex_found = true;
          n1 = half;
          im[half] = std::sqrt(imag2);
        } else if (imag2 < -0.5 * std::max(scale, re[half] * re[half])) {
          throw RecoveryError("inconsistent magnitudes: |d_k|^2 below (Re d_k)^2");
        }
      }
    } else {
      const int l = m - 2 * n1;
      const int t = n1 + l;
      if (t > M) continue;  // no new entry; the residual reports any defect
      double kn = 0.0, knd = 0.0;
      for (int a = 1; a < n1; ++a) {
        const int b = m - a;
        if (b > M) continue;
        kn += 2.0 * re[a] * re[b];
        knd += 2.0 * w(a) * w(b) * re[a] * re[b];
      }
      for (int u = 1; 2 * u < l; ++u) {
        const int v = l - u;
        const double pr = re[n1 + u] * re[n1 + v] + im[n1 + u] * im[n1 + v];
        kn += 2.0 * pr;
        knd += 2.0 * w(n1 + u) * w(n1 + v) * pr;
      }
      if (l % 2 == 0) {
        const int mid = n1 + l / 2;
        const double a2 = re[mid] * re[mid] + im[mid] * im[mid];
        kn += a2;
        knd += w(mid) * w(mid) * a2;
      }
      double pair;  // Re(e_{n1} conj(e_t))
      if (m <= M) {
        double top;
        solve2(2.0 * e0, 2.0, 2.0 * w(0) * w(m) * e0, 2.0 * w(n1) * w(t),
               am.a(idx) - kn, am.ad_at(idx) - knd, top, pair);
        re[m] = top;
      } else {
        pair = 0.5 * (am.a(idx) - kn);
      }
      im[t] = (pair - re[n1] * re[t]) / im[n1];
    }
  }

  for (int l = 0; l <= M; ++l) blk.d(k0 + l) = std::complex<double>(re[l], im[l]);
  return finish(complex_found, k0, n1);
}

// Index reversal r_k = d_{N-1-k} maps the data to itself in closed form:
// A_m(r) = A_{2N-2-m}(d), and the derivative weights transform by
// k(m-k) -> (N-1-a)(N-1-b), giving
// A'_m(r) = ((N-1)^2 - (N-1)s) A_s(d) + A'_s(d) with s = 2N-2-m.
// Sweeping the reversed data re-anchors the recursion on the trailing
// entry, which rescues blocks whose leading entry is tiny.
AmSeq reverse_am(const AmSeq& am) {
  const int n = am.order;
  AmSeq rev;
  rev.order = n;
  rev.accuracy = am.accuracy;
  rev.a.resize(2 * n - 1);
  for (int m = 0; m <= 2 * n - 2; ++m) rev.a(m) = am.a(2 * n - 2 - m);
  rev.a_deriv.resize(std::max(2 * n - 3, 0));
  for (int m = 2; m <= 2 * n - 2; ++m) {
    const int s = 2 * n - 2 - m;
    const double lin = (static_cast<double>(n - 1) * (n - 1) -
                        static_cast<double>(n - 1) * s) * am.a(s);
    rev.a_deriv(m - 2) = lin + (s >= 2 ? am.ad_at(s) : 0.0);
  }
  return rev;
}

Eigen::VectorXcd canonicalize_vec(const Eigen::VectorXcd& w, double tau) {
  Eigen::VectorXcd out = w;
  for (Eigen::Index k = 0; k < out.size(); ++k)
    if (std::abs(out(k)) > tau) {
      out *= std::abs(out(k)) / out(k);
      break;
    }
  for (Eigen::Index k = 0; k < out.size(); ++k)
    if (std::abs(out(k).imag()) > tau) {
      if (out(k).imag() < 0.0) out = out.conjugate();
      break;
    }
  return out;
}

// Canonical block (with index metadata and residual) from a raw candidate.
LocalBlock make_block_from(const Eigen::VectorXcd& d_raw, const AmSeq& am, const Tolerances& tol) {
  LocalBlock blk;
  const double dmax = d_raw.size() ? d_raw.cwiseAbs().maxCoeff() : 0.0;
  const double tau = std::max(tol.am_zero_rel, 1e-12) * std::max(dmax, 1e-300);
  blk.d = canonicalize_vec(d_raw, tau);
  blk.real_flag = true;
  for (Eigen::Index k = 0; k < blk.d.size(); ++k) {
    if (!blk.k0 && std::abs(blk.d(k)) > tau) blk.k0 = static_cast<int>(k);
    if (blk.real_flag && std::abs(blk.d(k).imag()) > tau) {
      blk.k1 = static_cast<int>(k);
      blk.real_flag = false;
    }
  }
  const AmSeq back = am_of(blk.d);
  double r2 = (back.a - am.a).squaredNorm();
  if (am.a_deriv.size() == back.a_deriv.size()) r2 += (back.a_deriv - am.a_deriv).squaredNorm();
  blk.residual = std::sqrt(r2);
  return blk;
}

// The A_m data are linear in S = Re(d d^H): A_m sums antidiagonal m of S,
// A'_m the same cells weighted by j(m-j). Antidiagonals with at most two
// cells solve as tiny linear systems; the rest (only present for N >= 5)
// are taken from the sweep estimate. Eigen-factoring the assembled S gives
// a branch-free candidate that is immune to the sweep's ill-conditioned
// gauge near real-valued blocks.
LocalBlock gram_route_block(const AmSeq& am, const Eigen::VectorXcd& hint,
                            const Tolerances& tol) {
  const int n = am.order;
  Eigen::MatrixXd s(n, n);
  if (hint.size() == n) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s(i, j) = (hint(i) * std::conj(hint(j))).real();
  } else {
    s.setZero();
  }

  // Data projection: each antidiagonal m carries the equations
  // sum_i mu_i c_i = A_m and sum_i mu_i w_i c_i = A'_m (mu = 1 on the
  // diagonal, 2 off it; w = j(m-j)). Antidiagonals with <= 2 cells are
  // solved outright; larger ones (N >= 5) are projected onto the affine
  // solution set in the Frobenius metric.
  bool has_gap = false;
  auto project_data = [&](Eigen::MatrixXd& dst) {
    for (int m = 0; m <= 2 * n - 2; ++m) {
      std::vector<std::pair<int, int>> cells;  // (j, m-j), j <= m-j
      for (int j = std::max(0, m - n + 1); 2 * j <= m; ++j)
        if (m - j < n) cells.emplace_back(j, m - j);
      auto mult = [](const std::pair<int, int>& c) { return c.first == c.second ? 1.0 : 2.0; };
      auto wgt = [](const std::pair<int, int>& c) {
        return static_cast<double>(c.first) * static_cast<double>(c.second);
      };
      if (cells.size() == 1) {
        dst(cells[0].first, cells[0].second) = am.a(m) / mult(cells[0]);
      } else if (cells.size() == 2 && m >= 2) {
        const double m1 = mult(cells[0]), m2 = mult(cells[1]);
        const double w1 = wgt(cells[0]), w2 = wgt(cells[1]);
        const double det = m1 * m2 * (w2 - w1);
        const double b1 = am.a(m), b2 = am.ad_at(m);
        dst(cells[0].first, cells[0].second) = (b1 * m2 * w2 - b2 * m2) / det;
        dst(cells[1].first, cells[1].second) = (b2 * m1 - b1 * m1 * w1) / det;
      } else if (m >= 2) {
        has_gap = true;
        // minimize sum mu_i (c_i' - c_i)^2 subject to both equations:
        // c_i' = c_i + t1 + t2 w_i with a 2x2 SPD system for (t1, t2)
        double smu = 0.0, smuw = 0.0, smuww = 0.0, r1 = am.a(m), r2 = am.ad_at(m);
        for (const auto& c : cells) {
          const double mu = mult(c), w = wgt(c), v = dst(c.first, c.second);
          smu += mu;
          smuw += mu * w;
          smuww += mu * w * w;
          r1 -= mu * v;
          r2 -= mu * w * v;
        }
        const double det = smu * smuww - smuw * smuw;
        const double t1 = (r1 * smuww - r2 * smuw) / det;
        const double t2 = (smu * r2 - smuw * r1) / det;
        for (const auto& c : cells) dst(c.first, c.second) += t1 + t2 * wgt(c);
      }
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) dst(j, i) = dst(i, j);
  };
  project_data(s);

  if (has_gap) {
    // Alternating projection between the rank-<=2 PSD cone and the data
    // equations; resolves the underdetermined antidiagonals (N >= 5) far
    // more stably than the sequential sweep when its gauge degenerates.
    const double sscale = std::max(s.cwiseAbs().maxCoeff(), 1e-300);
    Eigen::MatrixXd cur = s;
    for (int it = 0; it < 200; ++it) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e(cur);
      Eigen::MatrixXd next = Eigen::MatrixXd::Zero(n, n);
      for (int i = n - 1; i >= std::max(0, n - 2); --i) {
        const double lam = e.eigenvalues()(i);
        if (lam > 0.0) next += lam * e.eigenvectors().col(i) * e.eigenvectors().col(i).transpose();
      }
      project_data(next);
      const double delta = (next - cur).norm();
      cur = next;
      if (delta < 1e-15 * sscale) break;
    }
    s = cur;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  const Eigen::VectorXd& ev = eig.eigenvalues();
  const double l1 = std::max(ev(n - 1), 0.0);
  double l2 = (n >= 2) ? std::max(ev(n - 2), 0.0) : 0.0;
  if (l2 < 1e-12 * l1) l2 = 0.0;  // rank-1 dust would surface as sqrt(eps) imaginary parts
  LocalBlock blk;
  blk.d.resize(n);
  for (int k = 0; k < n; ++k)
    blk.d(k) = {std::sqrt(l1) * eig.eigenvectors()(k, n - 1),
                (n >= 2) ? std::sqrt(l2) * eig.eigenvectors()(k, n - 2) : 0.0};

  // canonical form and index metadata
  const double dmax = blk.d.cwiseAbs().maxCoeff();
  const double tau = std::max(tol.am_zero_rel, 1e-12) * std::max(dmax, 1e-300);
  for (int k = 0; k < n; ++k)
    if (std::abs(blk.d(k)) > tau) {
      blk.d *= std::abs(blk.d(k)) / blk.d(k);
      blk.k0 = k;
      break;
    }
  blk.real_flag = true;
  for (int k = 0; k < n; ++k)
    if (std::abs(blk.d(k).imag()) > tau) {
      if (blk.d(k).imag() < 0.0) blk.d = blk.d.conjugate();
      blk.k1 = k;
      blk.real_flag = false;
      break;
    }
  const AmSeq back = am_of(blk.d);
  double r2 = (back.a - am.a).squaredNorm();
  if (am.a_deriv.size() == back.a_deriv.size()) r2 += (back.a_deriv - am.a_deriv).squaredNorm();
  blk.residual = std::sqrt(r2);
  return blk;
}

}  // namespace

LocalBlock recover_block(const AmSeq& am, const Tolerances& tol) {
  LocalBlock blk = sweep_block(am, tol, tol.am_zero_rel);
  const double scale = std::max(am.a.size() ? am.a.cwiseAbs().maxCoeff() : 0.0,
                                am.a_deriv.size() ? am.a_deriv.cwiseAbs().maxCoeff() : 0.0);
  const double floor = std::max(2e-13 * scale, am.accuracy);
  if (blk.residual <= floor) return blk;

  // A residual above the data accuracy means an index decision missed a
  // tiny entry or the canonical gauge is ill-conditioned (nearly parallel
  // leading entries). Deterministic fallbacks: the sweep rerun near machine
  // threshold, the sweep of the reversed data, the linear Gram assembly.
  // Adoption: a fallback wins on a decisive residual drop; on residual ties
  // the real-valued candidate wins (magnitude data cannot tell the
  // difference, and the decomposition convention keeps tails real).
  // Residuals are clamped at the floor: fitting below the data accuracy
  // only models the solver's rounding junk.
  auto better = [floor](const LocalBlock& cand, const LocalBlock& cur) {
    const double rc = std::max(cand.residual, floor);
    const double ru = std::max(cur.residual, floor);
    if (rc < 0.3 * ru) return true;
    return rc <= 3.0 * ru && cand.real_flag && !cur.real_flag;
  };
  if (tol.am_zero_rel > 4e-15) {
    try {
      LocalBlock retry = sweep_block(am, tol, 4e-15);
      if (better(retry, blk)) {
        retry.j = blk.j;
        blk = retry;
      }
    } catch (const RecoveryError&) {
    }
  }
  const AmSeq rev = reverse_am(am);
  for (double eta : {tol.am_zero_rel, 4e-15}) {
    try {
      const LocalBlock rb = sweep_block(rev, tol, eta);
      LocalBlock cand = make_block_from(rb.d.reverse(), am, tol);
      if (better(cand, blk)) {
        cand.j = blk.j;
        blk = cand;
      }
    } catch (const RecoveryError&) {
    }
  }
  LocalBlock gram = gram_route_block(am, blk.d, tol);
  if (better(gram, blk)) {
    gram.j = blk.j;
    blk = gram;
  }
  return blk;
}

}  // namespace cpr
