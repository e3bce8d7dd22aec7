#include "cpr/frame_analysis.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "cpr/errors.hpp"
#include "cpr/local_recovery.hpp"
#include "cpr/sampling.hpp"
#include "cpr/signal.hpp"

namespace cpr {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t x = seed ^ (salt * 0x9e3779b97f4a7c15ULL + 0x7f4a7c15ULL);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// vech row of a a^T with doubled off-diagonal entries, so that
// row . vech(S) = a^T S a for symmetric S.
Eigen::VectorXd moment_row(const Eigen::VectorXd& a) {
  const int n = static_cast<int>(a.size());
  Eigen::VectorXd row(n * (n + 1) / 2);
  int idx = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) row(idx++) = (i == j) ? a(i) * a(j) : 2.0 * a(i) * a(j);
  return row;
}

Eigen::MatrixXd sym_from_vech(const Eigen::VectorXd& v, int n) {
  Eigen::MatrixXd s(n, n);
  int idx = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      s(i, j) = v(idx);
      s(j, i) = v(idx);
      ++idx;
    }
  return s;
}

}  // namespace

RealFrame vandermonde_frame(int N, const std::vector<double>& gamma,
                            const std::vector<double>& gamma_prime) {
  if (N < 3) throw SpecError("vandermonde_frame requires N >= 3");
  if (static_cast<int>(gamma.size()) != 2 * N - 1)
    throw SpecError("vandermonde_frame: expected 2N-1 function nodes");
  if (static_cast<int>(gamma_prime.size()) != 2 * N - 5)
    throw SpecError("vandermonde_frame: expected 2N-5 derivative nodes");
  auto check_distinct = [](const std::vector<double>& v) {
    auto s = v;
    std::sort(s.begin(), s.end());
    for (std::size_t i = 1; i < s.size(); ++i)
      if (!(s[i] > s[i - 1])) throw SpecError("vandermonde_frame: coincident nodes");
  };
  check_distinct(gamma);
  check_distinct(gamma_prime);

  RealFrame frame;
  frame.dim = N;
  for (double g : gamma) {
    FrameVector fv;
    fv.node = g;
    fv.v.resize(N);
    double p = 1.0;
    for (int k = 0; k < N; ++k) {
      fv.v(k) = p;
      p *= g;
    }
    frame.vectors.push_back(std::move(fv));
  }
  for (double g : gamma_prime) {
    FrameVector fv;
    fv.node = g;
    fv.derivative = true;
    fv.v = Eigen::VectorXd::Zero(N);
    double p = 1.0;
    for (int k = 1; k < N; ++k) {
      fv.v(k) = k * p;
      p *= g;
    }
    frame.vectors.push_back(std::move(fv));
  }
  return frame;
}

int spanning_dimension(const Generator& g, bool use_derivative) {
  const int L = g.support_length();
  const int cols = L * (L + 1) / 2;

  auto stack_rows = [&](const std::vector<RatPoly>& entry_polys,
                        std::vector<std::vector<Rational>>& rows) {
    // Phi(x)Phi(x)^T entrywise products, collected per power of x.
    std::size_t max_deg = 0;
    std::vector<std::vector<RatPoly>> prod(L, std::vector<RatPoly>(L));
    for (int m = 0; m < L; ++m)
      for (int n = m; n < L; ++n) {
        prod[m][n] = poly_mul(entry_polys[m], entry_polys[n]);
        max_deg = std::max(max_deg, prod[m][n].size());
      }
    for (std::size_t t = 0; t < max_deg; ++t) {
      std::vector<Rational> row(cols, Rational(0));
      int idx = 0;
      bool nonzero = false;
      for (int m = 0; m < L; ++m)
        for (int n = m; n < L; ++n) {
          if (t < prod[m][n].size() && prod[m][n][t] != 0) {
            row[idx] = prod[m][n][t];
            nonzero = true;
          }
          ++idx;
        }
      if (nonzero) rows.push_back(std::move(row));
    }
  };

  std::vector<RatPoly> entries(L);
  for (int m = 0; m < L; ++m) entries[m] = g.piece_shifted(L - 1 - m);
  std::vector<std::vector<Rational>> rows;
  stack_rows(entries, rows);
  if (use_derivative) {
    std::vector<RatPoly> dentries(L);
    for (int m = 0; m < L; ++m) dentries[m] = poly_derivative(entries[m]);
    stack_rows(dentries, rows);
  }
  return rational_matrix_rank(std::move(rows));
}

bool cpr_sufficient(const RealFrame& frame) {
  const int n = frame.dim;
  const int cols = n * (n + 1) / 2;
  if (static_cast<int>(frame.vectors.size()) < cols) return false;
  Eigen::MatrixXd m(frame.vectors.size(), cols);
  for (std::size_t r = 0; r < frame.vectors.size(); ++r) m.row(r) = moment_row(frame.vectors[r].v);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
  qr.setThreshold(1e-9);
  return qr.rank() == cols;
}

CertifyReport certify_by_recovery(const RealFrame& frame, int trials, std::uint64_t seed) {
  const int N = frame.dim;
  std::vector<double> gamma, gamma_prime;
  for (const auto& fv : frame.vectors) (fv.derivative ? gamma_prime : gamma).push_back(fv.node);
  NodeSet nodes = nodes_from_list(gamma);
  nodes.gamma_prime = gamma_prime;
  HermiteSampleSolver solver(nodes, N);

  CertifyReport rep;
  rep.trials = trials;
  double sum = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(mix_seed(seed, t));
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXcd x(N);
    for (int k = 0; k < N; ++k) x(k) = {gauss(rng), gauss(rng)};

    std::vector<double> vf, vdf;
    for (const auto& fv : frame.vectors) {
      std::complex<double> ip{0.0, 0.0};
      for (int k = 0; k < N; ++k) ip += fv.v(k) * x(k);
      (fv.derivative ? vdf : vf).push_back(std::norm(ip));
    }
    double dist;
    try {
      // recover on the symmetric coordinate, map the monomial vector back
      const LocalBlock blk = recover_block(solver.solve_symmetric(vf, vdf));
      Eigen::VectorXcd dt = Eigen::VectorXcd::Zero(N);
      for (int k = 0; k < N; ++k) {
        // (2t-1)^k expanded into powers of t
        double binom = 1.0;
        for (int i = 0; i <= k; ++i) {
          dt(i) += blk.d(k) * binom * std::pow(2.0, i) * ((k - i) % 2 ? -1.0 : 1.0);
          binom = binom * (k - i) / (i + 1.0);
        }
      }
      dist = dist_up_to_equiv(dt, x) / x.norm();
    } catch (const RecoveryError&) {
      dist = std::numeric_limits<double>::infinity();
      ++rep.failures;
    }
    rep.max_dist = std::max(rep.max_dist, dist);
    sum += dist;
  }
  rep.mean_dist = trials > 0 ? sum / trials : 0.0;
  return rep;
}

nlohmann::json FalsifyReport::to_json() const {
  const char* s = status == FalsifyStatus::certificate     ? "certificate"
                  : status == FalsifyStatus::inconclusive  ? "inconclusive"
                                                           : "rank_deficient";
  nlohmann::json j = {{"status", s},
                      {"restarts_used", restarts_used},
                      {"residual", residual},
                      {"separation", separation},
                      {"note", note}};
  if (status == FalsifyStatus::certificate) {
    nlohmann::json xr = nlohmann::json::array(), xi = nlohmann::json::array();
    nlohmann::json yr = nlohmann::json::array(), yi = nlohmann::json::array();
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      xr.push_back(x(k).real());
      xi.push_back(x(k).imag());
      yr.push_back(y(k).real());
      yi.push_back(y(k).imag());
    }
    j["x_re"] = xr;
    j["x_im"] = xi;
    j["y_re"] = yr;
    j["y_im"] = yi;
  }
  return j;
}

FalsifyReport falsify_cpr(const RealFrame& frame, int restarts, std::uint64_t seed) {
  FalsifyReport rep;
  const int n = frame.dim;
  const int cols = n * (n + 1) / 2;

  Eigen::MatrixXd fm(frame.vectors.size(), n);
  for (std::size_t r = 0; r < frame.vectors.size(); ++r) fm.row(r) = frame.vectors[r].v;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> fqr(fm);
  fqr.setThreshold(1e-9);
  if (fqr.rank() < n) {
    rep.status = FalsifyStatus::rank_deficient;
    rep.note = "frame rank below N; the null-space condition does not apply";
    return rep;
  }

  Eigen::MatrixXd moment(frame.vectors.size(), cols);
  for (std::size_t r = 0; r < frame.vectors.size(); ++r)
    moment.row(r) = moment_row(frame.vectors[r].v);

  // Null space of the moment map restricted to symmetric matrices.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(moment, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  std::vector<Eigen::MatrixXd> basis;
  for (int i = 0; i < cols; ++i) {
    const double s = (i < sv.size()) ? sv(i) : 0.0;
    if (s <= 1e-10 * std::max(smax, 1.0)) {
      Eigen::MatrixXd b = sym_from_vech(svd.matrixV().col(i), n);
      b /= b.norm();  // Frobenius-normalized
      basis.push_back(std::move(b));
    }
  }
  if (basis.empty()) {
    rep.note = "moment map has trivial symmetric null space";
    return rep;
  }
  // Frobenius orthonormalization keeps ||S(s)||_F = ||s||_2.
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j)
      basis[i] -= (basis[i].cwiseProduct(basis[j])).sum() * basis[j];
    const double nrm = basis[i].norm();
    if (nrm > 1e-12) basis[i] /= nrm;
  }

  const int dim = static_cast<int>(basis.size());
  auto assemble = [&](const Eigen::VectorXd& s) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < dim; ++i) m += s(i) * basis[i];
    return m;
  };

  // Penalty: squared eigenvalues beyond the two largest positive and two
  // most negative ones; zero exactly on Re(xx* - yy*) shapes.
  auto penalty_grad = [&](const Eigen::VectorXd& s, Eigen::VectorXd* grad) {
    const Eigen::MatrixXd m = assemble(s);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    const Eigen::VectorXd& ev = eig.eigenvalues();  // ascending
    double pen = 0.0;
    if (grad) grad->setZero(dim);
    for (int i = 0; i < n; ++i) {
      const bool excess_pos = ev(i) > 0.0 && i < n - 2;   // beyond two largest
      const bool excess_neg = ev(i) < 0.0 && i > 1;       // beyond two smallest
      if (!excess_pos && !excess_neg) continue;
      pen += ev(i) * ev(i);
      if (grad) {
        const Eigen::VectorXd v = eig.eigenvectors().col(i);
        for (int b = 0; b < dim; ++b) (*grad)(b) += 2.0 * ev(i) * v.dot(basis[b] * v);
      }
    }
    return pen;
  };

  for (int restart = 0; restart < restarts; ++restart) {
    rep.restarts_used = restart + 1;
    std::mt19937_64 rng(mix_seed(seed, 0xfa15ULL + restart));
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd s(dim);
    for (int i = 0; i < dim; ++i) s(i) = gauss(rng);
    s.normalize();

    double step = 0.3;
    Eigen::VectorXd grad(dim);
    double pen = penalty_grad(s, &grad);
    for (int it = 0; it < 400 && pen > 1e-24; ++it) {
      Eigen::VectorXd cand = (s - step * grad).normalized();
      const double pc = penalty_grad(cand, nullptr);
      if (pc < pen) {
        s = cand;
        pen = pc;
        penalty_grad(s, &grad);
        step *= 1.5;
      } else {
        step *= 0.5;
        if (step < 1e-12) break;
      }
    }
    if (pen > 1e-22) continue;

    // Split the (2,2)-signature matrix into x (positive part) and y
    // (negative part) and verify the certificate independently.
    const Eigen::MatrixXd m = assemble(s);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    const Eigen::VectorXd& ev = eig.eigenvalues();
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(n), y = Eigen::VectorXcd::Zero(n);
    auto add_part = [&](Eigen::VectorXcd& dst, int idx, double lambda, bool imagpart) {
      const Eigen::VectorXd v = eig.eigenvectors().col(idx);
      for (int k = 0; k < n; ++k) {
        const double amp = std::sqrt(std::abs(lambda)) * v(k);
        dst(k) += imagpart ? cplx{0.0, amp} : cplx{amp, 0.0};
      }
    };
    bool first_pos = true, first_neg = true;
    for (int i = n - 1; i >= std::max(0, n - 2); --i)
      if (ev(i) > 0.0) {
        add_part(x, i, ev(i), !first_pos);
        first_pos = false;
      }
    for (int i = 0; i < std::min(2, n); ++i)
      if (ev(i) < 0.0) {
        add_part(y, i, ev(i), !first_neg);
        first_neg = false;
      }

    double resid = 0.0;
    for (const auto& fv : frame.vectors) {
      cplx ipx{0.0, 0.0}, ipy{0.0, 0.0};
      for (int k = 0; k < n; ++k) {
        ipx += fv.v(k) * x(k);
        ipy += fv.v(k) * y(k);
      }
      resid = std::max(resid, std::abs(std::norm(ipx) - std::norm(ipy)));
    }
    const double sep = dist_up_to_equiv(x, y);
    const double snorm = (x.squaredNorm() + y.squaredNorm());
    if (resid < 1e-10 * std::max(1.0, snorm) && m.norm() > 1e-6 &&
        sep > 1e-6 * std::sqrt(std::max(snorm, 1e-30))) {
      rep.status = FalsifyStatus::certificate;
      rep.residual = resid;
      rep.separation = sep;
      rep.x = x;
      rep.y = y;
      return rep;
    }
  }
  rep.note = "no certificate within the restart budget";
  return rep;
}

}  // namespace cpr
