#include "cpr/gram_recovery.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cpr/errors.hpp"

namespace cpr {

namespace {

// Row of the sample-to-Gram system at node x: diagonal entries phi_m^2,
// off-diagonal 2 phi_m phi_n, ordered (0,0),(0,1),...,(L-1,L-1).
Eigen::VectorXd outer_row(const Generator& g, double x) {
  const int L = g.support_length();
  Eigen::VectorXd phi(L);
  for (int m = 0; m < L; ++m) phi(m) = g.eval(x + L - 1 - m);
  Eigen::VectorXd row(L * (L + 1) / 2);
  int idx = 0;
  for (int m = 0; m < L; ++m)
    for (int n = m; n < L; ++n) row(idx++) = (m == n) ? phi(m) * phi(n) : 2.0 * phi(m) * phi(n);
  return row;
}

}  // namespace

SymBasisSystem build_basis_system(const Generator& g, std::vector<double> trial_nodes,
                                  const Tolerances& tol) {
  const int L = g.support_length();
  const int target = L * (L + 1) / 2;
  if (trial_nodes.empty()) {
    trial_nodes.resize(200);
    for (int i = 0; i < 200; ++i) trial_nodes[i] = (i + 1) / 201.0;
  }

  SymBasisSystem sys;
  sys.window = L;
  // Greedy pivoted selection: accept the candidate with the largest
  // orthogonal residual each round (rank grows by one per accepted node),
  // stop when no candidate clears the rank threshold.
  std::vector<Eigen::VectorXd> ortho;
  std::vector<Eigen::VectorXd> rows;
  std::vector<char> used(trial_nodes.size(), 0);
  while (static_cast<int>(rows.size()) < target) {
    int best = -1;
    double best_resid = 0.0;
    Eigen::VectorXd best_row;
    for (std::size_t i = 0; i < trial_nodes.size(); ++i) {
      if (used[i]) continue;
      Eigen::VectorXd row = outer_row(g, trial_nodes[i]);
      const double nrm = row.norm();
      if (nrm <= 0.0) continue;
      Eigen::VectorXd resid = row;
      for (const auto& q : ortho) resid -= q.dot(resid) * q;
      const double r = resid.norm();
      if (r > tol.basis_rank_rel * nrm && r > best_resid) {
        best_resid = r;
        best = static_cast<int>(i);
        best_row = std::move(row);
      }
    }
    if (best < 0) break;
    used[best] = 1;
    Eigen::VectorXd resid = best_row;
    for (const auto& q : ortho) resid -= q.dot(resid) * q;
    ortho.push_back(resid.normalized());
    rows.push_back(std::move(best_row));
    sys.nodes.push_back(trial_nodes[best]);
  }
  if (static_cast<int>(rows.size()) < target)
    throw RecoveryError("spanning property fails: achieved dimension " +
                        std::to_string(rows.size()) + " of " + std::to_string(target));

  // keep nodes ascending; sampling and CSV output follow this order
  std::vector<int> order(target);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return sys.nodes[a] < sys.nodes[b]; });
  std::vector<double> sorted_nodes(target);
  sys.A.resize(target, target);
  for (int r = 0; r < target; ++r) {
    sorted_nodes[r] = sys.nodes[order[r]];
    sys.A.row(r) = rows[order[r]];
  }
  sys.nodes = std::move(sorted_nodes);
  sys.lu.compute(sys.A);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.A);
  sys.cond = svd.singularValues()(0) / svd.singularValues()(target - 1);
  return sys;
}

Eigen::MatrixXd gram_from_samples(const SymBasisSystem& sys, const std::vector<double>& values) {
  const int L = sys.window;
  const int target = L * (L + 1) / 2;
  if (static_cast<int>(values.size()) != target)
    throw SpecError("gram_from_samples: expected L(L+1)/2 values");
  const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(values.data(), target);
  Eigen::VectorXd x = sys.lu.solve(v);
  // one refinement step with a long double residual
  Eigen::VectorXd r(target);
  for (int i = 0; i < target; ++i) {
    long double acc = v(i);
    for (int j = 0; j < target; ++j)
      acc -= static_cast<long double>(sys.A(i, j)) * static_cast<long double>(x(j));
    r(i) = static_cast<double>(acc);
  }
  x += sys.lu.solve(r);
  Eigen::MatrixXd gram(L, L);
  int idx = 0;
  for (int m = 0; m < L; ++m)
    for (int n = m; n < L; ++n) {
      gram(m, n) = x(idx);
      gram(n, m) = x(idx);
      ++idx;
    }
  return gram;
}

Eigen::VectorXcd canonicalize_window(const Eigen::VectorXcd& w, double rel_tol) {
  const double amax = w.size() ? w.cwiseAbs().maxCoeff() : 0.0;
  if (amax <= 0.0) return w;
  const double tau = rel_tol * amax;
  Eigen::VectorXcd out = w;
  for (Eigen::Index k = 0; k < out.size(); ++k) {
    if (std::abs(out(k)) > tau) {
      out *= std::abs(out(k)) / out(k);
      break;
    }
  }
  for (Eigen::Index k = 0; k < out.size(); ++k) {
    if (std::abs(out(k).imag()) > tau) {
      if (out(k).imag() < 0.0) out = out.conjugate();
      break;
    }
  }
  return out;
}

Eigen::VectorXcd factor_gram(const Eigen::MatrixXd& gram, const Tolerances& tol) {
  const int L = static_cast<int>(gram.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (gram + gram.transpose()));
  const Eigen::VectorXd& ev = eig.eigenvalues();  // ascending
  const double scale = std::max(std::abs(gram.trace()), ev.cwiseAbs().maxCoeff());
  const double tau = tol.gram_rank_rel * std::max(scale, 1e-300);

  double defect = 0.0;
  for (int i = 0; i < L - 2; ++i) defect = std::max(defect, std::abs(ev(i)));
  if (L >= 2 && ev(L - 2) < 0.0) defect = std::max(defect, -ev(L - 2));
  if (ev(L - 1) < 0.0) defect = std::max(defect, -ev(L - 1));
  if (defect > tau)
    throw RecoveryError("Gram not rank <= 2: inconsistent data");

  const double l1 = std::max(ev(L - 1), 0.0);
  double l2 = (L >= 2) ? std::max(ev(L - 2), 0.0) : 0.0;
  if (l2 < 1e-12 * l1) l2 = 0.0;  // rank-1 dust would become sqrt(eps) imaginary parts
  Eigen::VectorXcd w(L);
  for (int k = 0; k < L; ++k) {
    const double repart = std::sqrt(l1) * eig.eigenvectors()(k, L - 1);
    const double impart = (L >= 2) ? std::sqrt(l2) * eig.eigenvectors()(k, L - 2) : 0.0;
    w(k) = {repart, impart};
  }
  return canonicalize_window(w);
}

}  // namespace cpr
