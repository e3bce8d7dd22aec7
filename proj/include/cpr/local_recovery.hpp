#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "cpr/sampling.hpp"
#include "cpr/tolerances.hpp"

namespace cpr {

// Autocorrelation coefficients of a local polynomial p(t) = sum d_k t^k:
// |p(t)|^2 = sum_m a[m] t^m and |p'(t)|^2 = sum_m a_deriv[m-2] t^(m-2).
// a has length 2N-1 (A_0..A_{2N-2}), a_deriv length 2N-3 (A'_2..A'_{2N-2}).
struct AmSeq {
  int order = 0;  // N
  Eigen::VectorXd a;
  Eigen::VectorXd a_deriv;
  // Estimated absolute accuracy of the entries (conditioning times input
  // precision); fits below this level are indistinguishable.
  double accuracy = 0.0;

  double a_at(int m) const { return a(m); }
  double ad_at(int m) const { return a_deriv(m - 2); }  // m >= 2
};

// Forward map (test oracle): A_m(d) and A_m(d') with d'_k = k d_k.
AmSeq am_of(const Eigen::VectorXcd& d);

// Vandermonde-based solver for one node set; factors once, reused per
// interval. Nodes are normalized by the period; derivative sample values
// are rescaled by period^2 accordingly.
struct LocalBlock;

class HermiteSampleSolver {
 public:
  HermiteSampleSolver(const NodeSet& nodes, int order);

  // A_m on the local coordinate t in (0,1), the coordinate of the public
  // contracts and of the Vandermonde frames.
  AmSeq solve(const std::vector<double>& values_f, const std::vector<double>& values_df) const;

  // A_m on the symmetric coordinate tau = 2t - 1; far better conditioned,
  // used by the recovery pipeline together with the symmetric basis matrix.
  AmSeq solve_symmetric(const std::vector<double>& values_f,
                        const std::vector<double>& values_df) const;

  int order() const { return order_; }
  double cond_f() const { return cond_f_; }
  double cond_df() const { return cond_df_; }
  bool cond_warning(double threshold = 1e12) const {
    return cond_f_ > threshold || cond_df_ > threshold;
  }

 private:
  struct System {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_f, lu_df;
    Eigen::MatrixXd vand_f, vand_df;
    std::vector<double> nodes_f, nodes_df;
    double cond_f = 0.0, cond_df = 0.0;
  };
  AmSeq solve_with(const System& sys, const std::vector<double>& values_f,
                   const std::vector<double>& values_df, double deriv_scale) const;

  int order_;
  double period_;
  System unit_;  // coordinate t in (0,1)
  System sym_;   // coordinate tau in (-1,1)
  double cond_f_ = 0.0;
  double cond_df_ = 0.0;
};

AmSeq am_from_samples(const std::vector<double>& values_f, const std::vector<double>& values_df,
                      const NodeSet& nodes);

// Per-interval recovery output: monomial coefficients determined up to a
// unimodular constant and conjugation, stored canonically (d_{k0} real
// positive, Im d_{k1} positive when a complex entry exists).
struct LocalBlock {
  int j = 0;
  Eigen::VectorXcd d;
  std::optional<int> k0;
  std::optional<int> k1;
  bool real_flag = false;  // block is real-valued up to a phase
  double residual = 0.0;   // || am_of(d) - am ||
};

// Constructive conjugate phase retrieval from the A_m data: real-assumption
// sweep locating k0, then the complex continuation from k1 once the
// magnitude/real-part mismatch appears.
LocalBlock recover_block(const AmSeq& am, const Tolerances& tol = Tolerances{});

}  // namespace cpr
