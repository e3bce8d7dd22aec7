#pragma once

#include <Eigen/Dense>

#include <vector>

#include "cpr/generator.hpp"
#include "cpr/tolerances.hpp"

namespace cpr {

// Node system for the spanning-property pathway: L(L+1)/2 nodes in (0,1)
// whose outer products Phi(x)Phi(x)^T form a basis of the symmetric
// matrices. Row l of A expands the node's outer product against the Gram
// unknowns (off-diagonal entries doubled), so A * vech(G) = |f|^2 values.
struct SymBasisSystem {
  int window = 0;  // L
  std::vector<double> nodes;
  Eigen::MatrixXd A;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  double cond = 0.0;
};

// Greedy selection over a uniform candidate grid (spread-first traversal);
// throws RecoveryError naming the achieved dimension when the generator
// lacks the spanning property.
SymBasisSystem build_basis_system(const Generator& g, std::vector<double> trial_nodes = {},
                                  const Tolerances& tol = Tolerances{});

// Window Gram matrix Re(c_m conj(c_n)) from the L(L+1)/2 sample values.
Eigen::MatrixXd gram_from_samples(const SymBasisSystem& sys, const std::vector<double>& values);

// Rank-<=2 factorization into a complex window, canonicalized like a local
// block (first nonzero entry real positive, first complex entry with
// positive imaginary part). Throws when the trailing spectrum is above the
// tolerance.
Eigen::VectorXcd factor_gram(const Eigen::MatrixXd& gram, const Tolerances& tol = Tolerances{});

// Canonical representative of a window/block up to a unimodular constant
// and conjugation (shared with the local-recovery convention).
Eigen::VectorXcd canonicalize_window(const Eigen::VectorXcd& w, double rel_tol = 1e-9);

}  // namespace cpr
