#pragma once

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include <vector>

#include "cpr/rational.hpp"

namespace cpr {

// Compactly supported real piecewise polynomial. Piece r is the polynomial
// on [r, r+1); the function vanishes outside [0, L]. The degree bound is
// independent of the support length (phi1 has cubic pieces on three
// intervals).
class Generator {
 public:
  Generator(std::vector<RatPoly> pieces, int degree);

  int support_length() const { return static_cast<int>(pieces_.size()); }
  int degree() const { return degree_; }
  int order() const { return degree_ + 1; }

  double eval(double x) const;
  double eval_deriv(double x) const;

  const std::vector<RatPoly>& pieces() const { return pieces_; }
  std::vector<RatPoly> derivative_pieces() const;

  // Exact monomial expansion of t -> phi(t + s) on (0,1), s integer.
  RatPoly piece_shifted(int s) const;

  // Max jump across the interior/exterior knots, evaluated exactly.
  Rational continuity_defect() const;
  Rational derivative_continuity_defect() const;

  nlohmann::json to_json() const;
  static Generator from_json(const nlohmann::json& j);

 private:
  int degree_;
  std::vector<RatPoly> pieces_;
  std::vector<std::vector<double>> pieces_d_;  // doubles cached for eval
  std::vector<std::vector<double>> deriv_d_;
};

// B-spline of order N (support length N, degree N-1), exact coefficients.
Generator bspline(int N);

// The cubic generator with support length 3 used as the spanning-property
// example; its pieces are x^3/2, -x^3+3x^2-2x+1/2, x^3/2-3x^2+5x-3/2.
Generator phi1();

// Normalized (unit-shift) form of the dilated quadratic generator from the
// reconstruction experiment, stored with cubic degree bound so the Hermite
// pathway runs with order 4 (7 function + 3 derivative nodes per interval).
// The printed variant keeps the non-differentiable middle piece verbatim.
Generator fig1_generator(bool printed_form = false);

// Rows map shift coefficients to monomial coefficients on the local
// coordinate t = x - j in (0,1): row r holds the monomial expansion of
// phi(t + L-1-r), matching the window order (c_{j-L+1}, ..., c_j).
// f|_(j,j+1)(j+t) = w^T H m(t), so the monomial vector is d = H^T w.
struct LocalBasisMatrix {
  Eigen::MatrixXd H;  // L x (degree+1)
  bool square() const { return H.rows() == H.cols(); }

  // d = H^T w (exact linear map).
  Eigen::VectorXcd window_to_monomial(const Eigen::VectorXcd& w) const;
  // Solves H^T w = d; least squares when the degree bound exceeds L-1.
  Eigen::VectorXcd monomial_to_window(const Eigen::VectorXcd& d) const;
};

// Throws RecoveryError when the shifted pieces are linearly dependent on
// (0,1) (rank below L, checked exactly).
LocalBasisMatrix local_basis_matrix(const Generator& g);

// Same rows expressed in the symmetric local coordinate tau = 2t - 1 in
// (-1,1); monomial systems condition far better there, so the recovery
// pipeline works in tau internally.
LocalBasisMatrix local_basis_matrix_symmetric(const Generator& g);

}  // namespace cpr
