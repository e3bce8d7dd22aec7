#include "cpr/generator.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <utility>

#include "cpr/errors.hpp"

namespace cpr {

namespace {

std::vector<double> to_doubles(const RatPoly& p, std::size_t width) {
  std::vector<double> d(width, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) d[i] = to_double(p[i]);
  return d;
}

double horner(const std::vector<double>& c, double t) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
  return acc;
}

}  // namespace

Generator::Generator(std::vector<RatPoly> pieces, int degree)
    : degree_(degree), pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw SpecError("generator needs at least one piece");
  if (degree_ < 0) throw SpecError("negative degree bound");
  for (auto& p : pieces_) {
    if (static_cast<int>(p.size()) > degree_ + 1)
      throw SpecError("piece degree exceeds the declared bound");
    p.resize(degree_ + 1, Rational(0));
  }
  // Evaluation runs on per-piece local coordinates t = x - r: the global
  // expansions of high-order pieces have large cancelling coefficients.
  pieces_d_.reserve(pieces_.size());
  deriv_d_.reserve(pieces_.size());
  for (std::size_t r = 0; r < pieces_.size(); ++r) {
    const RatPoly local = poly_shift(pieces_[r], Rational(r));
    pieces_d_.push_back(to_doubles(local, degree_ + 1));
    deriv_d_.push_back(to_doubles(poly_derivative(local), std::max(degree_, 1)));
  }
}

double Generator::eval(double x) const {
  if (!(x >= 0.0) || x >= static_cast<double>(support_length())) return 0.0;
  const int r = static_cast<int>(std::floor(x));
  return horner(pieces_d_[r], x - r);
}

double Generator::eval_deriv(double x) const {
  if (!(x >= 0.0) || x >= static_cast<double>(support_length())) return 0.0;
  const int r = static_cast<int>(std::floor(x));
  return horner(deriv_d_[r], x - r);
}

std::vector<RatPoly> Generator::derivative_pieces() const {
  std::vector<RatPoly> d;
  d.reserve(pieces_.size());
  for (const auto& p : pieces_) d.push_back(poly_derivative(p));
  return d;
}

RatPoly Generator::piece_shifted(int s) const {
  if (s < 0 || s >= support_length()) return {Rational(0)};
  return poly_shift(pieces_[s], Rational(s));
}

Rational Generator::continuity_defect() const {
  Rational worst = 0;
  const int L = support_length();
  for (int knot = 0; knot <= L; ++knot) {
    const Rational left = (knot == 0) ? Rational(0) : poly_eval(pieces_[knot - 1], Rational(knot));
    const Rational right = (knot == L) ? Rational(0) : poly_eval(pieces_[knot], Rational(knot));
    const Rational jump = abs(left - right);
    if (jump > worst) worst = jump;
  }
  return worst;
}

Rational Generator::derivative_continuity_defect() const {
  Rational worst = 0;
  const int L = support_length();
  const auto d = derivative_pieces();
  for (int knot = 0; knot <= L; ++knot) {
    const Rational left = (knot == 0) ? Rational(0) : poly_eval(d[knot - 1], Rational(knot));
    const Rational right = (knot == L) ? Rational(0) : poly_eval(d[knot], Rational(knot));
    const Rational jump = abs(left - right);
    if (jump > worst) worst = jump;
  }
  return worst;
}

nlohmann::json Generator::to_json() const {
  nlohmann::json pieces = nlohmann::json::array();
  for (const auto& p : pieces_) {
    nlohmann::json coeffs = nlohmann::json::array();
    for (const auto& c : p) coeffs.push_back(rational_to_string(c));
    pieces.push_back(coeffs);
  }
  return {{"L", support_length()}, {"degree", degree_}, {"pieces", pieces}};
}

Generator Generator::from_json(const nlohmann::json& j) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "L" && key != "degree" && key != "pieces")
      throw SpecError("unknown generator key: " + key);
  }
  if (!j.contains("L") || !j.contains("degree") || !j.contains("pieces"))
    throw SpecError("generator JSON needs L, degree and pieces");
  const int L = j.at("L").get<int>();
  const int degree = j.at("degree").get<int>();
  std::vector<RatPoly> pieces;
  for (const auto& pj : j.at("pieces")) {
    RatPoly p;
    for (const auto& cj : pj) p.push_back(rational_from_string(cj.get<std::string>()));
    pieces.push_back(std::move(p));
  }
  if (static_cast<int>(pieces.size()) != L)
    throw SpecError("generator JSON: piece count does not match L");
  return Generator(std::move(pieces), degree);
}

Generator bspline(int N) {
  if (N < 1) throw SpecError("B-spline order must be positive");
  // B_1 = indicator of [0,1); B_n(x) = F(x) - F(x-1) with F the running
  // antiderivative of B_{n-1}, assembled piece by piece.
  std::vector<RatPoly> pieces = {{Rational(1)}};
  for (int n = 2; n <= N; ++n) {
    std::vector<RatPoly> anti;
    anti.reserve(pieces.size());
    for (const auto& p : pieces) anti.push_back(poly_antiderivative(p));
    std::vector<RatPoly> next(n);
    for (int r = 0; r < n; ++r) {
      RatPoly piece = {Rational(0)};
      if (r >= 1) {
        // integral over [x-1, r) of piece r-1
        const RatPoly at_xm1 = poly_shift(anti[r - 1], Rational(-1));
        piece = poly_sub({poly_eval(anti[r - 1], Rational(r))}, at_xm1);
      }
      if (r <= n - 2) {
        // integral over [r, x] of piece r
        const RatPoly drop = poly_sub({poly_eval(anti[r], Rational(r))}, anti[r]);
        piece = poly_sub(piece, drop);
      }
      next[r] = std::move(piece);
    }
    pieces = std::move(next);
  }
  return Generator(std::move(pieces), N - 1);
}

Generator phi1() {
  auto q = [](long num, long den) { return Rational(num, den); };
  std::vector<RatPoly> pieces = {
      {q(0, 1), q(0, 1), q(0, 1), q(1, 2)},
      {q(1, 2), q(-2, 1), q(3, 1), q(-1, 1)},
      {q(-3, 2), q(5, 1), q(-3, 1), q(1, 2)},
  };
  return Generator(std::move(pieces), 3);
}

Generator fig1_generator(bool printed_form) {
  auto q = [](long num) { return Rational(num); };
  std::vector<RatPoly> pieces;
  if (printed_form) {
    // psi(2u) for the printed pieces t^2/2, -t^2+3t, t^2/2-3t.
    pieces = {
        {q(0), q(0), q(2)},
        {q(0), q(6), q(-4)},
        {q(0), q(-6), q(2)},
    };
  } else {
    // 4*B_3, the differentiable correction matching the first printed piece.
    pieces = {
        {q(0), q(0), q(2)},
        {q(-6), q(12), q(-4)},
        {q(18), q(-12), q(2)},
    };
  }
  return Generator(std::move(pieces), 3);
}

Eigen::VectorXcd LocalBasisMatrix::window_to_monomial(const Eigen::VectorXcd& w) const {
  return H.transpose().cast<std::complex<double>>() * w;
}

Eigen::VectorXcd LocalBasisMatrix::monomial_to_window(const Eigen::VectorXcd& d) const {
  if (square()) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(H.transpose());
    Eigen::VectorXcd w(H.rows());
    Eigen::VectorXd re = lu.solve(d.real());
    Eigen::VectorXd im = lu.solve(d.imag());
    w.real() = re;
    w.imag() = im;
    return w;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(H.transpose());
  Eigen::VectorXcd w(H.rows());
  w.real() = qr.solve(d.real()).eval();
  w.imag() = qr.solve(d.imag()).eval();
  return w;
}

namespace {

LocalBasisMatrix basis_matrix_impl(const Generator& g, bool symmetric) {
  const int L = g.support_length();
  const int cols = g.order();
  std::vector<std::vector<Rational>> rows(L, std::vector<Rational>(cols, Rational(0)));
  for (int r = 0; r < L; ++r) {
    RatPoly p = g.piece_shifted(L - 1 - r);
    if (symmetric) p = poly_affine(p, Rational(1, 2), Rational(1, 2));  // t = (tau+1)/2
    for (std::size_t i = 0; i < p.size() && static_cast<int>(i) < cols; ++i) rows[r][i] = p[i];
  }
  if (rational_matrix_rank(rows) < L)
    throw RecoveryError("generator lacks local linear independence on (0,1)");
  LocalBasisMatrix m;
  m.H.resize(L, cols);
  for (int r = 0; r < L; ++r)
    for (int c = 0; c < cols; ++c) m.H(r, c) = to_double(rows[r][c]);
  return m;
}

}  // namespace

LocalBasisMatrix local_basis_matrix(const Generator& g) { return basis_matrix_impl(g, false); }

LocalBasisMatrix local_basis_matrix_symmetric(const Generator& g) {
  return basis_matrix_impl(g, true);
}

}  // namespace cpr
