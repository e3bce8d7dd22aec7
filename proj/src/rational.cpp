#include "cpr/rational.hpp"

#include <algorithm>
#include <stdexcept>

namespace cpr {

Rational rational_from_string(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  const auto slash = s.find('/');
  if (slash == std::string::npos) {
    return Rational(boost::multiprecision::cpp_int(s));
  }
  boost::multiprecision::cpp_int num(s.substr(0, slash));
  boost::multiprecision::cpp_int den(s.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("zero denominator in rational literal");
  return Rational(num, den);
}

std::string rational_to_string(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

Rational poly_eval(const RatPoly& p, const Rational& x) {
  Rational acc = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

RatPoly poly_derivative(const RatPoly& p) {
  if (p.size() <= 1) return {};
  RatPoly d(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = p[i] * Rational(i);
  return d;
}

RatPoly poly_antiderivative(const RatPoly& p) {
  RatPoly a(p.size() + 1);
  a[0] = 0;
  for (std::size_t i = 0; i < p.size(); ++i) a[i + 1] = p[i] / Rational(i + 1);
  return a;
}

RatPoly poly_shift(const RatPoly& p, const Rational& a) {
  // Horner in (x + a): acc <- acc*(x+a) + c.
  RatPoly acc;
  for (auto it = p.rbegin(); it != p.rend(); ++it) {
    RatPoly next(acc.size() + 1);
    for (std::size_t i = 0; i < acc.size(); ++i) {
      next[i + 1] += acc[i];
      next[i] += acc[i] * a;
    }
    next.resize(std::max<std::size_t>(next.size(), 1));
    next[0] += *it;
    acc = std::move(next);
  }
  if (acc.empty()) acc = {Rational(0)};
  return acc;
}

RatPoly poly_affine(const RatPoly& p, const Rational& a, const Rational& b) {
  // Horner in (a x + b).
  RatPoly acc;
  for (auto it = p.rbegin(); it != p.rend(); ++it) {
    RatPoly next(acc.size() + 1);
    for (std::size_t i = 0; i < acc.size(); ++i) {
      next[i + 1] += acc[i] * a;
      next[i] += acc[i] * b;
    }
    next.resize(std::max<std::size_t>(next.size(), 1));
    next[0] += *it;
    acc = std::move(next);
  }
  if (acc.empty()) acc = {Rational(0)};
  return acc;
}

RatPoly poly_mul(const RatPoly& p, const RatPoly& q) {
  if (p.empty() || q.empty()) return {};
  RatPoly r(p.size() + q.size() - 1);
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
  return r;
}

RatPoly poly_sub(const RatPoly& p, const RatPoly& q) {
  RatPoly r(std::max(p.size(), q.size()));
  for (std::size_t i = 0; i < p.size(); ++i) r[i] += p[i];
  for (std::size_t i = 0; i < q.size(); ++i) r[i] -= q[i];
  return r;
}

int rational_matrix_rank(std::vector<std::vector<Rational>> rows) {
  if (rows.empty()) return 0;
  const std::size_t ncols = rows[0].size();
  int rank = 0;
  std::size_t row = 0;
  for (std::size_t col = 0; col < ncols && row < rows.size(); ++col) {
    std::size_t pivot = row;
    while (pivot < rows.size() && rows[pivot][col] == 0) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[row], rows[pivot]);
    for (std::size_t r = row + 1; r < rows.size(); ++r) {
      if (rows[r][col] == 0) continue;
      const Rational f = rows[r][col] / rows[row][col];
      for (std::size_t c = col; c < ncols; ++c) rows[r][c] -= f * rows[row][c];
    }
    ++row;
    ++rank;
  }
  return rank;
}

}  // namespace cpr
