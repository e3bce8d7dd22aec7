#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <vector>

namespace cpr {

using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

// Accepts "p", "-p", "p/q" (as produced by rational_to_string).
Rational rational_from_string(const std::string& s);
std::string rational_to_string(const Rational& r);

// Dense univariate polynomials with exact coefficients, ascending powers.
using RatPoly = std::vector<Rational>;

Rational poly_eval(const RatPoly& p, const Rational& x);
RatPoly poly_derivative(const RatPoly& p);
RatPoly poly_antiderivative(const RatPoly& p);  // constant term 0
RatPoly poly_shift(const RatPoly& p, const Rational& a);  // x -> p(x + a)
RatPoly poly_affine(const RatPoly& p, const Rational& a, const Rational& b);  // x -> p(a x + b)
RatPoly poly_mul(const RatPoly& p, const RatPoly& q);
RatPoly poly_sub(const RatPoly& p, const RatPoly& q);

// Rank of a dense rational matrix by exact Gaussian elimination.
int rational_matrix_rank(std::vector<std::vector<Rational>> rows);

}  // namespace cpr
