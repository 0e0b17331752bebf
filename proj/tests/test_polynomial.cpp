#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "skewop/errors.hpp"
#include "skewop/polynomial.hpp"
#include "skewop/potential.hpp"
#include "skewop/prec.hpp"

using namespace skewop;

TEST_CASE("precision control and decimal round trip") {
  PrecisionScope scope(256);
  CHECK(precision_bits() == 256);
  CHECK(decimal_digits_for_bits(256) >= 78);

  // round trip at full precision: pi-ish irrational built from sqrt
  Real x = sqrt(Real(2)) / 3 + Real(1) / 7;
  std::string s = to_decimal(x);
  Real y = from_decimal(s);
  CHECK(x == y);

  // nested scope changes and restores
  {
    PrecisionScope inner(128);
    CHECK(precision_bits() == 128);
  }
  CHECK(precision_bits() == 256);

  // doubles convert exactly
  CHECK(Real(0.125) == Real(1) / 8);
}

TEST_CASE("polynomial basics") {
  PrecisionScope scope(256);

  Polynomial zero;
  CHECK(zero.degree() == -1);
  CHECK(zero.eval(Real(3)) == 0);  // empty evaluates to 0
  CHECK(zero.is_zero());

  // p(x) = 1 - 2x + x^3
  Polynomial p(std::vector<Real>{Real(1), Real(-2), Real(0), Real(1)});
  CHECK(p.degree() == 3);
  CHECK(p.eval(Real(2)) == Real(1 - 4 + 8));
  CHECK(p.eval_double(2.0) == doctest::Approx(5.0));
  CHECK(p.coeff(2) == 0);
  CHECK(p.coeff(7) == 0);
  CHECK(p.leading() == 1);

  // derivative: -2 + 3x^2
  Polynomial dp = p.derivative();
  CHECK(dp.degree() == 2);
  CHECK(dp.coeff(0) == -2);
  CHECK(dp.coeff(2) == 3);

  // derivative of a constant is the zero polynomial
  CHECK(Polynomial(std::vector<Real>{Real(5)}).derivative().degree() == -1);

  // x * p shifts coefficients up
  Polynomial xp = p.mul_x();
  CHECK(xp.degree() == 4);
  CHECK(xp.coeff(0) == 0);
  CHECK(xp.coeff(1) == 1);
  CHECK(xp.coeff(4) == 1);

  // arithmetic and trimming of exact cancellation
  Polynomial q = p - p;
  CHECK(q.is_zero());
  Polynomial r = p + p;
  CHECK(r.coeff(3) == 2);
  Polynomial s = p * Real(-1);
  CHECK(s.coeff(0) == -1);
  CHECK((-p).coeff(0) == -1);

  // convolution product: (1+x)(1-x) = 1 - x^2
  Polynomial a(std::vector<Real>{Real(1), Real(1)});
  Polynomial b(std::vector<Real>{Real(1), Real(-1)});
  Polynomial ab = a * b;
  CHECK(ab.degree() == 2);
  CHECK(ab.coeff(0) == 1);
  CHECK(ab.coeff(1) == 0);
  CHECK(ab.coeff(2) == -1);

  // monomial helper
  Polynomial m = Polynomial::monomial(5, Real(3));
  CHECK(m.degree() == 5);
  CHECK(m.coeff(5) == 3);
}

TEST_CASE("potential validation and evaluation") {
  PrecisionScope scope(256);

  // Gaussian conventions used throughout: beta=1 has V = x^2/2, beta=4 has
  // V = x^2.
  Potential g1(std::vector<double>{0.0, 1.0});
  CHECK(g1.d() == 1);
  CHECK(g1.is_even());
  CHECK(g1.is_even_quadratic());
  CHECK(g1.V(2.0) == doctest::Approx(2.0));
  CHECK(to_double(g1.V(Real(2))) == doctest::Approx(2.0));
  CHECK(to_double(g1.Vprime(Real(2))) == doctest::Approx(2.0));

  Potential g4(std::vector<double>{0.0, 2.0});
  CHECK(g4.V(3.0) == doctest::Approx(9.0));

  // quartic V = x^2/2 + x^4/4 (u = [0,1,0,1])
  Potential q(std::vector<double>{0.0, 1.0, 0.0, 1.0});
  CHECK(q.d() == 3);
  CHECK(q.is_even());
  CHECK(!q.is_even_quadratic());
  CHECK(q.V(2.0) == doctest::Approx(2.0 + 4.0));
  CHECK(q.Vprime_poly().degree() == 3);
  CHECK(to_double(q.Vprime_poly().coeff(1)) == doctest::Approx(1.0));
  CHECK(to_double(q.Vprime(Real(2))) == doctest::Approx(2.0 + 8.0));

  // asymmetric potential is legal as long as d is odd and u_{d+1} > 0
  Potential asym(std::vector<double>{0.5, 1.0});
  CHECK(!asym.is_even());
  CHECK(!asym.is_even_quadratic());
  CHECK(asym.V(1.0) == doctest::Approx(1.0));  // x/2 + x^2/2 at 1

  // rejections
  CHECK_THROWS_AS(Potential(std::vector<double>{}), ValidationError);
  CHECK_THROWS_AS(Potential(std::vector<double>{1.0}), ValidationError);  // d even
  CHECK_THROWS_AS(Potential(std::vector<double>{0.0, -1.0}), ValidationError);
  CHECK_THROWS_AS(Potential(std::vector<double>{0.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(
      Potential(std::vector<double>{0.0, std::nan("")}), ValidationError);
}
