#include <doctest.h>

#include <cmath>
#include <numeric>

#include "dtnfem/quadrature.hpp"

using namespace dtnfem;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// Integral of x^a y^b over the unit right triangle: a! b! / (a + b + 2)!.
double triangle_monomial(int a, int b) { return factorial(a) * factorial(b) / factorial(a + b + 2); }

// Integral of x^a y^b z^c over the unit right tetrahedron.
double tet_monomial(int a, int b, int c) {
  return factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 3);
}

}  // namespace

TEST_CASE("Gauss-Legendre rules integrate polynomials of degree 2n-1") {
  for (int n : {1, 2, 5, 12, 33}) {
    const auto rule = gauss_legendre(n);
    REQUIRE(rule.nodes.size() == static_cast<std::size_t>(n));
    CHECK(std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0) == doctest::Approx(2.0).epsilon(1e-14));
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double sum = 0.0;
      for (int q = 0; q < n; ++q) sum += rule.weights[static_cast<std::size_t>(q)] * std::pow(rule.nodes[static_cast<std::size_t>(q)], p);
      const double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
      CHECK(std::abs(sum - exact) <= 1e-13);
    }
  }
}

TEST_CASE("triangle rules are exact to their degree") {
  for (int degree : {1, 2, 4, 8, 12}) {
    const auto rule = triangle_rule(degree);
    CHECK(rule.degree >= degree);
    CHECK(std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    for (int a = 0; a <= degree; ++a)
      for (int b = 0; a + b <= degree; ++b) {
        double sum = 0.0;
        for (std::size_t q = 0; q < rule.points.size(); ++q)
          sum += rule.weights[q] * std::pow(rule.points[q][1], a) * std::pow(rule.points[q][2], b);
        // weights are normalised by the triangle area 1/2
        CHECK(std::abs(0.5 * sum - triangle_monomial(a, b)) <= 1e-14);
      }
  }
}

TEST_CASE("degree-8 triangle rule has 16 points") {
  const auto rule = triangle_rule(8);
  CHECK(rule.points.size() == 16);
  for (const auto& p : rule.points) {
    CHECK(p[0] + p[1] + p[2] == doctest::Approx(1.0).epsilon(1e-15));
    for (double l : p) CHECK(l >= 0.0);
  }
}

TEST_CASE("tetrahedron rules are exact to their degree") {
  for (int degree : {1, 2, 4, 6}) {
    const auto rule = tetrahedron_rule(degree);
    CHECK(rule.degree >= degree);
    CHECK(std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    for (int a = 0; a <= degree; ++a)
      for (int b = 0; a + b <= degree; ++b)
        for (int c = 0; a + b + c <= degree; ++c) {
          double sum = 0.0;
          for (std::size_t q = 0; q < rule.points.size(); ++q)
            sum += rule.weights[q] * std::pow(rule.points[q][1], a) * std::pow(rule.points[q][2], b) *
                   std::pow(rule.points[q][3], c);
          CHECK(std::abs(sum / 6.0 - tet_monomial(a, b, c)) <= 1e-14);
        }
  }
}
