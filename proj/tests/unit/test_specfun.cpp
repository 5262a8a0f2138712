#include <doctest.h>

#include <cmath>
#include <random>

#include "data/specfun_oracle.inc"
#include "dtnfem/quadrature.hpp"
#include "dtnfem/specfun.hpp"

using namespace dtnfem;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double double_factorial(int n) {
  double r = 1.0;
  for (int k = n; k > 1; k -= 2) r *= k;
  return r;
}

}  // namespace

TEST_CASE("spherical Bessel closed forms") {
  CHECK(spherical_bessel_j(0, 1.0)[0] == doctest::Approx(0.8414709848).epsilon(1e-10));
  CHECK(spherical_bessel_j(1, 2.0)[1] == doctest::Approx(0.4353977749).epsilon(1e-10));
  const auto y = spherical_bessel_y(1, 1.3);
  CHECK(y[0] == doctest::Approx(-std::cos(1.3) / 1.3).epsilon(1e-14));
  CHECK(y[1] == doctest::Approx(-std::cos(1.3) / (1.3 * 1.3) - std::sin(1.3) / 1.3).epsilon(1e-14));
}

TEST_CASE("spherical Bessel sequences match the extended-precision oracle") {
  double worst_j = 0.0, worst_y = 0.0;
  for (const auto& row : kBesselOracle) {
    const auto j = spherical_bessel_j(row.n, row.z);
    const auto y = spherical_bessel_y(row.n, row.z);
    worst_j = std::max(worst_j, rel(j[static_cast<std::size_t>(row.n)], row.j));
    worst_y = std::max(worst_y, rel(y[static_cast<std::size_t>(row.n)], row.y));
  }
  CHECK(worst_j <= 1e-12);
  CHECK(worst_y <= 1e-12);

  // whole sequence at z = 5, n <= 20
  const auto j = spherical_bessel_j(20, 5.0);
  for (const auto& row : kBesselOracle)
    if (row.z == 5.0 && row.n <= 20) CHECK(rel(j[static_cast<std::size_t>(row.n)], row.j) <= 1e-12);
}

TEST_CASE("Bessel domain errors") {
  CHECK_THROWS_AS(spherical_bessel_j(3, 0.0), DomainError);
  CHECK_THROWS_AS(spherical_bessel_j(3, -1.0), DomainError);
  CHECK_THROWS_AS(spherical_bessel_y(3, std::nan("")), DomainError);
  CHECK_THROWS_AS(spherical_hankel1(3, 0.0), DomainError);
  CHECK_THROWS_AS(spherical_bessel_j(-1, 1.0), DomainError);
}

TEST_CASE("Hankel overflow names the failing order") {
  try {
    spherical_hankel1(400, 1e-3);
    FAIL("expected overflow");
  } catch (const OverflowError& e) {
    CHECK(e.order > 1);
    CHECK(e.order <= 400);
  }
}

TEST_CASE("Hankel closed forms and asymptotics") {
  const auto h0 = spherical_hankel1(0, kPi);
  CHECK(std::abs(h0[0].real()) < 1e-15);
  CHECK(h0[0].imag() == doctest::Approx(0.3183098862).epsilon(1e-10));

  const auto h1 = spherical_hankel1(1, 1.0);
  const Complex expected = -std::exp(kI) * (1.0 + kI);
  CHECK(std::abs(h1[1] - expected) <= 1e-14 * std::abs(expected));
  CHECK(h1[1].real() == doctest::Approx(0.3011687).epsilon(1e-6));
  CHECK(h1[1].imag() == doctest::Approx(-1.3817733).epsilon(1e-6));

  const auto h10 = spherical_hankel1(10, 1.0);
  const double ratio = std::abs(h10[10]) / double_factorial(19);
  CHECK(std::abs(ratio - 1.0) <= 0.12);
  CHECK(ratio == doctest::Approx(1.02670712806852).epsilon(1e-12));
}

TEST_CASE("Hankel asymptotic ratio approaches one monotonically past 2z") {
  const double z = 3.0;
  const auto h = spherical_hankel1(80, z);
  double prev = 1e300;
  for (int n = 6; n <= 80; ++n) {
    const double dev = std::abs(std::abs(h[n]) * std::pow(z, n + 1) / double_factorial(2 * n - 1) - 1.0);
    CHECK(dev <= prev);
    prev = dev;
  }
  CHECK(prev < 0.1);
}

TEST_CASE("recurrence residuals") {
  for (double z : {0.5, 1.0, kPi, 10.0, 50.0}) {
    const auto h = spherical_hankel1(50, z);
    const auto j = spherical_bessel_j(50, z);
    const auto y = spherical_bessel_y(50, z);
    for (int n = 1; n < 50; ++n) {
      const double c = (2.0 * n + 1.0) / z;
      const auto un = static_cast<std::size_t>(n);
      CHECK(std::abs(h[n + 1] - c * h[n] + h[n - 1]) <= 1e-10 * std::abs(h[n + 1]));
      CHECK(std::abs(y[un + 1] - c * y[un] + y[un - 1]) <= 1e-10 * std::abs(y[un + 1]));
      const double scale = std::max({std::abs(j[un + 1]), std::abs(c * j[un]), std::abs(j[un - 1])});
      CHECK(std::abs(j[un + 1] - c * j[un] + j[un - 1]) <= 1e-10 * scale);
    }
  }
}

TEST_CASE("cross-kind Wronskian") {
  for (double z : {0.5, 1.0, kPi, 10.0, 50.0}) {
    const auto j = spherical_bessel_j(51, z);
    const auto y = spherical_bessel_y(51, z);
    for (int n = 0; n <= 50; ++n) {
      // f_n' = f_{n-1} - (n+1)/z f_n with f_{-1}: j_{-1} = cos z / z, y_{-1} = sin z / z
      const auto un = static_cast<std::size_t>(n);
      const double jm = n == 0 ? std::cos(z) / z : j[un - 1];
      const double ym = n == 0 ? std::sin(z) / z : y[un - 1];
      // j y' - j' y = j y_{n-1} - j_{n-1} y
      const double w = j[un] * ym - jm * y[un];
      CHECK(rel(w, 1.0 / (z * z)) <= 1e-12);
    }
  }
}

TEST_CASE("DtN symbols") {
  const auto t0 = theta_coefficients(0, kPi);
  CHECK(t0[0].real() == doctest::Approx(-1.0));
  CHECK(t0[0].imag() == doctest::Approx(kPi));

  const auto t1 = theta_coefficients(1, 1.0);
  CHECK(std::abs(t1[1] - Complex(-1.5, 0.5)) <= 1e-14);

  const auto t60 = theta_coefficients(60, kPi);
  for (int n = 0; n <= 60; ++n) {
    CHECK(t60[n].real() <= -0.5);
    CHECK(t60[n].imag() > 0.0);
  }
}

TEST_CASE("DtN symbols grow like n") {
  for (double z : {0.5, kPi, 8.0}) {
    const int start = static_cast<int>(std::max(50.0, 10.0 * z));
    const auto t = theta_coefficients(start + 50, z);
    for (int n = start; n <= start + 50; ++n) CHECK(std::abs(std::abs(t[n]) / n - 1.0) <= 0.1);
  }
}

TEST_CASE("associated Legendre functions") {
  const auto p1 = assoc_legendre(1, 0.0);
  CHECK(p1(1, 0) == 0.0);
  CHECK(p1(1, 1) == doctest::Approx(1.0));
  const auto p2 = assoc_legendre(2, 1.0);
  CHECK(p2(2, 0) == doctest::Approx(1.0));
  CHECK(p2(2, 1) == 0.0);
  CHECK(p2(2, 2) == 0.0);
  const auto p = assoc_legendre(10, 0.3);
  for (const auto& row : kLegendreOracle) CHECK(rel(p(row.n, row.m), row.value) <= 1e-12);
  CHECK_THROWS_AS(assoc_legendre(3, 1.0000001), DomainError);
}

TEST_CASE("spherical harmonics values and conjugate symmetry") {
  const auto y0 = spherical_harmonic_table(0, 0.7, 2.1);
  CHECK(y0(0, 0).real() == doctest::Approx(0.2820947918).epsilon(1e-10));
  const auto y1 = spherical_harmonic_table(1, 0.0, 0.0);
  CHECK(y1(1, 0).real() == doctest::Approx(0.4886025119).epsilon(1e-10));
  CHECK(std::abs(y1(1, 1)) == 0.0);
  CHECK(std::abs(y1(1, -1)) == 0.0);

  const auto y = spherical_harmonic_table(12, 1.1, 4.0);
  for (int n = 0; n <= 12; ++n)
    for (int m = 1; m <= n; ++m) CHECK(std::abs(y(n, -m) - std::conj(y(n, m))) == 0.0);
}

TEST_CASE("addition theorem at random directions") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  std::vector<Complex> values(static_cast<std::size_t>(harmonic_count(30)));
  for (int trial = 0; trial < 100; ++trial) {
    const Vec3 x(normal(rng), normal(rng), normal(rng));
    spherical_harmonics_at(30, x, values);
    for (int n = 0; n <= 30; ++n) {
      double sum = 0.0;
      for (int m = -n; m <= n; ++m) sum += std::norm(values[static_cast<std::size_t>(harmonic_index(n, m))]);
      CHECK(std::abs(sum - (2 * n + 1) / (4 * kPi)) <= 1e-11);
    }
  }
}

TEST_CASE("table and point evaluation agree") {
  const double theta = 2.2, phi = -0.9;
  const auto table = spherical_harmonic_table(15, theta, phi);
  std::vector<Complex> values(static_cast<std::size_t>(harmonic_count(15)));
  spherical_harmonics_at(15, Vec3(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)) * 3.0,
                         values);
  for (std::size_t k = 0; k < values.size(); ++k) CHECK(std::abs(values[k] - table.values()[k]) <= 1e-13);
}

TEST_CASE("orthonormality under product quadrature") {
  const int nmax = 20;
  const auto gauss = gauss_legendre(2 * nmax + 2);
  const int nphi = 4 * nmax + 4;
  const int count = harmonic_count(nmax);
  Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(count, count);
  Eigen::VectorXcd y(count);
  for (std::size_t i = 0; i < gauss.nodes.size(); ++i) {
    const double theta = std::acos(gauss.nodes[i]);
    for (int k = 0; k < nphi; ++k) {
      const auto table = spherical_harmonic_table(nmax, theta, 2 * kPi * k / nphi);
      for (int c = 0; c < count; ++c) y(c) = table.values()[static_cast<std::size_t>(c)];
      gram += (gauss.weights[i] * 2 * kPi / nphi) * (y.conjugate() * y.transpose());
    }
  }
  const double dev = (gram - Eigen::MatrixXcd::Identity(count, count)).cwiseAbs().maxCoeff();
  CHECK(dev <= 1e-10);
}
