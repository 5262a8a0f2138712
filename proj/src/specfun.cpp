#include "dtnfem/specfun.hpp"

#include <cmath>
#include <string>

namespace dtnfem {
namespace {

void require_argument(double z) {
  if (!std::isfinite(z) || z <= 0.0)
    throw DomainError("spherical Bessel argument must be finite and positive, got " +
                      std::to_string(z));
}

void require_order(int n_max) {
  if (n_max < 0) throw DomainError("order must be non-negative");
}

// Normalized associated Legendre values pbar(n, m) = N_n^m P_n^m(t) for
// 0 <= m <= n <= degree_max, packed n(n+1)/2 + m. s = sqrt(1 - t^2).
void normalized_legendre(int degree_max, double t, double s, std::span<double> out) {
  auto at = [&](int n, int m) -> double& {
    return out[static_cast<std::size_t>(n * (n + 1) / 2 + m)];
  };
  at(0, 0) = 1.0 / std::sqrt(4.0 * kPi);
  for (int m = 1; m <= degree_max; ++m)
    at(m, m) = std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * at(m - 1, m - 1);
  for (int m = 0; m < degree_max; ++m) {
    at(m + 1, m) = std::sqrt(2.0 * m + 3.0) * t * at(m, m);
    for (int n = m + 2; n <= degree_max; ++n) {
      const double nn = n, mm = m;
      const double a = std::sqrt((4.0 * nn * nn - 1.0) / (nn * nn - mm * mm));
      const double b = std::sqrt(((nn - 1.0) * (nn - 1.0) - mm * mm) /
                                 (4.0 * (nn - 1.0) * (nn - 1.0) - 1.0));
      at(n, m) = a * (t * at(n - 1, m) - b * at(n - 2, m));
    }
  }
}

void fill_harmonics(int degree_max, double t, double s, Complex eiphi, std::span<Complex> out) {
  thread_local std::vector<double> pbar;
  pbar.resize(static_cast<std::size_t>((degree_max + 1) * (degree_max + 2) / 2));
  normalized_legendre(degree_max, t, s, pbar);
  Complex phase{1.0, 0.0};
  for (int m = 0; m <= degree_max; ++m) {
    for (int n = m; n <= degree_max; ++n) {
      const Complex y = pbar[static_cast<std::size_t>(n * (n + 1) / 2 + m)] * phase;
      out[static_cast<std::size_t>(harmonic_index(n, m))] = y;
      if (m > 0) out[static_cast<std::size_t>(harmonic_index(n, -m))] = std::conj(y);
    }
    phase *= eiphi;
  }
}

}  // namespace

std::vector<double> spherical_bessel_j(int n_max, double z) {
  require_order(n_max);
  require_argument(z);

  const double sz = std::sin(z), cz = std::cos(z);
  const double j0 = sz / z;
  const double j1 = sz / (z * z) - cz / z;

  std::vector<double> j(static_cast<std::size_t>(n_max) + 1);
  j[0] = j0;
  if (n_max == 0) return j;

  // ratio[n] = j_n / j_{n-1}, from the backward recurrence
  //   j_n / j_{n-1} = z / ((2n+1) - z j_{n+1}/j_n)
  const int start = std::max(n_max, static_cast<int>(z)) + 60;
  std::vector<double> ratio(static_cast<std::size_t>(n_max) + 1, 0.0);
  double r = 0.0;
  for (int n = start; n >= 1; --n) {
    r = z / ((2.0 * n + 1.0) - z * r);
    if (n <= n_max) ratio[static_cast<std::size_t>(n)] = r;
  }

  if (std::abs(j0) >= std::abs(j1)) {
    for (int n = 1; n <= n_max; ++n)
      j[static_cast<std::size_t>(n)] = j[static_cast<std::size_t>(n - 1)] * ratio[static_cast<std::size_t>(n)];
  } else {
    j[1] = j1;
    for (int n = 2; n <= n_max; ++n)
      j[static_cast<std::size_t>(n)] = j[static_cast<std::size_t>(n - 1)] * ratio[static_cast<std::size_t>(n)];
  }
  return j;
}

std::vector<double> spherical_bessel_y(int n_max, double z) {
  require_order(n_max);
  require_argument(z);

  const double sz = std::sin(z), cz = std::cos(z);
  std::vector<double> y(static_cast<std::size_t>(n_max) + 1);
  y[0] = -cz / z;
  if (n_max >= 1) y[1] = -cz / (z * z) - sz / z;
  for (int n = 1; n < n_max; ++n) {
    const double next = (2.0 * n + 1.0) / z * y[static_cast<std::size_t>(n)] - y[static_cast<std::size_t>(n - 1)];
    if (!std::isfinite(next) || std::abs(next) > 1e300)
      throw OverflowError("spherical Bessel y_n overflows at order " + std::to_string(n + 1) +
                              " for argument " + std::to_string(z),
                          n + 1);
    y[static_cast<std::size_t>(n + 1)] = next;
  }
  return y;
}

HankelSequence spherical_hankel1(int n_max, double z) {
  auto y = spherical_bessel_y(n_max, z);
  auto j = spherical_bessel_j(n_max, z);
  HankelSequence h;
  h.order_max = n_max;
  h.argument = z;
  h.values.resize(j.size());
  for (std::size_t n = 0; n < j.size(); ++n) h.values[n] = Complex(j[n], y[n]);
  return h;
}

ThetaCoefficients theta_coefficients(int order_max, double z) {
  const auto h = spherical_hankel1(order_max, z);
  ThetaCoefficients theta;
  theta.order_max = order_max;
  theta.argument = z;
  theta.values.resize(h.values.size());
  theta.values[0] = Complex(-1.0, z);
  for (int n = 1; n <= order_max; ++n)
    theta.values[static_cast<std::size_t>(n)] = z * h[n - 1] / h[n] - static_cast<double>(n + 1);
  return theta;
}

LegendreTable::LegendreTable(int n_max, double t) : n_max_(n_max), t_(t) {
  require_order(n_max);
  if (!(std::abs(t) <= 1.0))
    throw DomainError("associated Legendre argument must lie in [-1, 1], got " + std::to_string(t));

  values_.assign(index(n_max, n_max) + 1, 0.0);
  auto at = [&](int n, int m) -> double& { return values_[index(n, m)]; };
  const double s = std::sqrt((1.0 - t) * (1.0 + t));
  at(0, 0) = 1.0;
  for (int m = 1; m <= n_max; ++m) at(m, m) = (2.0 * m - 1.0) * s * at(m - 1, m - 1);
  for (int m = 0; m < n_max; ++m) {
    at(m + 1, m) = (2.0 * m + 1.0) * t * at(m, m);
    for (int n = m + 2; n <= n_max; ++n)
      at(n, m) = ((2.0 * n - 1.0) * t * at(n - 1, m) - (n + m - 1.0) * at(n - 2, m)) / (n - m);
  }
  for (double v : values_)
    if (!std::isfinite(v)) throw OverflowError("associated Legendre overflow", n_max);
}

LegendreTable assoc_legendre(int n_max, double t) { return LegendreTable(n_max, t); }

HarmonicTable::HarmonicTable(int degree_max, double theta, double phi)
    : degree_max_(degree_max), theta_(theta), phi_(phi) {
  require_order(degree_max);
  if (!(theta >= 0.0 && theta <= kPi))
    throw DomainError("polar angle must lie in [0, pi]");
  values_.resize(static_cast<std::size_t>(harmonic_count(degree_max)));
  fill_harmonics(degree_max, std::cos(theta), std::sin(theta), std::polar(1.0, phi), values_);
  for (const auto& v : values_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw OverflowError("spherical harmonic overflow", degree_max);
}

HarmonicTable spherical_harmonic_table(int degree_max, double theta, double phi) {
  return HarmonicTable(degree_max, theta, phi);
}

void spherical_harmonics_at(int degree_max, const Vec3& x, std::span<Complex> out) {
  const double r = x.norm();
  const double rho = std::hypot(x.x(), x.y());
  const double t = x.z() / r;
  const double s = rho / r;
  const Complex eiphi = rho > 0.0 ? Complex(x.x() / rho, x.y() / rho) : Complex(1.0, 0.0);
  fill_harmonics(degree_max, t, s, eiphi, out);
}

}  // namespace dtnfem
