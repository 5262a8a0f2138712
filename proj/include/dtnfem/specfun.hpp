#pragma once

// Spherical Bessel/Hankel functions, associated Legendre functions and
// orthonormal spherical harmonics, plus the DtN symbols
//   Theta_n(z) = z h_n'(z) / h_n(z),   h_n = h_n^{(1)}.
//
// Harmonics use the |m|-based normalization without the Condon-Shortley
// phase:
//   Y_n^m(theta, phi) = sqrt((2n+1)(n-|m|)! / (4 pi (n+|m|)!))
//                       P_n^{|m|}(cos theta) e^{i m phi}
// so Y_n^{-m} = conj(Y_n^m). Coefficients are packed by n*n + n + m.

#include <span>
#include <vector>

#include "dtnfem/common.hpp"

namespace dtnfem {

constexpr int harmonic_index(int n, int m) { return n * n + n + m; }
constexpr int harmonic_count(int degree_max) { return (degree_max + 1) * (degree_max + 1); }

/// j_0(z)..j_{n_max}(z) by backward (Miller) ratio recurrence, normalized
/// against the closed forms of j_0 or j_1, whichever is larger in magnitude.
std::vector<double> spherical_bessel_j(int n_max, double z);

/// y_0(z)..y_{n_max}(z) by upward recurrence. Throws OverflowError when a
/// value leaves the double range.
std::vector<double> spherical_bessel_y(int n_max, double z);

struct HankelSequence {
  int order_max = 0;
  double argument = 0.0;
  std::vector<Complex> values;  // h_n^{(1)}(argument), n = 0..order_max

  const Complex& operator[](int n) const { return values[static_cast<std::size_t>(n)]; }
};

/// h_n^{(1)} = j_n + i y_n for n = 0..n_max.
HankelSequence spherical_hankel1(int n_max, double z);

struct ThetaCoefficients {
  int order_max = 0;
  double argument = 0.0;  // z = kappa * R
  std::vector<Complex> values;

  const Complex& operator[](int n) const { return values[static_cast<std::size_t>(n)]; }
};

/// Theta_0 = i z - 1 and Theta_n = z h_{n-1}/h_n - (n+1) for n >= 1.
ThetaCoefficients theta_coefficients(int order_max, double z);

/// Unnormalized associated Legendre functions
///   P_n^m(t) = (1-t^2)^{m/2} d^m/dt^m P_n(t),  0 <= m <= n <= n_max,
/// without the Condon-Shortley sign.
class LegendreTable {
 public:
  LegendreTable(int n_max, double t);

  int degree_max() const { return n_max_; }
  double argument() const { return t_; }
  double operator()(int n, int m) const { return values_[index(n, m)]; }

 private:
  static std::size_t index(int n, int m) {
    return static_cast<std::size_t>(n * (n + 1) / 2 + m);
  }
  int n_max_;
  double t_;
  std::vector<double> values_;
};

LegendreTable assoc_legendre(int n_max, double t);

/// Y_n^m at one direction for all n <= degree_max, |m| <= n.
class HarmonicTable {
 public:
  HarmonicTable(int degree_max, double theta, double phi);

  int degree_max() const { return degree_max_; }
  double theta() const { return theta_; }
  double phi() const { return phi_; }
  const Complex& operator()(int n, int m) const {
    return values_[static_cast<std::size_t>(harmonic_index(n, m))];
  }
  std::span<const Complex> values() const { return values_; }

 private:
  int degree_max_;
  double theta_;
  double phi_;
  std::vector<Complex> values_;
};

HarmonicTable spherical_harmonic_table(int degree_max, double theta, double phi);

/// Fills out[harmonic_index(n, m)] with Y_n^m(x / |x|). `out` must hold
/// harmonic_count(degree_max) entries; x must be nonzero. This is the hot
/// path used by boundary assembly and the estimator.
void spherical_harmonics_at(int degree_max, const Vec3& x, std::span<Complex> out);

}  // namespace dtnfem
