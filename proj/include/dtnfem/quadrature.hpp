#pragma once

#include <array>
#include <vector>

namespace dtnfem {

struct GaussRule {
  std::vector<double> nodes;  // on [-1, 1]
  std::vector<double> weights;
};

GaussRule gauss_legendre(int points);

// Rules in barycentric coordinates with weights summing to one, so that
// integral over a simplex = measure * sum_q w_q f(x_q).
struct TriangleRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int degree = 0;
};

struct TetrahedronRule {
  std::vector<std::array<double, 4>> points;
  std::vector<double> weights;
  int degree = 0;
};

/// Degree 8 returns the 16-point symmetric rule; other degrees use a
/// collapsed Gauss product rule exact to at least the requested degree.
TriangleRule triangle_rule(int degree);

TetrahedronRule tetrahedron_rule(int degree);

}  // namespace dtnfem
