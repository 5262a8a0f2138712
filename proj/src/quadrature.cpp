#include "dtnfem/quadrature.hpp"

#include <cmath>

#include "dtnfem/common.hpp"

namespace dtnfem {

GaussRule gauss_legendre(int points) {
  if (points < 1) throw DomainError("Gauss rule needs at least one point");
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(points));
  rule.weights.resize(static_cast<std::size_t>(points));
  for (int i = 0; i < (points + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (points + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= points; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = points * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= points; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = points * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.nodes[static_cast<std::size_t>(points - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(points - 1 - i)] = w;
  }
  return rule;
}

namespace {

TriangleRule symmetric_degree8() {
  TriangleRule rule;
  rule.degree = 8;
  auto add = [&](double a, double b, double c, double w) {
    rule.points.push_back({a, b, c});
    rule.weights.push_back(w);
  };
  add(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.144315607677787);
  struct Orbit3 { double a, w; };
  for (auto [a, w] : {Orbit3{0.081414823414554, 0.095091634267285},
                      Orbit3{0.658861384496480, 0.103217370534718},
                      Orbit3{0.898905543365938, 0.032458497623198}}) {
    const double b = 0.5 * (1.0 - a);
    add(a, b, b, w);
    add(b, a, b, w);
    add(b, b, a, w);
  }
  const double a = 0.008394777409958, b = 0.263112829634638, c = 1.0 - a - b;
  const double w = 0.027230314174435;
  add(a, b, c, w);
  add(a, c, b, w);
  add(b, a, c, w);
  add(b, c, a, w);
  add(c, a, b, w);
  add(c, b, a, w);
  return rule;
}

}  // namespace

TriangleRule triangle_rule(int degree) {
  if (degree < 1) throw DomainError("quadrature degree must be positive");
  if (degree == 8) return symmetric_degree8();

  const int q = (degree + 3) / 2;
  const auto g = gauss_legendre(q);
  TriangleRule rule;
  rule.degree = degree;
  for (int i = 0; i < q; ++i) {
    const double xi = 0.5 * (g.nodes[static_cast<std::size_t>(i)] + 1.0);
    const double wi = 0.5 * g.weights[static_cast<std::size_t>(i)];
    for (int j = 0; j < q; ++j) {
      const double eta = 0.5 * (g.nodes[static_cast<std::size_t>(j)] + 1.0);
      const double wj = 0.5 * g.weights[static_cast<std::size_t>(j)];
      const double u = xi, v = eta * (1.0 - xi);
      rule.points.push_back({1.0 - u - v, u, v});
      rule.weights.push_back(2.0 * wi * wj * (1.0 - xi));
    }
  }
  return rule;
}

TetrahedronRule tetrahedron_rule(int degree) {
  if (degree < 1) throw DomainError("quadrature degree must be positive");
  const int q = (degree + 4) / 2;
  const auto g = gauss_legendre(q);
  TetrahedronRule rule;
  rule.degree = degree;
  for (int i = 0; i < q; ++i) {
    const double a = 0.5 * (g.nodes[static_cast<std::size_t>(i)] + 1.0);
    const double wa = 0.5 * g.weights[static_cast<std::size_t>(i)];
    for (int j = 0; j < q; ++j) {
      const double b = 0.5 * (g.nodes[static_cast<std::size_t>(j)] + 1.0);
      const double wb = 0.5 * g.weights[static_cast<std::size_t>(j)];
      for (int k = 0; k < q; ++k) {
        const double c = 0.5 * (g.nodes[static_cast<std::size_t>(k)] + 1.0);
        const double wc = 0.5 * g.weights[static_cast<std::size_t>(k)];
        const double x = a, y = b * (1.0 - a), z = c * (1.0 - a) * (1.0 - b);
        rule.points.push_back({1.0 - x - y - z, x, y, z});
        rule.weights.push_back(6.0 * wa * wb * wc * (1.0 - a) * (1.0 - a) * (1.0 - b));
      }
    }
  }
  return rule;
}

}  // namespace dtnfem
