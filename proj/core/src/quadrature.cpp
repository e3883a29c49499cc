#include "polyproj/quadrature.hpp"

#include "polyproj/errors.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace polyproj {

std::string to_string(Scheme scheme) {
  return scheme == Scheme::Triangulation ? "tri" : "quad";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "tri" || name == "triangulation") return Scheme::Triangulation;
  if (name == "quad" || name == "quadrangulation") return Scheme::Quadrangulation;
  throw Error(ErrorCode::InvalidArgument, "unknown quadrature scheme '" + name + "'");
}

std::vector<Triangle> subdivide_triangulation(const Polygon& p) {
  std::vector<Triangle> out;
  out.reserve(static_cast<std::size_t>(p.size()));
  for (int i = 0; i < p.size(); ++i) out.push_back({p.vertex_mean(), p.vertex(i), p.vertex(i + 1)});
  return out;
}

std::vector<Quad> subdivide_quadrangulation(const Polygon& p) {
  std::vector<Quad> out;
  out.reserve(static_cast<std::size_t>(p.size()));
  for (int i = 0; i < p.size(); ++i) {
    const Point m0 = 0.5 * (p.vertex(i) + p.vertex(i + 1));
    const Point m1 = 0.5 * (p.vertex(i + 1) + p.vertex(i + 2));
    out.push_back({p.vertex_mean(), m0, p.vertex(i + 1), m1});
  }
  return out;
}

namespace {

GaussLegendre compute_gauss_legendre(int n) {
  GaussLegendre g;
  g.nodes.resize(static_cast<std::size_t>(n));
  g.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    g.nodes[i] = -x;
    g.nodes[n - 1 - i] = x;
    g.weights[i] = w;
    g.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) g.nodes[n / 2] = 0.0;
  return g;
}

double twice_area(const Quad& q) {
  return cross(q[0], q[1], q[2]) + cross(q[0], q[2], q[3]);
}

}  // namespace

const GaussLegendre& gauss_legendre(int points) {
  if (points < 1) throw Error(ErrorCode::UnsupportedOrder, "Gauss rule needs at least one point");
  static std::mutex mutex;
  static std::map<int, GaussLegendre> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(points);
  if (it == cache.end()) it = cache.emplace(points, compute_gauss_legendre(points)).first;
  return it->second;
}

void append_triangle_rule(const Triangle& t, int order, QuadratureRule& rule) {
  const double area = 0.5 * cross(t[0], t[1], t[2]);
  const Point e1 = t[1] - t[0];
  const Point e2 = t[2] - t[0];
  const Point f1 = t[0] - t[1];
  const Point f2 = t[2] - t[1];
  if (order <= 1) {
    rule.points.push_back((t[0] + t[1] + t[2]) / 3.0);
    rule.weights.push_back(area);
    return;
  }
  if (order == 2) {
    constexpr double a = 1.0 / 6.0;
    constexpr double b = 2.0 / 3.0;
    for (const auto& [s, r] : {std::pair{a, a}, std::pair{b, a}, std::pair{a, b}}) {
      rule.points.push_back(t[0] + s * e1 + r * e2);
      rule.weights.push_back(area / 3.0);
    }
    return;
  }
  // Collapsed tensor rule: x = u, y = (1 - u) v on the unit triangle. The
  // Jacobian (1 - u) raises the degree in u by one. The collapsed side sits
  // at t[0], which is the shared apex of a polygon fan.
  const GaussLegendre& gu = gauss_legendre((order + 3) / 2);
  const GaussLegendre& gv = gauss_legendre((order + 2) / 2);
  for (std::size_t i = 0; i < gu.nodes.size(); ++i) {
    const double u = 0.5 * (gu.nodes[i] + 1.0);
    for (std::size_t j = 0; j < gv.nodes.size(); ++j) {
      const double v = 0.5 * (gv.nodes[j] + 1.0);
      rule.points.push_back(t[1] + u * f1 + (1.0 - u) * v * f2);
      rule.weights.push_back(0.5 * area * gu.weights[i] * gv.weights[j] * (1.0 - u));
    }
  }
}

void append_quad_rule(const Quad& q, int order, QuadratureRule& rule) {
  if (order <= 1) {
    // Area centroid with the full area: exact for linear integrands on any quad.
    const double a1 = 0.5 * cross(q[0], q[1], q[2]);
    const double a2 = 0.5 * cross(q[0], q[2], q[3]);
    rule.points.push_back((a1 * (q[0] + q[1] + q[2]) + a2 * (q[0] + q[2] + q[3])) /
                          (3.0 * (a1 + a2)));
    rule.weights.push_back(a1 + a2);
    return;
  }
  // Degree-k integrands stay degree k per variable under the bilinear map;
  // the bilinear Jacobian adds one more.
  const GaussLegendre& g = gauss_legendre((order + 3) / 2);
  const std::size_t m = g.nodes.size();
  for (std::size_t i = 0; i < m; ++i) {
    const double xi = g.nodes[i];
    for (std::size_t j = 0; j < m; ++j) {
      const double eta = g.nodes[j];
      const double n0 = 0.25 * (1 - xi) * (1 - eta);
      const double n1 = 0.25 * (1 + xi) * (1 - eta);
      const double n2 = 0.25 * (1 + xi) * (1 + eta);
      const double n3 = 0.25 * (1 - xi) * (1 + eta);
      const Point dxi = 0.25 * ((1 - eta) * (q[1] - q[0]) + (1 + eta) * (q[2] - q[3]));
      const Point deta = 0.25 * ((1 - xi) * (q[3] - q[0]) + (1 + xi) * (q[2] - q[1]));
      const double det = dxi.x() * deta.y() - dxi.y() * deta.x();
      rule.points.push_back(n0 * q[0] + n1 * q[1] + n2 * q[2] + n3 * q[3]);
      rule.weights.push_back(g.weights[i] * g.weights[j] * det);
    }
  }
}

QuadratureRule rule_on_polygon(const Polygon& p, Scheme scheme, int order) {
  if (order < 1 || order > kMaxQuadratureOrder) {
    throw Error(ErrorCode::UnsupportedOrder,
                "quadrature order " + std::to_string(order) + " outside [1, " +
                    std::to_string(kMaxQuadratureOrder) + "]");
  }
  QuadratureRule rule;
  rule.scheme = scheme;
  rule.order = order;
  if (scheme == Scheme::Triangulation) {
    for (const Triangle& t : subdivide_triangulation(p)) append_triangle_rule(t, order, rule);
  } else {
    for (const Quad& q : subdivide_quadrangulation(p)) {
      if (0.5 * twice_area(q) < 1e-14 * p.area()) {
        throw Error(ErrorCode::DegenerateQuad, "sub-quad area below 1e-14 |E|");
      }
      append_quad_rule(q, order, rule);
    }
  }
  return rule;
}

Gradients exact_gradient_integrals(const Polygon& p) {
  // phi_i is linear on its two edges with mean 1/2, so each contributes half
  // of the scaled outward normal.
  const int n = p.size();
  Gradients out(n, 2);
  for (int i = 0; i < n; ++i) {
    const Point g = 0.5 * (p.edge_normal(i - 1) + p.edge_normal(i));
    out.row(i) = g.transpose();
  }
  return out;
}

double gradient_integration_error(const ElementBasis& basis, const QuadratureRule& rule) {
  if (basis.order() != 1) {
    throw Error(ErrorCode::InvalidArgument, "gradient integration error is defined for order 1");
  }
  Gradients approx = Gradients::Zero(basis.size(), 2);
  Eigen::VectorXd values;
  Gradients grads;
  for (int q = 0; q < rule.size(); ++q) {
    basis.evaluate(rule.points[q], values, grads);
    approx += rule.weights[q] * grads;
  }
  const Gradients diff = exact_gradient_integrals(basis.polygon()) - approx;
  return diff.rowwise().norm().maxCoeff();
}

}  // namespace polyproj
