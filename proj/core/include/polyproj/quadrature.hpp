#pragma once

#include "polyproj/basis.hpp"
#include "polyproj/geometry.hpp"

#include <array>
#include <string>
#include <type_traits>
#include <vector>

namespace polyproj {

enum class Scheme { Triangulation, Quadrangulation };

std::string to_string(Scheme scheme);
Scheme parse_scheme(const std::string& name);  // "tri" / "quad" (or full names)

/// Points and positive weights on one polygon. `order` is the polynomial
/// degree integrated exactly on each straight-sided subdomain.
struct QuadratureRule {
  std::vector<Point> points;
  std::vector<double> weights;
  Scheme scheme = Scheme::Triangulation;
  int order = 1;

  int size() const { return static_cast<int>(points.size()); }
};

using Triangle = std::array<Point, 3>;
using Quad = std::array<Point, 4>;

/// Fan of triangles (vertex mean, x_i, x_{i+1}).
std::vector<Triangle> subdivide_triangulation(const Polygon& p);

/// Quads (vertex mean, midpoint_i, x_{i+1}, midpoint_{i+1}).
std::vector<Quad> subdivide_quadrangulation(const Polygon& p);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussLegendre& gauss_legendre(int points);

/// Rule of the given degree on one triangle / one convex quad.
void append_triangle_rule(const Triangle& t, int order, QuadratureRule& rule);
void append_quad_rule(const Quad& q, int order, QuadratureRule& rule);

inline constexpr int kMaxQuadratureOrder = 64;

/// Subdivision rule on a polygon. Throws UnsupportedOrder for order outside
/// [1, kMaxQuadratureOrder] and DegenerateQuad for collapsed sub-quads.
QuadratureRule rule_on_polygon(const Polygon& p, Scheme scheme, int order);

/// sum_q w_q f(x_q); f may return a scalar or a fixed/dynamic Eigen object.
template <class F>
auto integrate(const QuadratureRule& rule, F&& f) {
  using Result = std::decay_t<decltype(f(rule.points.front()))>;
  if constexpr (std::is_arithmetic_v<Result>) {
    Result sum{};
    for (int q = 0; q < rule.size(); ++q) sum += rule.weights[q] * f(rule.points[q]);
    return sum;
  } else {
    using Plain = typename Result::PlainObject;
    Plain sum = rule.weights[0] * f(rule.points[0]);
    for (int q = 1; q < rule.size(); ++q) sum += rule.weights[q] * f(rule.points[q]);
    return sum;
  }
}

/// Exact integral of the gradient of every first-order basis function,
/// obtained from the boundary identity int_E grad(phi_i) = int_{dE} phi_i n.
/// Row i holds the vector for vertex i.
Gradients exact_gradient_integrals(const Polygon& p);

/// max_i | int_E grad(phi_i) - sum_q w_q grad(phi_i)(x_q) |
double gradient_integration_error(const ElementBasis& basis, const QuadratureRule& rule);

}  // namespace polyproj
