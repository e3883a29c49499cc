#include "polyproj/geometry.hpp"

#include "polyproj/errors.hpp"

#include <cmath>
#include <numbers>

namespace polyproj {

namespace {

PolygonMeasures compute_measures(const std::vector<Point>& v) {
  PolygonMeasures m;
  const std::size_t n = v.size();
  double twice_area = 0.0;
  Point moment = Point::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = v[i];
    const Point& b = v[(i + 1) % n];
    const double c = a.x() * b.y() - b.x() * a.y();
    twice_area += c;
    moment += c * (a + b);
    m.vertex_mean += a;
    for (std::size_t j = i + 1; j < n; ++j) m.diameter = std::max(m.diameter, (v[j] - a).norm());
  }
  m.area = 0.5 * twice_area;
  m.vertex_mean /= static_cast<double>(n);
  m.centroid = moment / (3.0 * twice_area);
  return m;
}

}  // namespace

Polygon::Polygon(std::vector<Point> vertices)
    : vertices_(std::move(vertices)), measures_(compute_measures(vertices_)) {}

double Polygon::edge_distance(int i, const Point& x) const {
  const Point& a = vertex(i);
  const Point& b = vertex(i + 1);
  return cross(a, b, x) / (b - a).norm();
}

std::variant<Polygon, PolygonDiagnostic> validate_polygon(std::span<const Point> vertices) {
  const int n = static_cast<int>(vertices.size());
  if (n < 3) {
    return PolygonDiagnostic{PolygonIssue::TooFewVertices, -1,
                             "polygon needs at least 3 vertices, got " + std::to_string(n)};
  }
  double diam = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) diam = std::max(diam, (vertices[i] - vertices[j]).norm());

  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if ((vertices[i] - vertices[j]).norm() <= 1e-12 * diam || diam == 0.0) {
        return PolygonDiagnostic{PolygonIssue::DuplicateVertex, j,
                                 "vertex " + std::to_string(j) + " repeats vertex " +
                                     std::to_string(i)};
      }
    }
  }

  double twice_area = 0.0;
  for (int i = 0; i < n; ++i) {
    const Point& a = vertices[i];
    const Point& b = vertices[(i + 1) % n];
    twice_area += a.x() * b.y() - b.x() * a.y();
  }
  if (!(twice_area > 0.0)) {
    return PolygonDiagnostic{PolygonIssue::NotCCW, -1, "vertices are not counter-clockwise"};
  }

  const double tol = 1e-12 * diam * diam;
  for (int i = 0; i < n; ++i) {
    const Point& prev = vertices[(i + n - 1) % n];
    const Point& next = vertices[(i + 1) % n];
    if (!(cross(prev, vertices[i], next) > tol)) {
      return PolygonDiagnostic{PolygonIssue::NotStrictlyConvex, i,
                               "vertex " + std::to_string(i) + " is reflex or collinear"};
    }
  }
  // Positive turns at every vertex with positive area can still wind twice.
  double turning = 0.0;
  for (int i = 0; i < n; ++i) {
    const Point e0 = vertices[i] - vertices[(i + n - 1) % n];
    const Point e1 = vertices[(i + 1) % n] - vertices[i];
    turning += std::atan2(e0.x() * e1.y() - e0.y() * e1.x(), e0.dot(e1));
  }
  if (std::abs(turning - 2.0 * std::numbers::pi) > 1e-6) {
    return PolygonDiagnostic{PolygonIssue::NotStrictlyConvex, 0, "polygon is self-intersecting"};
  }

  return Polygon(std::vector<Point>(vertices.begin(), vertices.end()));
}

Polygon make_polygon(std::span<const Point> vertices) {
  auto result = validate_polygon(vertices);
  if (auto* diag = std::get_if<PolygonDiagnostic>(&result)) {
    throw Error(ErrorCode::InvalidPolygon, diag->message);
  }
  return std::get<Polygon>(std::move(result));
}

Polygon make_polygon(std::initializer_list<Point> vertices) {
  return make_polygon(std::span<const Point>(vertices.begin(), vertices.size()));
}

PolygonMeasures polygon_measures(const Polygon& p) { return p.measures(); }

Polygon transformed(const Polygon& p, double factor, const Point& offset) {
  std::vector<Point> v;
  v.reserve(p.vertices().size());
  for (const Point& x : p.vertices()) v.push_back(factor * x + offset);
  return make_polygon(v);
}

Polygon regular_polygon(int n, double radius, const Point& center, double phase) {
  std::vector<Point> v;
  v.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double t = phase + 2.0 * std::numbers::pi * i / n;
    v.emplace_back(center.x() + radius * std::cos(t), center.y() + radius * std::sin(t));
  }
  return make_polygon(v);
}

std::string to_string(PolygonIssue issue) {
  switch (issue) {
    case PolygonIssue::TooFewVertices: return "TooFewVertices";
    case PolygonIssue::NotCCW: return "NotCCW";
    case PolygonIssue::NotStrictlyConvex: return "NotStrictlyConvex";
    case PolygonIssue::DuplicateVertex: return "DuplicateVertex";
  }
  return "Unknown";
}

}  // namespace polyproj
