#pragma once

#include <Eigen/Core>

#include <span>
#include <string>
#include <variant>
#include <vector>

namespace polyproj {

using Point = Eigen::Vector2d;

/// z-component of (b - a) x (c - a); twice the signed area of triangle abc.
inline double cross(const Point& a, const Point& b, const Point& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

enum class PolygonIssue { TooFewVertices, NotCCW, NotStrictlyConvex, DuplicateVertex };

struct PolygonDiagnostic {
  PolygonIssue issue;
  int vertex = -1;  // first offending vertex, -1 when not vertex-specific
  std::string message;
};

struct PolygonMeasures {
  double area = 0.0;
  Point vertex_mean = Point::Zero();
  Point centroid = Point::Zero();
  double diameter = 0.0;
};

/// A strictly convex polygon with counter-clockwise vertices. Instances can
/// only be obtained through validate_polygon / make_polygon, so every Polygon
/// satisfies the invariants; the measures are computed once at construction.
class Polygon {
 public:
  const std::vector<Point>& vertices() const { return vertices_; }
  int size() const { return static_cast<int>(vertices_.size()); }

  /// Vertex i, with indices taken modulo size().
  const Point& vertex(int i) const {
    const int n = size();
    return vertices_[static_cast<std::size_t>(((i % n) + n) % n)];
  }

  double area() const { return measures_.area; }
  const Point& vertex_mean() const { return measures_.vertex_mean; }
  const Point& centroid() const { return measures_.centroid; }
  double diameter() const { return measures_.diameter; }
  const PolygonMeasures& measures() const { return measures_; }

  /// Outward normal of edge (i, i+1) scaled by the edge length.
  Point edge_normal(int i) const {
    const Point e = vertex(i + 1) - vertex(i);
    return {e.y(), -e.x()};
  }

  /// Signed distance from x to the line through edge (i, i+1), positive inside.
  double edge_distance(int i, const Point& x) const;

 private:
  friend std::variant<Polygon, PolygonDiagnostic> validate_polygon(std::span<const Point>);
  explicit Polygon(std::vector<Point> vertices);

  std::vector<Point> vertices_;
  PolygonMeasures measures_;
};

std::variant<Polygon, PolygonDiagnostic> validate_polygon(std::span<const Point> vertices);

/// validate_polygon that throws Error(InvalidPolygon) on failure.
Polygon make_polygon(std::span<const Point> vertices);
Polygon make_polygon(std::initializer_list<Point> vertices);

PolygonMeasures polygon_measures(const Polygon& p);

/// Polygon scaled by `factor` about the origin, then shifted by `offset`.
Polygon transformed(const Polygon& p, double factor, const Point& offset = Point::Zero());

/// Regular n-gon with the given circumradius, first vertex at angle `phase`.
Polygon regular_polygon(int n, double radius = 1.0, const Point& center = Point::Zero(),
                        double phase = 0.0);

std::string to_string(PolygonIssue issue);

}  // namespace polyproj
