#include "polyproj/basis.hpp"

#include "polyproj/errors.hpp"

#include <Eigen/SVD>

#include <array>
#include <cmath>
#include <sstream>

namespace polyproj {

namespace {

constexpr double kInteriorTolerance = 1e-12;
constexpr double kBoundaryTolerance = 1e-10;
constexpr double kMaxCondition = 1e12;

// Scaled quadratic monomials (1, s, t, s^2, s t, t^2) with (s, t) = (x - c) / d
// and their symmetric polar forms B(x, y), B(x, x) = p(x).
struct QuadraticMonomials {
  Point center;
  double scale;

  Point local(const Point& x) const { return (x - center) / scale; }

  std::array<double, 6> values(const Point& x) const {
    const Point s = local(x);
    return {1.0, s.x(), s.y(), s.x() * s.x(), s.x() * s.y(), s.y() * s.y()};
  }

  std::array<double, 6> polar(const Point& x, const Point& y) const {
    const Point s = local(x);
    const Point t = local(y);
    return {1.0,
            0.5 * (s.x() + t.x()),
            0.5 * (s.y() + t.y()),
            s.x() * t.x(),
            0.5 * (s.x() * t.y() + s.y() * t.x()),
            s.y() * t.y()};
  }
};

}  // namespace

bool is_interior(const Polygon& p, const Point& x) {
  const double tol = kInteriorTolerance * p.diameter();
  for (int i = 0; i < p.size(); ++i) {
    if (!(p.edge_distance(i, x) > tol)) return false;
  }
  return true;
}

void require_interior(const Polygon& p, const Point& x) {
  if (!is_interior(p, x)) {
    std::ostringstream msg;
    msg << "point (" << x.x() << ", " << x.y() << ") is not strictly inside the polygon";
    throw Error(ErrorCode::PointOnBoundary, msg.str());
  }
}

void wachspress_values_gradients(const Polygon& p, const Point& x, Eigen::VectorXd& values,
                                 Gradients& gradients) {
  require_interior(p, x);
  const int n = p.size();
  // h[i]: twice the signed area of (x_i, x_{i+1}, x); dh[i]: its gradient.
  std::array<double, 64> h_small;
  std::vector<double> h_large;
  double* h = h_small.data();
  if (n > static_cast<int>(h_small.size())) {
    h_large.resize(static_cast<std::size_t>(n));
    h = h_large.data();
  }
  for (int i = 0; i < n; ++i) h[i] = cross(p.vertex(i), p.vertex(i + 1), x);

  values.resize(n);
  gradients.resize(n, 2);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const int im = (i + n - 1) % n;
    const double c = cross(p.vertex(i - 1), p.vertex(i), p.vertex(i + 1));
    values[i] = c / (h[im] * h[i]);
    total += values[i];
    const Point e_prev = p.vertex(i) - p.vertex(i - 1);
    const Point e_next = p.vertex(i + 1) - p.vertex(i);
    // grad w_i / w_i = -(grad h_{i-1} / h_{i-1} + grad h_i / h_i)
    gradients(i, 0) = e_prev.y() / h[im] + e_next.y() / h[i];
    gradients(i, 1) = -e_prev.x() / h[im] - e_next.x() / h[i];
  }
  values /= total;
  const Eigen::RowVector2d mean = values.transpose() * gradients;
  for (int i = 0; i < n; ++i) gradients.row(i) = values[i] * (gradients.row(i) - mean);
}

Eigen::VectorXd wachspress_values(const Polygon& p, const Point& x) {
  Eigen::VectorXd v;
  Gradients g;
  wachspress_values_gradients(p, x, v, g);
  return v;
}

Gradients wachspress_gradients(const Polygon& p, const Point& x) {
  Eigen::VectorXd v;
  Gradients g;
  wachspress_values_gradients(p, x, v, g);
  return g;
}

Eigen::VectorXd wachspress_trace(const Polygon& p, int edge, double t) {
  const int n = p.size();
  if (edge < 0 || edge >= n || t < -kBoundaryTolerance || t > 1.0 + kBoundaryTolerance) {
    throw Error(ErrorCode::PointNotOnBoundary, "edge parameter out of range");
  }
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  v[edge] = 1.0 - t;
  v[(edge + 1) % n] = t;
  return v;
}

std::pair<int, double> locate_on_boundary(const Polygon& p, const Point& x) {
  const double tol = kBoundaryTolerance * p.diameter();
  for (int i = 0; i < p.size(); ++i) {
    const Point a = p.vertex(i);
    const Point e = p.vertex(i + 1) - a;
    const double len2 = e.squaredNorm();
    const double t = (x - a).dot(e) / len2;
    if (std::abs(p.edge_distance(i, x)) <= tol && t >= -tol / std::sqrt(len2) &&
        t <= 1.0 + tol / std::sqrt(len2)) {
      return {i, std::clamp(t, 0.0, 1.0)};
    }
  }
  std::ostringstream msg;
  msg << "point (" << x.x() << ", " << x.y() << ") is not on the polygon boundary";
  throw Error(ErrorCode::PointNotOnBoundary, msg.str());
}

Eigen::VectorXd wachspress_trace(const Polygon& p, const Point& x) {
  const auto [edge, t] = locate_on_boundary(p, x);
  return wachspress_trace(p, edge, t);
}

ElementBasis ElementBasis::wachspress(Polygon polygon) { return ElementBasis(std::move(polygon), 1); }

ElementBasis ElementBasis::make(Polygon polygon, int order) {
  if (order == 1) return wachspress(std::move(polygon));
  if (order == 2) return serendipity(std::move(polygon));
  throw Error(ErrorCode::UnsupportedOrder, "element order must be 1 or 2");
}

int ElementBasis::pair_index(int a, int b) const {
  if (a > b) std::swap(a, b);
  const int n = polygon_.size();
  return a * n - a * (a - 1) / 2 + (b - a);
}

ElementBasis ElementBasis::serendipity(Polygon polygon) {
  ElementBasis basis(std::move(polygon), 2);
  const Polygon& p = basis.polygon_;
  const int n = p.size();
  const int nv = 2 * n;
  const int pairs = n * (n + 1) / 2;
  const QuadraticMonomials mono{p.vertex_mean(), p.diameter()};

  Eigen::MatrixXd vandermonde(nv, 6);
  for (int i = 0; i < nv; ++i) {
    const auto row = mono.values(basis.node(i));
    for (int k = 0; k < 6; ++k) vandermonde(i, k) = row[k];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(vandermonde, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sigma = svd.singularValues();
  basis.condition_ = sigma[0] / sigma[sigma.size() - 1];
  if (!(basis.condition_ <= kMaxCondition)) {
    throw Error(ErrorCode::IllConditioned, "serendipity node Vandermonde condition number " +
                                               std::to_string(basis.condition_));
  }

  Eigen::MatrixXd& c = basis.coefficients_;
  c = Eigen::MatrixXd::Zero(nv, pairs);
  // Vertex Kronecker conditions fix the squares, mid-side conditions fix the
  // products of adjacent coordinates. The remaining columns only have to
  // reproduce the polar forms of P2; take the minimum-norm solution of
  // V^T c = 2 B(x_a, x_b).
  for (int a = 0; a < n; ++a) c(a, basis.pair_index(a, a)) = 1.0;
  for (int j = 0; j < n; ++j) {
    const int k = basis.pair_index(j, (j + 1) % n);
    c(n + j, k) = 4.0;
    c(j, k) = -1.0;
    c((j + 1) % n, k) = -1.0;
  }
  const Eigen::MatrixXd pinv_t =
      svd.matrixU() * sigma.cwiseInverse().asDiagonal() * svd.matrixV().transpose();
  for (int a = 0; a < n; ++a) {
    for (int b = a + 2; b < n; ++b) {
      if (a == 0 && b == n - 1) continue;  // adjacent through the closing edge
      const auto polar = mono.polar(p.vertex(a), p.vertex(b));
      Eigen::Matrix<double, 6, 1> rhs;
      for (int k = 0; k < 6; ++k) rhs[k] = 2.0 * polar[k];
      c.col(basis.pair_index(a, b)) = pinv_t * rhs;
    }
  }
  return basis;
}

Point ElementBasis::node(int i) const {
  const int n = polygon_.size();
  if (i < n) return polygon_.vertex(i);
  return 0.5 * (polygon_.vertex(i - n) + polygon_.vertex(i - n + 1));
}

std::vector<Point> ElementBasis::nodes() const {
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(size()));
  for (int i = 0; i < size(); ++i) out.push_back(node(i));
  return out;
}

void ElementBasis::evaluate(const Point& x, Eigen::VectorXd& values, Gradients& gradients) const {
  if (order_ == 1) {
    wachspress_values_gradients(polygon_, x, values, gradients);
    return;
  }
  Eigen::VectorXd phi;
  Gradients dphi;
  wachspress_values_gradients(polygon_, x, phi, dphi);
  const int n = polygon_.size();
  const int pairs = static_cast<int>(coefficients_.cols());
  Eigen::VectorXd prod(pairs);
  Gradients dprod(pairs, 2);
  int k = 0;
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b, ++k) {
      prod[k] = phi[a] * phi[b];
      dprod.row(k) = phi[a] * dphi.row(b) + phi[b] * dphi.row(a);
    }
  }
  values = coefficients_ * prod;
  gradients = coefficients_ * dprod;
}

Eigen::VectorXd ElementBasis::values(const Point& x) const {
  Eigen::VectorXd v;
  Gradients g;
  evaluate(x, v, g);
  return v;
}

Gradients ElementBasis::gradients(const Point& x) const {
  Eigen::VectorXd v;
  Gradients g;
  evaluate(x, v, g);
  return g;
}

Eigen::VectorXd ElementBasis::trace(int edge, double t) const {
  const Eigen::VectorXd phi = wachspress_trace(polygon_, edge, t);
  if (order_ == 1) return phi;
  const int n = polygon_.size();
  const int a = edge;
  const int b = (edge + 1) % n;
  Eigen::VectorXd prod = Eigen::VectorXd::Zero(coefficients_.cols());
  prod[pair_index(a, a)] = phi[a] * phi[a];
  prod[pair_index(b, b)] = phi[b] * phi[b];
  prod[pair_index(a, b)] = phi[a] * phi[b];
  return coefficients_ * prod;
}

Eigen::VectorXd ElementBasis::trace(const Point& x) const {
  const auto [edge, t] = locate_on_boundary(polygon_, x);
  return trace(edge, t);
}

}  // namespace polyproj
