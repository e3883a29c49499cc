#include "polyproj/problems.hpp"

#include "polyproj/errors.hpp"

#include <cmath>
#include <numbers>

namespace polyproj::problems {

ExactSolution linear_patch() {
  ExactSolution s;
  s.name = "linear-patch";
  s.u = [](const Point& x) { return 2.0 * x.x() - x.y() + 4.0; };
  s.grad_u = [](const Point&) { return Eigen::Vector2d(2.0, -1.0); };
  s.f = [](const Point&) { return 0.0; };
  return s;
}

ExactSolution quadratic_patch() {
  ExactSolution s;
  s.name = "quadratic-patch";
  s.u = [](const Point& x) {
    return x.x() * x.x() - 3.0 * x.x() * x.y() - x.y() * x.y() + 5.0 * x.x();
  };
  s.grad_u = [](const Point& x) {
    return Eigen::Vector2d(2.0 * x.x() - 3.0 * x.y() + 5.0, -3.0 * x.x() - 2.0 * x.y());
  };
  s.f = [](const Point&) { return 0.0; };
  return s;
}

ExactSolution smooth1() {
  ExactSolution s;
  s.name = "smooth1";
  s.u = [](const Point& x) { return std::sin(x.x()) * std::exp(x.y()); };
  s.grad_u = [](const Point& x) {
    const double e = std::exp(x.y());
    return Eigen::Vector2d(std::cos(x.x()) * e, std::sin(x.x()) * e);
  };
  s.f = [](const Point&) { return 0.0; };
  return s;
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct VarKDerivatives {
  double ux, uy, uxx, uxy, uyy;
};

VarKDerivatives varK_derivatives(double x, double y) {
  constexpr double a = kTwoPi;
  const double s = std::sin(a * x * y);
  const double c = std::cos(a * x * y);
  const double t = std::sin(a * y);
  const double d = std::cos(a * y);
  VarKDerivatives r;
  r.ux = 3 * x * x * y * y + s * t + a * x * y * c * t;
  r.uy = 2 * x * x * x * y + a * x * x * c * t + a * x * s * d;
  r.uxx = 6 * x * y * y + 2 * a * y * c * t - a * a * x * y * y * s * t;
  r.uxy = 6 * x * x * y + 2 * a * x * c * t + a * s * d - a * a * x * x * y * s * t + a * a * x * y * c * d;
  r.uyy = 2 * x * x * x - a * a * x * x * x * s * t + 2 * a * a * x * x * c * d - a * a * x * s * t;
  return r;
}

}  // namespace

ExactSolution variable_coefficient() {
  ExactSolution s;
  s.name = "varK";
  s.u = [](const Point& p) {
    const double x = p.x();
    const double y = p.y();
    return x * x * x * y * y + x * std::sin(kTwoPi * x * y) * std::sin(kTwoPi * y);
  };
  s.grad_u = [](const Point& p) {
    const VarKDerivatives d = varK_derivatives(p.x(), p.y());
    return Eigen::Vector2d(d.ux, d.uy);
  };
  // f = -div(K grad u), expanded with the product rule.
  s.f = [](const Point& p) {
    const double x = p.x();
    const double y = p.y();
    const VarKDerivatives d = varK_derivatives(x, y);
    const double k11 = (x + 1) * (x + 1) + y * y;
    const double k12 = -x * y;
    const double k22 = (x + 1) * (x + 1);
    const double div = 2 * (x + 1) * d.ux + k11 * d.uxx  // d/dx (k11 u_x)
                       - y * d.uy + k12 * d.uxy          // d/dx (k12 u_y)
                       - x * d.ux + k12 * d.uxy          // d/dy (k12 u_x)
                       + k22 * d.uyy;                    // d/dy (k22 u_y)
    return -div;
  };
  // Eigenvalues on the unit square lie in [1, 5.62].
  s.k = DiffusionTensor::field(
      [](const Point& p) {
        const double x = p.x();
        const double y = p.y();
        Eigen::Matrix2d k;
        k << (x + 1) * (x + 1) + y * y, -x * y, -x * y, (x + 1) * (x + 1);
        return k;
      },
      6.0);
  return s;
}

ExactSolution patch(int order) {
  if (order == 1) return linear_patch();
  if (order == 2) return quadratic_patch();
  throw Error(ErrorCode::UnsupportedOrder, "patch tests exist for orders 1 and 2");
}

ExactSolution by_name(const std::string& name) {
  if (name == "smooth1") return smooth1();
  if (name == "varK") return variable_coefficient();
  if (name == "linear-patch") return linear_patch();
  if (name == "quadratic-patch") return quadratic_patch();
  throw Error(ErrorCode::InvalidArgument, "unknown problem '" + name + "'");
}

}  // namespace polyproj::problems
