#include "polyproj/projection.hpp"

#include "polyproj/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <sstream>

namespace polyproj {

namespace {

constexpr double kMaxGramCondition = 1e12;

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& a) { return 0.5 * (a + a.transpose()); }

}  // namespace

DiffusionTensor DiffusionTensor::constant(const Eigen::Matrix2d& k, std::optional<double> alpha) {
  DiffusionTensor t;
  t.value_ = k;
  t.alpha_ = alpha;
  t.check(k);
  return t;
}

DiffusionTensor DiffusionTensor::field(FieldFn k, std::optional<double> alpha) {
  if (!k) throw Error(ErrorCode::InvalidArgument, "diffusion field is empty");
  DiffusionTensor t;
  t.field_ = std::move(k);
  t.alpha_ = alpha;
  return t;
}

void DiffusionTensor::check(const Eigen::Matrix2d& k) const {
  const double asym = std::abs(k(0, 1) - k(1, 0));
  if (!(asym <= 1e-12 * k.cwiseAbs().maxCoeff())) {
    throw Error(ErrorCode::NonSPD, "diffusion tensor is not symmetric");
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(k);
  const double lo = eig.eigenvalues()[0];
  const double hi = eig.eigenvalues()[1];
  if (!(lo > 0.0)) throw Error(ErrorCode::NonSPD, "diffusion tensor is not positive definite");
  if (alpha_) {
    const double slack = 1e-12 * *alpha_;
    if (lo < 1.0 / *alpha_ - slack || hi > *alpha_ + slack) {
      std::ostringstream msg;
      msg << "diffusion tensor eigenvalues [" << lo << ", " << hi << "] outside [1/" << *alpha_
          << ", " << *alpha_ << "]";
      throw Error(ErrorCode::NonSPD, msg.str());
    }
  }
}

DiffusionTensor DiffusionTensor::scaled(double factor) const {
  if (!(factor > 0.0)) throw Error(ErrorCode::InvalidArgument, "scale factor must be positive");
  DiffusionTensor t;
  if (field_) {
    t.field_ = [f = field_, factor](const Point& x) -> Eigen::Matrix2d { return factor * f(x); };
  } else {
    t.value_ = factor * value_;
  }
  if (alpha_) t.alpha_ = *alpha_ * std::max(factor, 1.0 / factor);
  return t;
}

PolyBasis::PolyBasis(const ElementBasis& basis)
    : order_(basis.order()), center_(basis.polygon().vertex_mean()), scale_(basis.polygon().diameter()) {
  if (order_ == 2) {
    for (const Point& x : basis.nodes()) {
      const Point s = (x - center_) / scale_;
      shifts_ += Eigen::Vector3d(s.x() * s.x(), s.x() * s.y(), s.y() * s.y());
    }
    shifts_ /= basis.size();
  }
}

double PolyBasis::value(int alpha, const Point& x) const {
  const Point s = (x - center_) / scale_;
  switch (alpha) {
    case 0: return s.x();
    case 1: return s.y();
    case 2: return s.x() * s.x() - shifts_[0];
    case 3: return s.x() * s.y() - shifts_[1];
    case 4: return s.y() * s.y() - shifts_[2];
    default: throw Error(ErrorCode::InvalidArgument, "polynomial index out of range");
  }
}

Eigen::Vector2d PolyBasis::gradient(int alpha, const Point& x) const {
  const Point s = (x - center_) / scale_;
  const double d = 1.0 / scale_;
  switch (alpha) {
    case 0: return {d, 0.0};
    case 1: return {0.0, d};
    case 2: return {2.0 * s.x() * d, 0.0};
    case 3: return {s.y() * d, s.x() * d};
    case 4: return {0.0, 2.0 * s.y() * d};
    default: throw Error(ErrorCode::InvalidArgument, "polynomial index out of range");
  }
}

Eigen::Matrix2d PolyBasis::hessian(int alpha) const {
  const double d2 = 1.0 / (scale_ * scale_);
  Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
  switch (alpha) {
    case 0:
    case 1: break;
    case 2: h(0, 0) = 2.0 * d2; break;
    case 3: h(0, 1) = h(1, 0) = d2; break;
    case 4: h(1, 1) = 2.0 * d2; break;
    default: throw Error(ErrorCode::InvalidArgument, "polynomial index out of range");
  }
  return h;
}

BasisSamples sample_basis(const ElementBasis& basis, const QuadratureRule& rule) {
  BasisSamples s;
  s.values.resize(static_cast<std::size_t>(rule.size()));
  s.gradients.resize(static_cast<std::size_t>(rule.size()));
  for (int q = 0; q < rule.size(); ++q) basis.evaluate(rule.points[q], s.values[q], s.gradients[q]);
  return s;
}

Eigen::MatrixXd matrix_N(const ElementBasis& basis, const PolyBasis& poly) {
  Eigen::MatrixXd n(basis.size(), poly.size());
  for (int i = 0; i < basis.size(); ++i) {
    const Point x = basis.node(i);
    for (int a = 0; a < poly.size(); ++a) n(i, a) = poly.value(a, x);
  }
  return n;
}

Eigen::MatrixXd matrix_R(const ElementBasis& basis, const PolyBasis& poly, const Eigen::Matrix2d& k,
                         const QuadratureRule& rule) {
  if (basis.order() == 1) return matrix_R(basis, poly, k, rule, BasisSamples{});
  return matrix_R(basis, poly, k, rule, sample_basis(basis, rule));
}

Eigen::MatrixXd matrix_R(const ElementBasis& basis, const PolyBasis& poly, const Eigen::Matrix2d& k,
                         const QuadratureRule& rule, const BasisSamples& samples) {
  const Polygon& p = basis.polygon();
  const int nv = basis.size();
  const int np = poly.size();
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(nv, np);

  // Traces are polynomials of degree m along each edge and the flux has
  // degree m - 1, so m + 1 Gauss points integrate the edge term exactly.
  const GaussLegendre& g = gauss_legendre(basis.order() + 1);
  for (int e = 0; e < p.size(); ++e) {
    const Point a = p.vertex(e);
    const Point b = p.vertex(e + 1);
    const Point normal = p.edge_normal(e);  // outward, scaled by the edge length
    for (std::size_t j = 0; j < g.nodes.size(); ++j) {
      const double t = 0.5 * (g.nodes[j] + 1.0);
      const double w = 0.5 * g.weights[j];
      const Point x = (1.0 - t) * a + t * b;
      const Eigen::VectorXd trace = basis.trace(e, t);
      for (int al = 0; al < np; ++al) {
        const double flux = (k * poly.gradient(al, x)).dot(normal);
        r.col(al) += (w * flux) * trace;
      }
    }
  }

  if (basis.order() == 2) {
    if (rule.order < 2) {
      throw Error(ErrorCode::InsufficientQuadrature,
                  "quadratic elements need a rule exact for degree 2, got order " +
                      std::to_string(rule.order));
    }
    if (static_cast<int>(samples.values.size()) != rule.size()) {
      throw Error(ErrorCode::InvalidArgument, "basis samples do not match the rule");
    }
    Eigen::VectorXd moments = Eigen::VectorXd::Zero(nv);
    for (int q = 0; q < rule.size(); ++q) moments += rule.weights[q] * samples.values[q];
    for (int al = 0; al < np; ++al) {
      const double div = (k.array() * poly.hessian(al).array()).sum();  // div(K grad p) = K:H
      if (div != 0.0) r.col(al) -= div * moments;
    }
  }
  return r;
}

Projector make_projector(const Eigen::MatrixXd& R, const Eigen::MatrixXd& N) {
  Projector out;
  out.G = N.transpose() * R;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(out.G);
  const auto& sigma = svd.singularValues();
  out.gram_condition = sigma[0] / sigma[sigma.size() - 1];
  if (!std::isfinite(out.gram_condition) || out.gram_condition > kMaxGramCondition) {
    throw Error(ErrorCode::SingularGram,
                "projection Gram matrix condition number " + std::to_string(out.gram_condition));
  }
  // G equals a^E(p_a, p_b) and is symmetric up to rounding.
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(symmetrized(out.G));
  out.S = lu.solve(R.transpose()).transpose();
  return out;
}

double ProjectedPolynomial::value(const PolyBasis& poly, const Point& x) const {
  double v = constant;
  for (int a = 0; a < coefficients.size(); ++a) v += coefficients[a] * poly.value(a, x);
  return v;
}

Eigen::Vector2d ProjectedPolynomial::gradient(const PolyBasis& poly, const Point& x) const {
  Eigen::Vector2d g = Eigen::Vector2d::Zero();
  for (int a = 0; a < coefficients.size(); ++a) g += coefficients[a] * poly.gradient(a, x);
  return g;
}

ProjectedPolynomial project(const Projector& projector, const Eigen::VectorXd& nodal) {
  ProjectedPolynomial out;
  out.constant = nodal.mean();
  out.coefficients = projector.S.transpose() * nodal;
  return out;
}

Eigen::MatrixXd remainder_operator(const Projector& projector, const Eigen::MatrixXd& N) {
  const auto nv = N.rows();
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(nv, nv);
  p.array() -= 1.0 / static_cast<double>(nv);
  p -= projector.S * N.transpose();
  return p;
}

Eigen::MatrixXd element_stiffness_quadrature(const BasisSamples& samples, const DiffusionTensor& k,
                                             const QuadratureRule& rule) {
  if (samples.gradients.empty()) throw Error(ErrorCode::InvalidArgument, "empty quadrature rule");
  const auto nv = samples.gradients.front().rows();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(nv, nv);
  const Eigen::Matrix2d kc = k.is_constant() ? k.at(Point::Zero()) : Eigen::Matrix2d::Identity();
  for (int q = 0; q < rule.size(); ++q) {
    const Gradients& g = samples.gradients[q];
    const Eigen::Matrix2d kq = k.is_constant() ? kc : k.at(rule.points[q]);
    out.noalias() += rule.weights[q] * (g * kq * g.transpose());
  }
  return symmetrized(out);
}

Eigen::MatrixXd element_stiffness_quadrature(const ElementBasis& basis, const DiffusionTensor& k,
                                             const QuadratureRule& rule) {
  return element_stiffness_quadrature(sample_basis(basis, rule), k, rule);
}

namespace {

ProjectionData projected_from_samples(const ElementBasis& basis, const PolyBasis& poly,
                                      const Eigen::Matrix2d& k_element, const QuadratureRule& rule,
                                      const BasisSamples& samples) {
  ProjectionData d;
  d.K_E = k_element;
  d.N = matrix_N(basis, poly);
  d.R = matrix_R(basis, poly, k_element, rule, samples);
  const Projector proj = make_projector(d.R, d.N);
  d.G = proj.G;
  d.S = proj.S;
  d.gram_condition = proj.gram_condition;
  d.P = remainder_operator(proj, d.N);
  d.K_quad = element_stiffness_quadrature(samples, DiffusionTensor::constant(k_element), rule);
  d.K_elem = symmetrized(d.S * d.R.transpose() + d.P * d.K_quad * d.P.transpose());
  return d;
}

}  // namespace

ProjectionData element_stiffness_projected(const ElementBasis& basis, const PolyBasis& poly,
                                           const Eigen::Matrix2d& k_element, const QuadratureRule& rule) {
  DiffusionTensor::constant(k_element);  // validates symmetry and definiteness
  if (basis.order() == 2 && rule.order < 2) {
    throw Error(ErrorCode::InsufficientQuadrature, "quadratic elements need a rule of order >= 2");
  }
  return projected_from_samples(basis, poly, k_element, rule, sample_basis(basis, rule));
}

Eigen::Matrix2d element_average(const DiffusionTensor& k, const QuadratureRule& rule, double area) {
  Eigen::Matrix2d sum = Eigen::Matrix2d::Zero();
  for (int q = 0; q < rule.size(); ++q) {
    const Eigen::Matrix2d kq = k.at(rule.points[q]);
    if (k.alpha()) k.check(kq);
    sum += rule.weights[q] * kq;
  }
  return sum / area;
}

ProjectionData element_stiffness_corrected(const ElementBasis& basis, const PolyBasis& poly,
                                           const DiffusionTensor& k, const QuadratureRule& rule) {
  if (basis.order() == 2 && rule.order < 2) {
    throw Error(ErrorCode::InsufficientQuadrature, "quadratic elements need a rule of order >= 2");
  }
  const Eigen::Matrix2d k_element = element_average(k, rule, basis.polygon().area());
  k.check(k_element);
  const BasisSamples samples = sample_basis(basis, rule);
  ProjectionData d = projected_from_samples(basis, poly, k_element, rule, samples);
  d.K_tilde = element_stiffness_quadrature(samples, k, rule);
  d.K_elem += d.K_tilde - d.K_quad;
  return d;
}

StabilityBounds stability_audit(const Eigen::MatrixXd& k_elem, const ElementBasis& basis,
                                const DiffusionTensor& k, const QuadratureRule& reference_rule) {
  const Eigen::MatrixXd reference = element_stiffness_quadrature(basis, k, reference_rule);
  const auto nv = k_elem.rows();
  // Orthonormal basis of the complement of the constant vector.
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(Eigen::MatrixXd::Ones(nv, 1));
  const Eigen::MatrixXd q = Eigen::MatrixXd(qr.householderQ()).rightCols(nv - 1);
  const Eigen::MatrixXd a = symmetrized(q.transpose() * k_elem * q);
  const Eigen::MatrixXd b = symmetrized(q.transpose() * reference * q);
  const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, b);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::NonSPD, "reference stiffness is not positive definite off the constants");
  }
  return {eig.eigenvalues().minCoeff(), eig.eigenvalues().maxCoeff()};
}

}  // namespace polyproj
