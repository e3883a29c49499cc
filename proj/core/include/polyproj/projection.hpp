#pragma once

#include "polyproj/basis.hpp"
#include "polyproj/quadrature.hpp"

#include <Eigen/Core>

#include <functional>
#include <optional>

namespace polyproj {

/// Symmetric 2x2 diffusion tensor, constant or position dependent, with an
/// optional declared coercivity bound alpha: alpha^-1 |xi|^2 <= xi.K xi <= alpha |xi|^2.
class DiffusionTensor {
 public:
  using FieldFn = std::function<Eigen::Matrix2d(const Point&)>;

  static DiffusionTensor constant(const Eigen::Matrix2d& k, std::optional<double> alpha = std::nullopt);
  static DiffusionTensor identity() { return constant(Eigen::Matrix2d::Identity(), 1.0); }
  static DiffusionTensor field(FieldFn k, std::optional<double> alpha = std::nullopt);

  bool is_constant() const { return !field_; }
  Eigen::Matrix2d at(const Point& x) const { return field_ ? field_(x) : value_; }
  const std::optional<double>& alpha() const { return alpha_; }

  /// Throws Error(NonSPD) if k is not symmetric positive definite or breaks
  /// the declared bound.
  void check(const Eigen::Matrix2d& k) const;

  /// The same tensor multiplied by a positive factor.
  DiffusionTensor scaled(double factor) const;

 private:
  Eigen::Matrix2d value_ = Eigen::Matrix2d::Identity();
  FieldFn field_;
  std::optional<double> alpha_;
};

/// Polynomial basis {1, p_1, ..., p_np} of P_m(E) whose members p_1..p_np
/// have zero mean over the element's dof nodes. Linear members are
/// (x - xbar)/diam; quadratic members are ((x - xbar)/diam)^a((y - ybar)/diam)^b
/// minus their nodal mean.
class PolyBasis {
 public:
  explicit PolyBasis(const ElementBasis& basis);

  int order() const { return order_; }
  int size() const { return order_ == 1 ? 2 : 5; }
  const Point& center() const { return center_; }
  double scale() const { return scale_; }

  /// alpha in [0, size()) selects p_{alpha+1}; the constant is implicit.
  double value(int alpha, const Point& x) const;
  Eigen::Vector2d gradient(int alpha, const Point& x) const;
  Eigen::Matrix2d hessian(int alpha) const;

 private:
  int order_;
  Point center_;
  double scale_;
  Eigen::Vector3d shifts_ = Eigen::Vector3d::Zero();
};

/// Basis values and gradients sampled at every point of a rule.
struct BasisSamples {
  std::vector<Eigen::VectorXd> values;
  std::vector<Gradients> gradients;
};
BasisSamples sample_basis(const ElementBasis& basis, const QuadratureRule& rule);

/// N_ia = p_a(node_i).
Eigen::MatrixXd matrix_N(const ElementBasis& basis, const PolyBasis& poly);

/// R_ia = -sum_q w_q phi_i div(K grad p_a) + int_{dE} phi_i (K grad p_a).n ds.
/// The boundary term is integrated exactly edge by edge; the area term only
/// exists for order 2 and needs a rule of degree >= 2.
Eigen::MatrixXd matrix_R(const ElementBasis& basis, const PolyBasis& poly, const Eigen::Matrix2d& k,
                         const QuadratureRule& rule);
Eigen::MatrixXd matrix_R(const ElementBasis& basis, const PolyBasis& poly, const Eigen::Matrix2d& k,
                         const QuadratureRule& rule, const BasisSamples& samples);

/// Element projection onto P_m: Pi phi_i = 1/n_v + sum_b S_ib p_b.
struct Projector {
  Eigen::MatrixXd G;  // N^T R
  Eigen::MatrixXd S;  // R G^-1
  double gram_condition = 0.0;
};

/// Throws Error(SingularGram) if G is singular or its condition number exceeds 1e12.
Projector make_projector(const Eigen::MatrixXd& R, const Eigen::MatrixXd& N);

/// Pi applied to a nodal vector: constant + sum_b coeff_b p_b.
struct ProjectedPolynomial {
  double constant = 0.0;
  Eigen::VectorXd coefficients;

  double value(const PolyBasis& poly, const Point& x) const;
  Eigen::Vector2d gradient(const PolyBasis& poly, const Point& x) const;
};
ProjectedPolynomial project(const Projector& projector, const Eigen::VectorXd& nodal);

/// P = I - U/n_v - S N^T; row i holds the coefficients of phi_i - Pi phi_i.
Eigen::MatrixXd remainder_operator(const Projector& projector, const Eigen::MatrixXd& N);

/// K_kl = sum_q w_q grad(phi_k) . K(x_q) grad(phi_l).
Eigen::MatrixXd element_stiffness_quadrature(const ElementBasis& basis, const DiffusionTensor& k,
                                             const QuadratureRule& rule);
Eigen::MatrixXd element_stiffness_quadrature(const BasisSamples& samples, const DiffusionTensor& k,
                                             const QuadratureRule& rule);

struct ProjectionData {
  Eigen::MatrixXd N;
  Eigen::MatrixXd R;
  Eigen::MatrixXd G;
  Eigen::MatrixXd S;
  Eigen::MatrixXd P;
  Eigen::MatrixXd K_quad;   // quadrature stiffness with the element tensor K_E
  Eigen::MatrixXd K_tilde;  // quadrature stiffness with the full field (corrected form only)
  Eigen::MatrixXd K_elem;
  Eigen::Matrix2d K_E = Eigen::Matrix2d::Identity();
  double gram_condition = 0.0;
};

/// K_elem = R G^-1 R^T + P K_quad P^T for a constant tensor K_E.
ProjectionData element_stiffness_projected(const ElementBasis& basis, const PolyBasis& poly,
                                           const Eigen::Matrix2d& k_element, const QuadratureRule& rule);

/// K_E = (sum_q w_q K(x_q)) / |E|.
Eigen::Matrix2d element_average(const DiffusionTensor& k, const QuadratureRule& rule, double area);

/// Projected stiffness with K_E plus the correction (K_tilde - K_quad).
ProjectionData element_stiffness_corrected(const ElementBasis& basis, const PolyBasis& poly,
                                           const DiffusionTensor& k, const QuadratureRule& rule);

struct StabilityBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Extreme generalized eigenvalues of K_elem against the high-order reference
/// stiffness, on the complement of the constants.
StabilityBounds stability_audit(const Eigen::MatrixXd& k_elem, const ElementBasis& basis,
                                const DiffusionTensor& k, const QuadratureRule& reference_rule);

}  // namespace polyproj
