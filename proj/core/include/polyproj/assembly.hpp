#pragma once

#include "polyproj/mesh.hpp"
#include "polyproj/projection.hpp"
#include "polyproj/quadrature.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace polyproj {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class FormMode { Quadrature, Projected, Corrected };

std::string to_string(FormMode mode);
FormMode parse_form_mode(const std::string& name);

struct Discretization {
  int order = 1;  // element order m
  FormMode mode = FormMode::Projected;
  Scheme scheme = Scheme::Quadrangulation;
  int quadrature_order = 1;
  unsigned threads = 1;  // element loop workers; results do not depend on it
};

/// Manufactured solution of -div(K grad u) = f with u = g on the boundary.
struct ExactSolution {
  std::string name;
  std::function<double(const Point&)> u;
  std::function<Eigen::Vector2d(const Point&)> grad_u;
  std::function<double(const Point&)> f;
  DiffusionTensor k = DiffusionTensor::identity();
};

/// Largest |(-div(K grad u))(x) - f(x)| over `samples` pseudo-random points
/// of the unit square, with the divergence of the flux taken by central
/// differences of step `step`.
double manufactured_residual(const ExactSolution& exact, int samples = 50, double step = 1e-4,
                             unsigned seed = 7);

/// Global stiffness. Element errors are rethrown with the element index.
SparseMatrix assemble(const PolygonalMesh& mesh, const Discretization& disc, const DiffusionTensor& k);

/// b_i = sum_E sum_q w_q f(x_q) phi_i(x_q) with the discretization's rule.
Eigen::VectorXd load_vector(const PolygonalMesh& mesh, const Discretization& disc,
                            const std::function<double(const Point&)>& f);

struct GlobalSystem {
  SparseMatrix A;
  Eigen::VectorXd b;
};

/// System restricted to the free dofs after eliminating Dirichlet values.
struct ReducedSystem {
  SparseMatrix A;
  Eigen::VectorXd b;
  std::vector<int> free_dofs;
  std::vector<int> fixed_dofs;
  Eigen::VectorXd fixed_values;
  int num_dofs = 0;

  /// Full nodal vector from a solution on the free dofs.
  Eigen::VectorXd expand(const Eigen::VectorXd& free_solution) const;
};

/// Fixes every boundary node (vertices and, for order 2, mid-side nodes) to
/// g(node) and moves the known columns to the right-hand side.
ReducedSystem apply_dirichlet(const GlobalSystem& sys, const PolygonalMesh& mesh,
                              const std::function<double(const Point&)>& g);

enum class SolverKind { Auto, Direct, ConjugateGradient };

struct SolveReport {
  Eigen::VectorXd x;
  double relative_residual = 0.0;
  SolverKind used = SolverKind::Direct;
  int iterations = 0;
};

/// Sparse LDL^T, falling back to conjugate gradients (relative tolerance
/// 1e-13, at most 10 n iterations). Throws SolverDiverged when the relative
/// residual stays above 1e-12.
SolveReport solve(const SparseMatrix& a, const Eigen::VectorXd& b, SolverKind kind = SolverKind::Auto);

struct ErrorNorms {
  double eps0 = 0.0;       // ||u - u_h||_0 / ||u||_0
  double eps1 = 0.0;       // |u - u_h|_1 / |u|_1, absolute when |u|_1 = 0
  double l2_error = 0.0;
  double h1_error = 0.0;
  double l2_norm = 0.0;
  double h1_norm = 0.0;
};

inline constexpr int kErrorNormOrder = 10;

/// Relative L2 and H1-seminorm errors with an order-`quadrature_order`
/// quadrangulation rule on every element.
ErrorNorms error_norms(const PolygonalMesh& mesh, const Eigen::VectorXd& u_h, const ExactSolution& exact,
                       int quadrature_order = kErrorNormOrder);

/// Assemble, apply boundary data, solve. Returns the full nodal solution.
struct Solution {
  Eigen::VectorXd u_h;
  SolveReport report;
};
Solution solve_problem(const PolygonalMesh& mesh, const Discretization& disc, const ExactSolution& exact,
                       SolverKind kind = SolverKind::Auto);

/// CSV `node_id,x,y,u_h`.
void write_solution_csv(std::ostream& os, const PolygonalMesh& mesh, const Eigen::VectorXd& u_h);

}  // namespace polyproj
