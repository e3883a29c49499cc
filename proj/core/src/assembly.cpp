#include "polyproj/assembly.hpp"

#include "polyproj/errors.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <exception>
#include <iomanip>
#include <ostream>
#include <random>
#include <thread>

namespace polyproj {

std::string to_string(FormMode mode) {
  switch (mode) {
    case FormMode::Quadrature: return "quadrature";
    case FormMode::Projected: return "projected";
    case FormMode::Corrected: return "corrected";
  }
  return "unknown";
}

FormMode parse_form_mode(const std::string& name) {
  if (name == "quadrature") return FormMode::Quadrature;
  if (name == "projected") return FormMode::Projected;
  if (name == "corrected") return FormMode::Corrected;
  throw Error(ErrorCode::InvalidArgument, "unknown form mode '" + name + "'");
}

double manufactured_residual(const ExactSolution& exact, int samples, double step, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> coord(0.05, 0.95);
  auto flux = [&](const Point& x) -> Eigen::Vector2d { return exact.k.at(x) * exact.grad_u(x); };
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Point x(coord(rng), coord(rng));
    const Point dx(step, 0.0);
    const Point dy(0.0, step);
    const double div = (flux(x + dx).x() - flux(x - dx).x()) / (2.0 * step) +
                       (flux(x + dy).y() - flux(x - dy).y()) / (2.0 * step);
    worst = std::max(worst, std::abs(-div - exact.f(x)));
  }
  return worst;
}

namespace {

void require_matching_order(const PolygonalMesh& mesh, const Discretization& disc) {
  if (disc.order != 1 && disc.order != 2) {
    throw Error(ErrorCode::UnsupportedOrder, "element order must be 1 or 2");
  }
  if (mesh.order() != disc.order) {
    throw Error(ErrorCode::InvalidArgument,
                "mesh carries order-" + std::to_string(mesh.order()) + " dofs but the discretization is order " +
                    std::to_string(disc.order) + (disc.order == 2 ? " (call add_midside_nodes)" : ""));
  }
}

Eigen::MatrixXd element_matrix(const ElementBasis& basis, const Discretization& disc, const DiffusionTensor& k,
                               const QuadratureRule& rule) {
  switch (disc.mode) {
    case FormMode::Quadrature:
      return element_stiffness_quadrature(basis, k, rule);
    case FormMode::Projected: {
      const PolyBasis poly(basis);
      const Eigen::Matrix2d k_e =
          k.is_constant() ? k.at(Point::Zero()) : element_average(k, rule, basis.polygon().area());
      return element_stiffness_projected(basis, poly, k_e, rule).K_elem;
    }
    case FormMode::Corrected: {
      const PolyBasis poly(basis);
      if (k.is_constant()) return element_stiffness_projected(basis, poly, k.at(Point::Zero()), rule).K_elem;
      return element_stiffness_corrected(basis, poly, k, rule).K_elem;
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown form mode");
}

// Runs body(e) for every element on `threads` workers; exceptions are
// rethrown for the lowest failing element index with the index attached.
template <class Body>
void for_each_element(int count, unsigned threads, Body&& body) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  auto run = [&](unsigned worker, unsigned stride) {
    for (int e = static_cast<int>(worker); e < count; e += static_cast<int>(stride)) {
      try {
        body(e);
      } catch (...) {
        errors[e] = std::current_exception();
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max(count, 1))));
  if (workers == 1) {
    run(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w, workers);
  }
  for (int e = 0; e < count; ++e) {
    if (!errors[e]) continue;
    try {
      std::rethrow_exception(errors[e]);
    } catch (const Error& err) {
      throw Error(err.code(), "element " + std::to_string(e) + ": " + err.what());
    }
  }
}

}  // namespace

SparseMatrix assemble(const PolygonalMesh& mesh, const Discretization& disc, const DiffusionTensor& k) {
  require_matching_order(mesh, disc);
  const int ne = mesh.num_elements();
  std::vector<Eigen::MatrixXd> local(static_cast<std::size_t>(ne));
  for_each_element(ne, disc.threads, [&](int e) {
    const ElementBasis basis = ElementBasis::make(mesh.element_polygon(e), disc.order);
    const QuadratureRule rule = rule_on_polygon(basis.polygon(), disc.scheme, disc.quadrature_order);
    local[e] = element_matrix(basis, disc, k, rule);
  });

  std::vector<Eigen::Triplet<double>> triplets;
  for (int e = 0; e < ne; ++e) {
    const std::vector<int> dofs = mesh.element_dofs(e);
    for (std::size_t i = 0; i < dofs.size(); ++i)
      for (std::size_t j = 0; j < dofs.size(); ++j)
        triplets.emplace_back(dofs[i], dofs[j], local[e](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
  }
  SparseMatrix a(mesh.num_nodes(), mesh.num_nodes());
  a.setFromTriplets(triplets.begin(), triplets.end());
  return a;
}

Eigen::VectorXd load_vector(const PolygonalMesh& mesh, const Discretization& disc,
                            const std::function<double(const Point&)>& f) {
  require_matching_order(mesh, disc);
  const int ne = mesh.num_elements();
  std::vector<Eigen::VectorXd> local(static_cast<std::size_t>(ne));
  for_each_element(ne, disc.threads, [&](int e) {
    const ElementBasis basis = ElementBasis::make(mesh.element_polygon(e), disc.order);
    const QuadratureRule rule = rule_on_polygon(basis.polygon(), disc.scheme, disc.quadrature_order);
    Eigen::VectorXd be = Eigen::VectorXd::Zero(basis.size());
    Eigen::VectorXd values;
    Gradients grads;
    for (int q = 0; q < rule.size(); ++q) {
      const double fq = f(rule.points[q]);
      if (fq == 0.0) continue;
      basis.evaluate(rule.points[q], values, grads);
      be += (rule.weights[q] * fq) * values;
    }
    local[e] = std::move(be);
  });
  Eigen::VectorXd b = Eigen::VectorXd::Zero(mesh.num_nodes());
  for (int e = 0; e < ne; ++e) {
    const std::vector<int> dofs = mesh.element_dofs(e);
    for (std::size_t i = 0; i < dofs.size(); ++i) b[dofs[i]] += local[e][static_cast<Eigen::Index>(i)];
  }
  return b;
}

Eigen::VectorXd ReducedSystem::expand(const Eigen::VectorXd& free_solution) const {
  Eigen::VectorXd out(num_dofs);
  for (std::size_t i = 0; i < free_dofs.size(); ++i) out[free_dofs[i]] = free_solution[static_cast<Eigen::Index>(i)];
  for (std::size_t i = 0; i < fixed_dofs.size(); ++i) out[fixed_dofs[i]] = fixed_values[static_cast<Eigen::Index>(i)];
  return out;
}

ReducedSystem apply_dirichlet(const GlobalSystem& sys, const PolygonalMesh& mesh,
                              const std::function<double(const Point&)>& g) {
  const int n = static_cast<int>(sys.A.rows());
  if (n != mesh.num_nodes() || sys.b.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "system size does not match the mesh");
  }
  ReducedSystem out;
  out.num_dofs = n;
  std::vector<int> map(static_cast<std::size_t>(n), -1);
  Eigen::VectorXd values = Eigen::VectorXd::Zero(n);
  std::vector<char> fixed(static_cast<std::size_t>(n), 0);
  for (int i : mesh.boundary_nodes()) fixed[i] = 1;
  for (int i = 0; i < n; ++i) {
    if (fixed[i]) {
      values[i] = g(mesh.nodes()[i]);
      out.fixed_dofs.push_back(i);
    } else {
      map[i] = static_cast<int>(out.free_dofs.size());
      out.free_dofs.push_back(i);
    }
  }
  out.fixed_values.resize(static_cast<Eigen::Index>(out.fixed_dofs.size()));
  for (std::size_t i = 0; i < out.fixed_dofs.size(); ++i) out.fixed_values[static_cast<Eigen::Index>(i)] = values[out.fixed_dofs[i]];

  const auto nf = static_cast<Eigen::Index>(out.free_dofs.size());
  out.b.resize(nf);
  for (Eigen::Index i = 0; i < nf; ++i) out.b[i] = sys.b[out.free_dofs[static_cast<std::size_t>(i)]];
  std::vector<Eigen::Triplet<double>> triplets;
  for (int col = 0; col < n; ++col) {
    for (SparseMatrix::InnerIterator it(sys.A, col); it; ++it) {
      const int row = static_cast<int>(it.row());
      if (map[row] < 0) continue;
      if (map[col] >= 0) {
        triplets.emplace_back(map[row], map[col], it.value());
      } else {
        out.b[map[row]] -= it.value() * values[col];
      }
    }
  }
  out.A.resize(nf, nf);
  out.A.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

SolveReport solve(const SparseMatrix& a, const Eigen::VectorXd& b, SolverKind kind) {
  SolveReport report;
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    report.x = Eigen::VectorXd::Zero(a.cols());
    return report;
  }
  auto residual = [&](const Eigen::VectorXd& x) { return (a * x - b).norm() / bnorm; };

  if (kind != SolverKind::ConjugateGradient) {
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(a);
    if (ldlt.info() == Eigen::Success) {
      Eigen::VectorXd x = ldlt.solve(b);
      const double r = residual(x);
      if (ldlt.info() == Eigen::Success && r <= 1e-12) {
        report.x = std::move(x);
        report.relative_residual = r;
        report.used = SolverKind::Direct;
        return report;
      }
    }
    if (kind == SolverKind::Direct) {
      throw Error(ErrorCode::SolverDiverged, "sparse LDL^T factorization failed");
    }
  }

  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(1e-13);
  cg.setMaxIterations(10 * static_cast<Eigen::Index>(a.rows()));
  cg.compute(a);
  Eigen::VectorXd x = cg.solve(b);
  const double r = residual(x);
  if (cg.info() != Eigen::Success || !(r <= 1e-12)) {
    throw Error(ErrorCode::SolverDiverged,
                "conjugate gradients stopped at relative residual " + std::to_string(r) + " after " +
                    std::to_string(cg.iterations()) + " iterations");
  }
  report.x = std::move(x);
  report.relative_residual = r;
  report.used = SolverKind::ConjugateGradient;
  report.iterations = static_cast<int>(cg.iterations());
  return report;
}

ErrorNorms error_norms(const PolygonalMesh& mesh, const Eigen::VectorXd& u_h, const ExactSolution& exact,
                       int quadrature_order) {
  if (u_h.size() != mesh.num_nodes()) throw Error(ErrorCode::InvalidArgument, "solution size mismatch");
  double e0 = 0.0, e1 = 0.0, n0 = 0.0, n1 = 0.0;
  Eigen::VectorXd values;
  Gradients grads;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const ElementBasis basis = ElementBasis::make(mesh.element_polygon(e), mesh.order());
    const QuadratureRule rule = rule_on_polygon(basis.polygon(), Scheme::Quadrangulation, quadrature_order);
    const std::vector<int> dofs = mesh.element_dofs(e);
    Eigen::VectorXd local(static_cast<Eigen::Index>(dofs.size()));
    for (std::size_t i = 0; i < dofs.size(); ++i) local[static_cast<Eigen::Index>(i)] = u_h[dofs[i]];
    for (int q = 0; q < rule.size(); ++q) {
      const Point& x = rule.points[q];
      basis.evaluate(x, values, grads);
      const double u = exact.u(x);
      const Eigen::Vector2d gu = exact.grad_u(x);
      const double uh = values.dot(local);
      const Eigen::Vector2d guh = grads.transpose() * local;
      const double w = rule.weights[q];
      e0 += w * (u - uh) * (u - uh);
      e1 += w * (gu - guh).squaredNorm();
      n0 += w * u * u;
      n1 += w * gu.squaredNorm();
    }
  }
  ErrorNorms out;
  out.l2_error = std::sqrt(e0);
  out.h1_error = std::sqrt(e1);
  out.l2_norm = std::sqrt(n0);
  out.h1_norm = std::sqrt(n1);
  out.eps0 = out.l2_norm > 0.0 ? out.l2_error / out.l2_norm : out.l2_error;
  out.eps1 = out.h1_norm > 0.0 ? out.h1_error / out.h1_norm : out.h1_error;
  return out;
}

Solution solve_problem(const PolygonalMesh& mesh, const Discretization& disc, const ExactSolution& exact,
                       SolverKind kind) {
  GlobalSystem sys{assemble(mesh, disc, exact.k), load_vector(mesh, disc, exact.f)};
  const ReducedSystem reduced = apply_dirichlet(sys, mesh, exact.u);
  Solution out;
  out.report = solve(reduced.A, reduced.b, kind);
  out.u_h = reduced.expand(out.report.x);
  return out;
}

void write_solution_csv(std::ostream& os, const PolygonalMesh& mesh, const Eigen::VectorXd& u_h) {
  os << "node_id,x,y,u_h\n" << std::scientific << std::setprecision(15);
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    os << i << ',' << mesh.nodes()[i].x() << ',' << mesh.nodes()[i].y() << ',' << u_h[i] << '\n';
  }
}

}  // namespace polyproj
