#include "polyproj/errors.hpp"
#include "polyproj/problems.hpp"
#include "polyproj/projection.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <random>

using namespace polyproj;

namespace {

Polygon unit_square() { return make_polygon(oracle::unit_square_vertices()); }

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

// Exact a(p_a, phi_i) columns by brute-force high-order quadrature.
Eigen::MatrixXd energy_columns(const ElementBasis& b, const PolyBasis& poly, const Eigen::Matrix2d& k) {
  const QuadratureRule r = rule_on_polygon(b.polygon(), Scheme::Quadrangulation, 32);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(b.size(), poly.size());
  for (int q = 0; q < r.size(); ++q) {
    const Gradients g = b.gradients(r.points[q]);
    for (int a = 0; a < poly.size(); ++a) out.col(a) += r.weights[q] * g * (k * poly.gradient(a, r.points[q]));
  }
  return out;
}

const Eigen::Matrix2d kAniso = (Eigen::Matrix2d() << 2.0, 0.3, 0.3, 0.7).finished();

}  // namespace

TEST(PolyBasis, NodalMeansVanishAndSpanIsFull) {
  for (const auto& [name, p] : oracle::template_polygons()) {
    for (int m : {1, 2}) {
      const ElementBasis b = ElementBasis::make(p, m);
      const PolyBasis poly(b);
      const Eigen::MatrixXd N = matrix_N(b, poly);
      ASSERT_EQ(N.cols(), poly.size());
      EXPECT_LE(N.colwise().mean().cwiseAbs().maxCoeff(), 1e-13) << name;
      Eigen::MatrixXd V(N.rows(), N.cols() + 1);
      V << Eigen::VectorXd::Ones(N.rows()), N;
      EXPECT_EQ(Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(V).rank(), poly.size() + 1) << name;
    }
  }
}

TEST(PolyBasis, GradientsAndHessiansMatchFiniteDifferences) {
  const Polygon p = oracle::template_polygons()[4].polygon;
  const ElementBasis b = ElementBasis::serendipity(p);
  const PolyBasis poly(b);
  const double h = 1e-5;
  for (int a = 0; a < poly.size(); ++a) {
    for (const Point& x : oracle::interior_points(p, 5)) {
      const Eigen::MatrixXd fd =
          oracle::fd_gradient([&](const Point& y) { return Eigen::VectorXd::Constant(1, poly.value(a, y)); }, x, h);
      EXPECT_LE((fd.row(0).transpose() - poly.gradient(a, x)).norm(), 1e-8);
      const Eigen::MatrixXd hfd = oracle::fd_gradient([&](const Point& y) { return Eigen::VectorXd(poly.gradient(a, y)); }, x, h);
      EXPECT_LE((hfd - poly.hessian(a)).norm(), 1e-6);
    }
  }
}

TEST(MatrixN, UnitSquareColumn) {
  const ElementBasis b = ElementBasis::wachspress(unit_square());
  const PolyBasis poly(b);
  const Eigen::MatrixXd N = matrix_N(b, poly);
  // p_1 = (x - 0.5) / sqrt(2).
  const Eigen::Vector4d want = Eigen::Vector4d(-0.5, 0.5, 0.5, -0.5) / std::sqrt(2.0);
  EXPECT_LE((N.col(0) - want).norm(), 1e-15);
  const ElementBasis b2 = ElementBasis::serendipity(unit_square());
  const Eigen::MatrixXd N2 = matrix_N(b2, PolyBasis(b2));
  EXPECT_EQ(N2.rows(), 8);
  EXPECT_EQ(N2.cols(), 5);
  EXPECT_EQ(Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(N2).rank(), 5);
}

TEST(MatrixR, UnitSquareHandEdgeIntegrals) {
  // For p = (x - 0.5)/sqrt(2), R_i = int_{dE} phi_i n_x ds / sqrt(2); the
  // left and right edges carry n_x = -1, +1 and each vertex gets half an edge.
  const ElementBasis b = ElementBasis::wachspress(unit_square());
  const PolyBasis poly(b);
  const Eigen::MatrixXd R = matrix_R(b, poly, Eigen::Matrix2d::Identity(), rule_on_polygon(b.polygon(), Scheme::Quadrangulation, 1));
  const Eigen::Vector4d want = Eigen::Vector4d(-0.5, 0.5, 0.5, -0.5) / std::sqrt(2.0);
  EXPECT_LE((R.col(0) - want).norm(), 1e-15);
}

TEST(MatrixR, EqualsEnergyAgainstPolynomials) {
  for (const auto& [name, p] : oracle::template_polygons()) {
    for (int m : {1, 2}) {
      const ElementBasis b = ElementBasis::make(p, m);
      const PolyBasis poly(b);
      // For m = 2 the area term integrates a rational function, so only a
      // high-order rule reproduces the energy.
      const int order = m == 1 ? 1 : 32;
      const Eigen::MatrixXd R = matrix_R(b, poly, kAniso, rule_on_polygon(p, Scheme::Quadrangulation, order));
      EXPECT_LE(max_abs(R - energy_columns(b, poly, kAniso)), 1e-10) << name << " m=" << m;
    }
  }
}

TEST(MatrixR, LinearInK) {
  const ElementBasis b = ElementBasis::serendipity(oracle::template_polygons()[1].polygon);
  const PolyBasis poly(b);
  const QuadratureRule r = rule_on_polygon(b.polygon(), Scheme::Quadrangulation, 2);
  const Eigen::MatrixXd R1 = matrix_R(b, poly, kAniso, r);
  const Eigen::MatrixXd R2 = matrix_R(b, poly, 2.0 * kAniso, r);
  EXPECT_LE(max_abs(R2 - 2.0 * R1), 1e-15 * max_abs(R1) * 4);
}

TEST(MatrixR, QuadraticNeedsDegreeTwo) {
  const ElementBasis b = ElementBasis::serendipity(unit_square());
  const PolyBasis poly(b);
  try {
    matrix_R(b, poly, Eigen::Matrix2d::Identity(), rule_on_polygon(b.polygon(), Scheme::Quadrangulation, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientQuadrature);
  }
}

TEST(Projector, GramSymmetricPositiveDefinite) {
  for (const auto& [name, p] : oracle::template_polygons()) {
    for (int m : {1, 2}) {
      const ElementBasis b = ElementBasis::make(p, m);
      const PolyBasis poly(b);
      const Eigen::MatrixXd N = matrix_N(b, poly);
      const Eigen::MatrixXd R = matrix_R(b, poly, kAniso, rule_on_polygon(p, Scheme::Triangulation, 2));
      const Projector pr = make_projector(R, N);
      EXPECT_LE(max_abs(pr.G - pr.G.transpose()), 1e-11 * max_abs(pr.G)) << name;
      const Eigen::MatrixXd Gs = 0.5 * (pr.G + pr.G.transpose());
      EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Gs).eigenvalues().minCoeff(), 0.0) << name;
      EXPECT_LT(pr.gram_condition, 1e3) << name;
    }
  }
}

TEST(Projector, SingularGramDetected) {
  const ElementBasis b = ElementBasis::wachspress(unit_square());
  const PolyBasis poly(b);
  Eigen::MatrixXd R = matrix_R(b, poly, Eigen::Matrix2d::Identity(), rule_on_polygon(b.polygon(), Scheme::Quadrangulation, 1));
  R.col(1) = R.col(0);
  try {
    make_projector(R, matrix_N(b, poly));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularGram);
  }
}

TEST(Projector, ReproducesPolynomials) {
  std::mt19937 rng(5);
  std::normal_distribution<double> nd;
  for (const auto& [name, p] : oracle::template_polygons()) {
    for (int m : {1, 2}) {
      const ElementBasis b = ElementBasis::make(p, m);
      const PolyBasis poly(b);
      const Eigen::MatrixXd N = matrix_N(b, poly);
      const Projector pr = make_projector(matrix_R(b, poly, kAniso, rule_on_polygon(p, Scheme::Quadrangulation, 2)), N);
      const double c0 = nd(rng), c1 = nd(rng), c2 = nd(rng), c3 = m == 2 ? nd(rng) : 0.0, c4 = m == 2 ? nd(rng) : 0.0,
                   c5 = m == 2 ? nd(rng) : 0.0;
      auto q = [&](const Point& x) {
        return c0 + c1 * x.x() + c2 * x.y() + c3 * x.x() * x.x() + c4 * x.x() * x.y() + c5 * x.y() * x.y();
      };
      Eigen::VectorXd v(b.size());
      for (int i = 0; i < b.size(); ++i) v[i] = q(b.node(i));
      const ProjectedPolynomial pp = project(pr, v);
      for (const Point& x : oracle::interior_points(p, 20, 3)) EXPECT_NEAR(pp.value(poly, x), q(x), 1e-10) << name;
      const Eigen::MatrixXd P = remainder_operator(pr, N);
      EXPECT_LE(max_abs(P.transpose() * N), 1e-11) << name;
      EXPECT_LE(P.transpose().rowwise().sum().cwiseAbs().maxCoeff(), 1e-12) << name;
    }
  }
}

TEST(Projector, LinearGradientIsBoundaryAverage) {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-1, 1);
  for (const auto& [name, p] : oracle::template_polygons()) {
    const ElementBasis b = ElementBasis::wachspress(p);
    const PolyBasis poly(b);
    const Eigen::MatrixXd N = matrix_N(b, poly);
    const Projector pr = make_projector(matrix_R(b, poly, Eigen::Matrix2d::Identity(), rule_on_polygon(p, Scheme::Quadrangulation, 1)), N);
    Eigen::VectorXd v(p.size());
    for (int i = 0; i < p.size(); ++i) v[i] = u(rng);
    // |E|^-1 sum over edges of the trapezoid integral of v n.
    Eigen::Vector2d want = Eigen::Vector2d::Zero();
    for (int i = 0; i < p.size(); ++i) want += 0.5 * (v[i] + v[(i + 1) % p.size()]) * p.edge_normal(i);
    want /= p.area();
    const ProjectedPolynomial pp = project(pr, v);
    EXPECT_LE((pp.gradient(poly, p.vertex_mean()) - want).norm(), 1e-12) << name;
    // The constant is fixed by the nodal mean: the projection at the vertex
    // mean equals the mean of v.
    EXPECT_NEAR(pp.value(poly, p.vertex_mean()), v.mean(), 1e-12) << name;
  }
}

TEST(Projector, LeastSquaresOptimality) {
  const Polygon p = oracle::template_polygons()[1].polygon;
  const ElementBasis b = ElementBasis::wachspress(p);
  const PolyBasis poly(b);
  const Eigen::MatrixXd N = matrix_N(b, poly);
  const Projector pr = make_projector(matrix_R(b, poly, Eigen::Matrix2d::Identity(), rule_on_polygon(p, Scheme::Quadrangulation, 1)), N);
  const QuadratureRule r = rule_on_polygon(p, Scheme::Quadrangulation, 32);
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd v(p.size());
    for (int i = 0; i < p.size(); ++i) v[i] = u(rng);
    const Eigen::Vector2d g = project(pr, v).gradient(poly, p.vertex_mean());
    auto misfit = [&](const Eigen::Vector2d& q) {
      return integrate(r, [&](const Point& x) { return (q - b.gradients(x).transpose() * v).squaredNorm(); });
    };
    const double base = misfit(g);
    for (const Eigen::Vector2d d : {Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1), Eigen::Vector2d(1, 1).normalized()}) {
      EXPECT_GE(misfit(g + 1e-3 * d), base);
      EXPECT_GE(misfit(g - 1e-3 * d), base);
    }
  }
}

TEST(StiffnessQuadrature, UnitSquareBilinear) {
  const ElementBasis b = ElementBasis::wachspress(unit_square());
  const Eigen::MatrixXd K = element_stiffness_quadrature(b, DiffusionTensor::identity(),
                                                         rule_on_polygon(b.polygon(), Scheme::Quadrangulation, 2));
  EXPECT_LE(max_abs(K - oracle::bilinear_stiffness()), 1e-13);
  EXPECT_LE(K.rowwise().sum().cwiseAbs().maxCoeff(), 1e-12);
}

TEST(StiffnessQuadrature, HexagonInexact) {
  const Polygon hex = registry_polygon("hex");
  const ElementBasis b = ElementBasis::wachspress(hex);
  const auto I = DiffusionTensor::identity();
  const Eigen::MatrixXd K8 = element_stiffness_quadrature(b, I, rule_on_polygon(hex, Scheme::Quadrangulation, 8));
  const Eigen::MatrixXd K32 = element_stiffness_quadrature(b, I, rule_on_polygon(hex, Scheme::Quadrangulation, 32));
  EXPECT_GE(max_abs(K8 - K32), 1e-9);
  EXPECT_LE(K8.rowwise().sum().cwiseAbs().maxCoeff(), 1e-12);
}

TEST(StiffnessProjected, ElementAlgebraOnTemplatePolygons) {
  for (const auto& [name, p] : oracle::template_polygons()) {
    for (int m : {1, 2}) {
      for (int k : {1, 2, 4}) {
        if (m == 2 && k < 2) continue;
        const ElementBasis b = ElementBasis::make(p, m);
        const PolyBasis poly(b);
        const ProjectionData d = element_stiffness_projected(b, poly, kAniso, rule_on_polygon(p, Scheme::Quadrangulation, k));
        const double scale = max_abs(d.K_elem);
        EXPECT_LE(max_abs(d.K_elem - d.K_elem.transpose()), 1e-14 * scale) << name;
        EXPECT_LE(d.K_elem.rowwise().sum().cwiseAbs().maxCoeff(), 1e-12 * scale) << name;
        EXPECT_LE(max_abs(d.K_elem * d.N - d.R), 1e-11) << name << " m=" << m << " k=" << k;
        const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(d.K_elem).eigenvalues();
        EXPECT_GT(ev[0], -1e-12 * scale);
        EXPECT_GT(ev[1], 1e-6 * scale) << name << " kernel larger than the constants";
      }
    }
  }
}

TEST(StiffnessProjected, HexagonOnePointPerEdgeRankDeficientByOne) {
  const Polygon hex = registry_polygon("hex");
  const ElementBasis b = ElementBasis::wachspress(hex);
  const QuadratureRule r = rule_on_polygon(hex, Scheme::Quadrangulation, 1);
  ASSERT_EQ(r.size(), 6);
  const ProjectionData d = element_stiffness_projected(b, PolyBasis(b), Eigen::Matrix2d::Identity(), r);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d.K_elem);
  const double top = es.eigenvalues().maxCoeff();
  int rank = 0;
  for (int i = 0; i < 6; ++i) rank += es.eigenvalues()[i] > 1e-10 * top;
  EXPECT_EQ(rank, 5);
  EXPECT_LE(d.K_elem.rowwise().sum().norm(), 1e-12);
}

TEST(StiffnessProjected, SplittingIdentityAtHighOrder) {
  for (const auto& [name, p] : oracle::template_polygons()) {
    for (int m : {1, 2}) {
      const ElementBasis b = ElementBasis::make(p, m);
      const ProjectionData d =
          element_stiffness_projected(b, PolyBasis(b), kAniso, rule_on_polygon(p, Scheme::Quadrangulation, 32));
      EXPECT_LE(max_abs(d.K_elem - d.K_quad), 1e-9) << name << " m=" << m;
    }
  }
}

TEST(StiffnessProjected, SquareEquivalence) {
  const ElementBasis b = ElementBasis::wachspress(unit_square());
  for (Scheme s : {Scheme::Quadrangulation, Scheme::Triangulation}) {
    const QuadratureRule r = rule_on_polygon(b.polygon(), s, 2);
    const ProjectionData d = element_stiffness_projected(b, PolyBasis(b), Eigen::Matrix2d::Identity(), r);
    EXPECT_LE(max_abs(d.K_elem - d.K_quad), 1e-12);
    EXPECT_LE(max_abs(d.K_elem - oracle::bilinear_stiffness()), 1e-12);
  }
}

TEST(StiffnessCorrected, ConstantFieldMatchesProjected) {
  const Polygon p = oracle::template_polygons()[3].polygon;
  const ElementBasis b = ElementBasis::serendipity(p);
  const PolyBasis poly(b);
  const QuadratureRule r = rule_on_polygon(p, Scheme::Quadrangulation, 2);
  const auto field = DiffusionTensor::field([](const Point&) { return kAniso; });
  const ProjectionData c = element_stiffness_corrected(b, poly, field, r);
  const ProjectionData d = element_stiffness_projected(b, poly, kAniso, r);
  EXPECT_LE(max_abs(c.K_elem - d.K_elem), 1e-13);
}

TEST(StiffnessCorrected, VariableFieldOnUnitSquare) {
  const ElementBasis b = ElementBasis::serendipity(unit_square());
  const PolyBasis poly(b);
  const QuadratureRule r = rule_on_polygon(b.polygon(), Scheme::Quadrangulation, 2);
  const DiffusionTensor k = problems::variable_coefficient().k;
  const ProjectionData c = element_stiffness_corrected(b, poly, k, r);
  EXPECT_LE(max_abs(c.K_elem - c.K_elem.transpose()), 1e-11);
  EXPECT_LE(c.K_elem.rowwise().sum().cwiseAbs().maxCoeff(), 1e-11);

  const Eigen::Matrix2d ke = element_average(k, r, 1.0);
  EXPECT_LE((ke - c.K_E).norm(), 1e-15);
  const ProjectionData d = element_stiffness_projected(b, poly, ke, r);
  EXPECT_LE(max_abs((c.K_elem - d.K_elem) - (c.K_tilde - c.K_quad)), 1e-13);
  EXPECT_LE(max_abs(c.K_tilde - element_stiffness_quadrature(b, k, r)), 1e-14);
}

TEST(StiffnessCorrected, NonSPDTensorRejected) {
  const ElementBasis b = ElementBasis::wachspress(unit_square());
  const QuadratureRule r = rule_on_polygon(b.polygon(), Scheme::Quadrangulation, 2);
  const auto indefinite = DiffusionTensor::field([](const Point& x) {
    return Eigen::Matrix2d((Eigen::Matrix2d() << 1.0, 0.0, 0.0, x.x() - 0.9).finished());
  });
  try {
    element_stiffness_corrected(b, PolyBasis(b), indefinite, r);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonSPD);
  }
  const auto out_of_bounds = DiffusionTensor::field([](const Point&) { return Eigen::Matrix2d(10.0 * Eigen::Matrix2d::Identity()); }, 2.0);
  EXPECT_THROW(element_stiffness_corrected(b, PolyBasis(b), out_of_bounds, r), Error);
}

TEST(Stability, SquareIsExact) {
  const ElementBasis b = ElementBasis::wachspress(unit_square());
  const auto I = DiffusionTensor::identity();
  const ProjectionData d = element_stiffness_projected(b, PolyBasis(b), Eigen::Matrix2d::Identity(),
                                                       rule_on_polygon(b.polygon(), Scheme::Quadrangulation, 2));
  const StabilityBounds s = stability_audit(d.K_elem, b, I, rule_on_polygon(b.polygon(), Scheme::Quadrangulation, 32));
  EXPECT_NEAR(s.lower, 1.0, 1e-10);
  EXPECT_NEAR(s.upper, 1.0, 1e-10);
}

TEST(Stability, PentagonLowOrderAndScaleInvariance) {
  const Polygon p = oracle::template_polygons()[1].polygon;
  const auto I = DiffusionTensor::identity();
  auto bounds = [&](const Polygon& q) {
    const ElementBasis b = ElementBasis::wachspress(q);
    const ProjectionData d = element_stiffness_projected(b, PolyBasis(b), Eigen::Matrix2d::Identity(),
                                                         rule_on_polygon(q, Scheme::Quadrangulation, 1));
    return stability_audit(d.K_elem, b, I, rule_on_polygon(q, Scheme::Quadrangulation, 32));
  };
  const StabilityBounds s = bounds(p);
  EXPECT_GT(s.lower, 0.1);
  EXPECT_LE(s.lower, s.upper);
  EXPECT_LT(s.upper, 10.0);
  const StabilityBounds t = bounds(transformed(p, 0.125, Point(0.3, 0.1)));
  EXPECT_NEAR(t.lower, s.lower, 1e-10);
  EXPECT_NEAR(t.upper, s.upper, 1e-10);
}
