#include "polyproj/harness.hpp"

#include "polyproj/errors.hpp"
#include "polyproj/problems.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace polyproj {

Rates fit_rates(std::span<const StudyRow> rows) {
  if (rows.size() < 2) throw Error(ErrorCode::InvalidArgument, "rate fit needs at least two rows");
  const auto used = rows.last(std::min<std::size_t>(3, rows.size()));
  auto slope = [&](auto eps_of) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(used.size());
    for (const StudyRow& r : used) {
      const double lx = std::log(r.h);
      const double ly = std::log(std::max(eps_of(r), std::numeric_limits<double>::min()));
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  return {slope([](const StudyRow& r) { return r.eps0; }), slope([](const StudyRow& r) { return r.eps1; })};
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int value = 0;
    try {
      value = std::stoi(item, &used);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "not an integer: '" + item + "'");
    }
    if (used != item.size()) throw Error(ErrorCode::InvalidArgument, "not an integer: '" + item + "'");
    out.push_back(value);
  }
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "empty list");
  return out;
}

std::vector<int> parse_levels(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) return parse_int_list(text);
  const int lo = parse_int_list(text.substr(0, dots)).front();
  const int hi = parse_int_list(text.substr(dots + 2)).front();
  if (hi < lo) throw Error(ErrorCode::InvalidArgument, "empty level range '" + text + "'");
  std::vector<int> out;
  for (int k = lo; k <= hi; ++k) out.push_back(k);
  return out;
}

StudyRow run_level(const ExactSolution& exact, const Discretization& disc, int level) {
  PolygonalMesh mesh = build_reference_mesh(level);
  if (disc.order == 2) mesh = add_midside_nodes(mesh);
  const Solution sol = solve_problem(mesh, disc, exact);
  const ErrorNorms norms = error_norms(mesh, sol.u_h, exact);
  return {level, mesh.h(), norms.eps0, norms.eps1};
}

namespace {

StudyReport run_study(const std::string& study, const ExactSolution& exact, const Discretization& disc,
                      const std::vector<int>& levels) {
  if (levels.empty()) throw Error(ErrorCode::InvalidArgument, "no levels requested");
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (levels[i] <= levels[i - 1]) throw Error(ErrorCode::InvalidArgument, "levels must be increasing");
  }
  StudyReport report;
  report.study = study;
  report.problem = exact.name;
  report.disc = disc;
  for (int level : levels) {
    const auto start = std::chrono::steady_clock::now();
    report.rows.push_back(run_level(exact, disc, level));
    report.seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  if (report.rows.size() >= 2) report.rates = fit_rates(report.rows);
  return report;
}

}  // namespace

StudyReport run_patch_test(int order, FormMode mode, Scheme scheme, int quadrature_order,
                           const std::vector<int>& levels, unsigned threads) {
  for (int k : levels) {
    if (k < 1 || k > 6) throw Error(ErrorCode::InvalidArgument, "patch-test levels must lie in 1..6");
  }
  const Discretization disc{order, mode, scheme, quadrature_order, threads};
  return run_study("patch-test", problems::patch(order), disc, levels);
}

StudyReport run_convergence(const std::string& problem, int order, FormMode mode, Scheme scheme,
                            int quadrature_order, const std::vector<int>& levels, unsigned threads) {
  if (problem != "smooth1" && problem != "varK") {
    throw Error(ErrorCode::InvalidArgument, "unknown problem '" + problem + "' (expected smooth1 or varK)");
  }
  for (int k : levels) {
    if (k < 1 || k > 8) throw Error(ErrorCode::InvalidArgument, "convergence levels must lie in 1..8");
  }
  const Discretization disc{order, mode, scheme, quadrature_order, threads};
  return run_study("converge", problems::by_name(problem), disc, levels);
}

GradErrorTable run_grad_error(const Polygon& polygon, const std::vector<Scheme>& schemes,
                              const std::vector<int>& orders) {
  GradErrorTable table;
  table.schemes = schemes;
  table.orders = orders;
  const ElementBasis basis = ElementBasis::wachspress(polygon);
  for (Scheme s : schemes) {
    std::vector<double> row;
    for (int k : orders) row.push_back(gradient_integration_error(basis, rule_on_polygon(polygon, s, k)));
    table.values.push_back(std::move(row));
  }
  return table;
}

Polygon registry_polygon(const std::string& id) {
  if (id == "hex") {
    std::vector<Point> v;
    for (int i = 0; i < 6; ++i) {
      double t = std::numbers::pi * i / 3.0;
      if (i == 0) t += 5.0 * std::numbers::pi / 180.0;
      v.emplace_back(std::cos(t), std::sin(t));
    }
    return make_polygon(v);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown polygon '" + id + "'");
}

Polygon read_polygon_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::Io, "cannot open " + path);
  std::vector<Point> v;
  std::string line;
  while (std::getline(is, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double x = 0.0, y = 0.0;
    if (!(ls >> x)) continue;
    if (!(ls >> y)) throw Error(ErrorCode::Io, path + ": expected 'x y' per line");
    v.emplace_back(x, y);
  }
  return make_polygon(v);
}

void write_report_csv(std::ostream& os, const StudyReport& report) {
  os << "level,h,eps0,eps1\n";
  os << std::scientific << std::setprecision(15);
  for (const StudyRow& r : report.rows) os << r.level << ',' << r.h << ',' << r.eps0 << ',' << r.eps1 << '\n';
  os << "# study=" << report.study << " problem=" << report.problem << " m=" << report.disc.order
     << " mode=" << to_string(report.disc.mode) << " scheme=" << to_string(report.disc.scheme)
     << " order=" << report.disc.quadrature_order << '\n';
  os << "# rates r0=" << report.rates.r0 << " r1=" << report.rates.r1 << '\n';
}

void write_grad_error_csv(std::ostream& os, const GradErrorTable& table) {
  os << "scheme";
  for (int k : table.orders) os << ",order_" << k;
  os << '\n' << std::scientific << std::setprecision(15);
  for (std::size_t s = 0; s < table.schemes.size(); ++s) {
    os << to_string(table.schemes[s]);
    for (double v : table.values[s]) os << ',' << v;
    os << '\n';
  }
}

}  // namespace polyproj
