#pragma once

#include "polyproj/assembly.hpp"
#include "polyproj/geometry.hpp"
#include "polyproj/quadrature.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace polyproj {

struct StudyRow {
  int level = 0;
  double h = 0.0;
  double eps0 = 0.0;
  double eps1 = 0.0;
};

struct Rates {
  double r0 = 0.0;
  double r1 = 0.0;
};

/// Least-squares slopes of log(eps) against log(h) over the last
/// min(3, rows) rows.
Rates fit_rates(std::span<const StudyRow> rows);

struct StudyReport {
  std::string study;    // "patch-test" or "converge"
  std::string problem;  // exact solution name
  Discretization disc;
  std::vector<StudyRow> rows;
  Rates rates;
  std::vector<double> seconds;  // wall time per level, informational only
};

/// Levels from "a..b", "a,b,c" or a single integer.
std::vector<int> parse_levels(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);

/// Patch test with u = 2x1 - x2 + 4 (m = 1) or x1^2 - 3x1x2 - x2^2 + 5x1 (m = 2)
/// on reference meshes of the given levels (each in 1..6).
StudyReport run_patch_test(int order, FormMode mode, Scheme scheme, int quadrature_order,
                           const std::vector<int>& levels, unsigned threads = 1);

/// Convergence study for "smooth1" or "varK".
StudyReport run_convergence(const std::string& problem, int order, FormMode mode, Scheme scheme,
                            int quadrature_order, const std::vector<int>& levels, unsigned threads = 1);

/// One study row for an arbitrary exact solution on reference level `level`.
StudyRow run_level(const ExactSolution& exact, const Discretization& disc, int level);

struct GradErrorTable {
  std::vector<Scheme> schemes;
  std::vector<int> orders;
  std::vector<std::vector<double>> values;  // values[scheme][order]
};

GradErrorTable run_grad_error(const Polygon& polygon, const std::vector<Scheme>& schemes,
                              const std::vector<int>& orders);

/// Built-in polygons: "hex" is the regular hexagon of circumradius 1 centred
/// at the origin with its first vertex rotated by +5 degrees.
Polygon registry_polygon(const std::string& id);

/// Polygon from a text file of "x y" lines (CCW; '#' starts a comment).
Polygon read_polygon_file(const std::string& path);

/// Header row, data rows with 16 significant digits, then '#' lines with the
/// configuration and the fitted rates.
void write_report_csv(std::ostream& os, const StudyReport& report);
void write_grad_error_csv(std::ostream& os, const GradErrorTable& table);

}  // namespace polyproj
