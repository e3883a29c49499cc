// polyproj: experiment driver for polygonal elements with projection-split
// stiffness. Subcommands write CSV tables; see --help.

#include "polyproj/errors.hpp"
#include "polyproj/harness.hpp"
#include "polyproj/problems.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace polyproj;

constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::SolverDiverged:
    case ErrorCode::SingularGram:
    case ErrorCode::IllConditioned:
      return kExitSolver;
    default:
      return kExitValidation;
  }
}

template <class Writer>
void write_output(const std::string& path, Writer&& write) {
  if (path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
  write(os);
  if (!os) throw Error(ErrorCode::Io, "failed writing " + path);
}

std::vector<Scheme> parse_schemes(const std::string& text) {
  std::vector<Scheme> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_scheme(item));
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "no schemes given");
  return out;
}

void print_summary(const StudyReport& report) {
  std::cerr << report.study << ' ' << report.problem << " m=" << report.disc.order
            << " mode=" << to_string(report.disc.mode) << " scheme=" << to_string(report.disc.scheme)
            << " order=" << report.disc.quadrature_order << '\n';
  std::cerr << std::scientific << std::setprecision(4);
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const StudyRow& r = report.rows[i];
    std::cerr << "  level " << r.level << "  h=" << r.h << "  eps0=" << r.eps0 << "  eps1=" << r.eps1
              << "  (" << std::fixed << std::setprecision(2) << report.seconds[i] << " s)" << std::scientific
              << std::setprecision(4) << '\n';
  }
  if (report.rows.size() >= 2) {
    std::cerr << std::fixed << std::setprecision(3) << "  rates r0=" << report.rates.r0
              << " r1=" << report.rates.r1 << '\n';
  }
}

struct StudyOptions {
  int m = 1;
  std::string mode = "projected";
  std::string scheme = "quad";
  int order = 1;
  std::string levels = "1..5";
  std::string out;
  std::string solution_out;
  unsigned threads = 1;
};

void add_study_options(CLI::App* cmd, StudyOptions& o, std::vector<std::string> modes) {
  cmd->add_option("--m", o.m, "Element order")->check(CLI::IsMember({1, 2}))->required();
  cmd->add_option("--mode", o.mode, "Bilinear form")->check(CLI::IsMember(std::move(modes)))->required();
  cmd->add_option("--scheme", o.scheme, "Polygon subdivision")->check(CLI::IsMember({"tri", "quad"}))->required();
  cmd->add_option("--order", o.order, "Quadrature degree per subdomain")->required();
  cmd->add_option("--levels", o.levels, "Mesh levels, e.g. 1..5")->capture_default_str();
  cmd->add_option("--out", o.out, "Output CSV path ('-' for stdout)")->required();
  cmd->add_option("--solution-out", o.solution_out, "Write node_id,x,y,u_h of the finest level");
  cmd->add_option("--threads", o.threads, "Element-loop worker threads")->capture_default_str();
}

void finish_study(const StudyReport& report, const StudyOptions& o, const ExactSolution& exact) {
  write_output(o.out, [&](std::ostream& os) { write_report_csv(os, report); });
  if (!o.solution_out.empty()) {
    PolygonalMesh mesh = build_reference_mesh(report.rows.back().level);
    if (report.disc.order == 2) mesh = add_midside_nodes(mesh);
    const Solution sol = solve_problem(mesh, report.disc, exact);
    write_output(o.solution_out, [&](std::ostream& os) { write_solution_csv(os, mesh, sol.u_h); });
  }
  print_summary(report);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polygonal finite elements with polynomial-projection stiffness splitting"};
  app.require_subcommand(1);

  std::vector<std::string> polygon_spec{"hex"};
  std::string schemes = "tri,quad";
  std::string orders = "1,2,4,8,16,32";
  std::string grad_out;
  auto* grad = app.add_subcommand("grad-error", "Gradient integration error of Wachspress functions");
  grad->add_option("--polygon", polygon_spec, "'hex' or 'file PATH'")->expected(1, 2)->capture_default_str();
  grad->add_option("--schemes", schemes, "Comma-separated schemes")->capture_default_str();
  grad->add_option("--orders", orders, "Comma-separated quadrature orders")->capture_default_str();
  grad->add_option("--out", grad_out, "Output CSV path ('-' for stdout)")->required();

  StudyOptions patch;
  auto* patch_cmd = app.add_subcommand("patch-test", "Linear (m=1) or quadratic (m=2) patch test");
  add_study_options(patch_cmd, patch, {"quadrature", "projected"});

  StudyOptions conv;
  std::string problem;
  auto* conv_cmd = app.add_subcommand("converge", "Convergence study on the reference mesh family");
  conv_cmd->add_option("--problem", problem, "Exact solution")->check(CLI::IsMember({"smooth1", "varK"}))->required();
  add_study_options(conv_cmd, conv, {"quadrature", "projected", "corrected"});

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (grad->parsed()) {
      Polygon polygon = registry_polygon("hex");
      if (polygon_spec.size() == 2 && polygon_spec[0] == "file") {
        polygon = read_polygon_file(polygon_spec[1]);
      } else if (polygon_spec.size() == 1) {
        polygon = registry_polygon(polygon_spec[0]);
      } else {
        throw Error(ErrorCode::InvalidArgument, "--polygon expects 'hex' or 'file PATH'");
      }
      const GradErrorTable table = run_grad_error(polygon, parse_schemes(schemes), parse_int_list(orders));
      write_output(grad_out, [&](std::ostream& os) { write_grad_error_csv(os, table); });
    } else if (patch_cmd->parsed()) {
      const StudyReport report = run_patch_test(patch.m, parse_form_mode(patch.mode), parse_scheme(patch.scheme),
                                                patch.order, parse_levels(patch.levels), patch.threads);
      finish_study(report, patch, problems::patch(patch.m));
    } else if (conv_cmd->parsed()) {
      const StudyReport report =
          run_convergence(problem, conv.m, parse_form_mode(conv.mode), parse_scheme(conv.scheme), conv.order,
                          parse_levels(conv.levels), conv.threads);
      finish_study(report, conv, problems::by_name(problem));
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return 0;
}
