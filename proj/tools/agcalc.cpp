// agcalc: batch front door for the exact AG-structure calculus.
//
// Subcommands:
//   verify      run a module verification suite, write a JSON report
//   flat-basis  polynomial solution basis of a first BGG operator on the
//               flat chart
//   zero-locus  zero-locus analysis of a named section from a chart file
//
// Exit codes: 0 all checks pass, 1 at least one check failed, 2 usage or
// parse error.

#include <chrono>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ag/chartfile.hpp"
#include "ag/suites.hpp"
#include "ag/version.hpp"

namespace {

int run_verify(const std::string& suite_name, int n, std::uint64_t seed,
               const std::string& report_path) {
  const auto suite = ag::suite_from_name(suite_name);
  if (!suite) {
    std::cerr << "error: unknown suite '" << suite_name << "'\n";
    return 2;
  }
  const auto started = std::chrono::steady_clock::now();
  const ag::VerificationReport rep = ag::run_suite(*suite, n, seed);
  const auto elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  ag::Json out;
  out["n"] = n;
  out["results"] = ag::report_to_json(rep);
  out["seed"] = seed;
  out["suite"] = suite_name;
  out["summary"] = ag::Json{{"checks", rep.items.size()}, {"failures", rep.failures()}};
  out["version"] = ag::version();
  const std::string text = out.dump(2) + "\n";
  if (report_path.empty() || report_path == "-") {
    std::cout << text;
  } else {
    std::ofstream file(report_path, std::ios::binary);
    if (!file) {
      std::cerr << "error: cannot open report path '" << report_path << "'\n";
      return 2;
    }
    file << text;
  }
  std::cerr << "suite " << suite_name << " (n=" << n << ", seed=" << seed << "): "
            << rep.items.size() << " checks, " << rep.failures() << " failures, " << elapsed
            << " s\n";
  return rep.passed() ? 0 : 1;
}

int run_flat_basis(const std::string& bundle_name, int n, int degree) {
  ag::Bundle bundle;
  if (bundle_name == "tractor") bundle = ag::Bundle::tractor;
  else if (bundle_name == "cotractor") bundle = ag::Bundle::cotractor;
  else {
    std::cerr << "error: unknown bundle '" << bundle_name << "'\n";
    return 2;
  }
  const ag::BggSolutionBasis basis = ag::solve_bgg_polynomial(ag::flat_chart(n), bundle, degree);
  std::cout << ag::basis_to_json(basis).dump(2) << "\n";
  return 0;
}

int run_zero_locus(const std::string& input, const std::string& section_name,
                   const std::string& points_name) {
  std::ifstream file(input);
  if (!file) {
    std::cerr << "error: cannot open chart file '" << input << "'\n";
    return 2;
  }
  ag::Json j = ag::Json::parse(file);  // throws with byte position on bad input
  const ag::ChartFile chart = ag::chart_file_from_json(j);
  const auto sec = chart.sections.find(section_name);
  if (sec == chart.sections.end()) {
    std::cerr << "error: no section named '" << section_name << "' in the chart file\n";
    return 2;
  }
  const auto pts = chart.points.find(points_name);
  if (pts == chart.points.end()) {
    std::cerr << "error: no points named '" << points_name << "' in the chart file\n";
    return 2;
  }
  // Refuse non-solutions, with the residual attached.
  const ag::IndexedTensor residual = ag::bgg_operator(chart.data, sec->second.section);
  if (!residual.is_zero()) {
    ag::Json refusal;
    refusal["error"] = "section does not solve the first BGG operator";
    refusal["residual"] = ag::tensor_to_json(residual);
    std::cout << refusal.dump(2) << "\n";
    return 2;
  }
  const ag::ZeroLocusReport rep =
      ag::zero_locus_analysis(chart.data, sec->second.section, pts->second);
  std::cout << ag::zero_locus_report_to_json(rep).dump(2) << "\n";
  return rep.summary.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact calculus for almost Grassmannian structures of type (2,n)"};
  app.set_version_flag("--version", ag::version());
  int degree_cap = 12;
  app.add_option("--degree-cap", degree_cap, "Total-degree cap for polynomial products")
      ->check(CLI::PositiveNumber);

  std::string suite = "all", report_path;
  int n = 3;
  std::uint64_t seed = 1;
  CLI::App* verify = app.add_subcommand("verify", "Run a verification suite");
  verify->add_option("--suite", suite, "all | algebra | weyl | bgg | loci");
  verify->add_option("--n", n, "F-rank of the structure")->check(CLI::Range(3, 6));
  verify->add_option("--seed", seed, "Seed for the randomized instances");
  verify->add_option("--report", report_path, "Path of the JSON report ('-' for stdout)");

  std::string bundle = "tractor";
  int basis_n = 3, basis_degree = 3;
  CLI::App* flat_basis = app.add_subcommand("flat-basis", "Flat-chart BGG solution basis");
  flat_basis->add_option("--bundle", bundle, "tractor | cotractor");
  flat_basis->add_option("--n", basis_n, "F-rank of the structure")->check(CLI::Range(3, 6));
  flat_basis->add_option("--degree", basis_degree, "Total-degree bound of the ansatz")
      ->check(CLI::Range(0, 12));

  std::string input, section_name, points_name;
  CLI::App* zero_locus = app.add_subcommand("zero-locus", "Analyze a zero locus from a chart file");
  zero_locus->add_option("--input", input, "Chart file (JSON)")->required();
  zero_locus->add_option("--section", section_name, "Name of the section")->required();
  zero_locus->add_option("--points", points_name, "Name of the point list")->required();

  app.require_subcommand(1);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    ag::DegreeCapGuard cap(degree_cap);
    if (verify->parsed()) return run_verify(suite, n, seed, report_path);
    if (flat_basis->parsed()) return run_flat_basis(bundle, basis_n, basis_degree);
    if (zero_locus->parsed()) return run_zero_locus(input, section_name, points_name);
  } catch (const ag::chart_parse_error& e) {
    std::cerr << "chart error: " << e.what() << "\n";
    return 2;
  } catch (const ag::Json::exception& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
