// Command-line driver for the verification suites.
//
// Exit codes: 0 every relation within tolerance, 1 a relation failed (named on
// stderr), 2 usage error or invalid configuration, 3 unexpected internal error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "ozcheck/ozcheck.hpp"

namespace {

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string stem(const ozcheck::SuiteConfig& c) {
  return c.command == "simplicity" ? c.command : c.command + "_" + c.suite;
}

int report(const ozcheck::SuiteConfig& c, const std::string& out_dir, const std::string& format) {
  const ozcheck::SuiteResult result = ozcheck::run_suite(c);
  const std::string bundle = ozcheck::bundle_json(c, result).dump(2) + "\n";
  const std::string curves = ozcheck::curves_csv(result.report, ozcheck::GridSpec(c.grid));
  if (out_dir.empty()) {
    std::cout << (format == "csv" ? curves : bundle);
  } else {
    std::filesystem::create_directories(out_dir);
    write_file(std::filesystem::path(out_dir) / (stem(c) + ".json"), bundle);
    if (format == "csv" && !curves.empty())
      write_file(std::filesystem::path(out_dir) / (stem(c) + "_curves.csv"), curves);
  }
  for (const auto& e : result.report.entries())
    if (!e.pass)
      std::cerr << "ozcheck: FAIL " << e.name << ": residual " << e.residual << " > tolerance " << e.tolerance
                << '\n';
  return result.report.all_pass() ? 0 : kExitFail;
}

int export_witness(const ozcheck::SuiteConfig& c, const std::string& out_dir, const std::string& format) {
  const auto items = ozcheck::export_witness(c);
  std::filesystem::create_directories(out_dir);
  for (const auto& [name, x] : items) {
    const std::string file = c.suite + "_n" + std::to_string(c.n) + "_" + name + "." + format;
    write_file(std::filesystem::path(out_dir) / file,
               format == "csv" ? ozcheck::to_csv(x) : ozcheck::to_json(x).dump() + "\n");
    std::cout << file << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical and exact checks for order zero witnesses, connecting maps and traces"};
  app.require_subcommand(1);

  ozcheck::SuiteConfig cfg;
  double tol = 0.0;
  std::string out_dir;
  std::string format = "json";

  auto common = [&](CLI::App* sub, const std::vector<std::string>& suites) {
    if (!suites.empty()) sub->add_option("--suite", cfg.suite, "Suite to run")->check(CLI::IsMember(suites));
    sub->add_option("--p", cfg.p, "Base level of the tower")->capture_default_str();
    sub->add_option("--n", cfg.n, "Matrix size n of the building block")->capture_default_str();
    sub->add_option("--grid", cfg.grid, "Number of sample points on [0,1]")->capture_default_str();
    sub->add_option("--tol", tol, "Residual tolerance (default depends on the suite)");
    sub->add_option("--steps", cfg.steps, "Number of tower steps")->capture_default_str();
    sub->add_option("--eps", cfg.eps, "Target accuracy for the simplicity witness")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "Seed for random inputs")->capture_default_str();
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  };
  CLI::App* verify = app.add_subcommand("verify", "Relation suites on the witnesses and connecting steps");
  common(verify, ozcheck::suites_for("verify"));
  CLI::App* traces = app.add_subcommand("traces", "Trace collapse and pullback checks");
  common(traces, ozcheck::suites_for("traces"));
  CLI::App* simplicity = app.add_subcommand("simplicity", "Covering radius of the iterated ramp");
  common(simplicity, {});
  CLI::App* exporter = app.add_subcommand("export", "Write witness elements as JSON or CSV");
  common(exporter, ozcheck::suites_for("export"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  cfg.command = chosen->get_name();
  if (chosen == traces && chosen->count("--suite") == 0) cfg.suite = "collapse";
  if (chosen == simplicity) cfg.suite = "simplicity";
  if (chosen->count("--tol") > 0) cfg.tol = tol;

  try {
    if (chosen == exporter) {
      if (out_dir.empty()) throw ozcheck::DomainError("export needs --out");
      return export_witness(cfg, out_dir, format);
    }
    return report(cfg, out_dir, format);
  } catch (const ozcheck::DomainError& e) {
    std::cerr << "ozcheck: invalid configuration: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ozcheck::StructuralError& e) {
    std::cerr << "ozcheck: invalid configuration: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ozcheck::ResourceError& e) {
    std::cerr << "ozcheck: configuration too large: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "ozcheck: error: " << e.what() << '\n';
    return kExitInternal;
  }
}
