// Command-line entry point: run, certify, verify, mesh-gen.
//
// Exit codes
//   0  success
//   1  configuration, mesh or argument error
//   2  step too large
//   3  solver failure
//   4  strict certification gate failed during `run`
//   5  `certify`: configuration not admissible

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "mrsla/errors.hpp"
#include "mrsla/sla.hpp"
#include "mrsla/verify.hpp"

namespace {

using namespace mrsla;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::StepTooLarge:
      return 2;
    case ErrorKind::SolverStagnation:
    case ErrorKind::InvalidStrain:
    case ErrorKind::SingularStrain:
    case ErrorKind::InconsistentState:
    case ErrorKind::InternalInconsistency:
      return 3;
    case ErrorKind::HypothesesViolated:
    case ErrorKind::BetaExceedsMax:
    case ErrorKind::AlphaTooLarge:
      return 4;
    default:
      return 1;
  }
}

int cmd_run(const std::string& config_path, const std::string& out_dir, bool quiet) {
  RunConfig config = load_config(config_path);
  if (!out_dir.empty()) config.output.dir = out_dir;
  RunControl control;
  control.log = quiet ? nullptr : &std::cerr;
  const RunResult result = run(config, control);
  std::cout << "completed " << result.state.step << " steps; mean T12 " << format_double(mean_shear_stress(result.state))
            << '\n';
  if (!config.output.dir.empty()) std::cout << "outputs in " << config.output.dir.string() << '\n';
  return 0;
}

struct CertifyFlags {
  std::optional<double> alpha;
  std::optional<double> k;
  std::optional<double> beta_max;
  std::string out;
};

int cmd_certify(const std::string& config_path, const CertifyFlags& flags) {
  const RunConfig config = load_config(config_path);
  const MaterialParams params = config.params();
  const RunState state = initial_state(config);
  const auto points = spectral_points(state, params);
  const double k = flags.k.value_or(config.certification.k.value_or(default_k(params)));
  const double alpha = flags.alpha.value_or(config.certification.alpha.value_or(auto_alpha(points, k, params)));
  const double beta_max = flags.beta_max.value_or(config.certification.beta_max);
  const CoercivityReport report = certify(points, alpha, k, beta_max, params);
  const std::string text = report_json(report);
  std::cout << text << '\n';
  if (!flags.out.empty()) {
    std::ofstream f(flags.out);
    if (!f) throw Error(ErrorKind::Io, "cannot write " + flags.out);
    f << text << '\n';
  }
  if (report.admissible) {
    std::cerr << "admissible: beta0 = " << format_double(*report.beta0) << '\n';
    return 0;
  }
  constexpr std::size_t kShown = 5;
  for (std::size_t i = 0; i < std::min(kShown, report.failures.size()); ++i) {
    std::cerr << "failed " << to_string(report.failures[i].check) << ": " << report.failures[i].message << '\n';
  }
  if (report.failures.size() > kShown) {
    std::cerr << "... and " << report.failures.size() - kShown << " more (see the JSON report)\n";
  }
  return 5;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, int trials, const std::string& json_path) {
  VerifyOptions options;
  options.seed = seed;
  options.trials = trials;
  const auto results = run_verify(suite, options);
  print_results(results, std::cout);
  if (!json_path.empty()) {
    std::ofstream f(json_path);
    if (!f) throw Error(ErrorKind::Io, "cannot write " + json_path);
    f << results_json(results) << '\n';
  }
  for (const auto& r : results) {
    if (!r.pass()) {
      std::cerr << "verify failed in suite " << r.suite << '\n';
      return 1;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Large-deformation solver for nearly incompressible Mooney-Rivlin solids"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  bool quiet = false;
  auto* run_cmd = app.add_subcommand("run", "Run the stepping scheme described by a JSON config");
  run_cmd->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out", out_dir, "Override output.dir");
  run_cmd->add_flag("-q,--quiet", quiet, "No per-step progress");

  CertifyFlags cflags;
  auto* cert_cmd = app.add_subcommand("certify", "Check the coercivity hypotheses on the initial state");
  cert_cmd->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  cert_cmd->add_option("--alpha", cflags.alpha, "Coercivity constant (default 0.9 of the admissible maximum)");
  cert_cmd->add_option("--k", cflags.k, "Lower bound for det B0");
  cert_cmd->add_option("--beta-max", cflags.beta_max, "Search cap for beta0");
  cert_cmd->add_option("--out", cflags.out, "Also write the report to this file");

  std::string suite;
  std::uint64_t seed = 42;
  int trials = 10000;
  std::string json_path;
  auto* verify_cmd = app.add_subcommand("verify", "Run oracle suites");
  verify_cmd->add_option("suite", suite, "quadform, psd, patch, pure-shear or all")
      ->required()
      ->check(CLI::IsMember({"quadform", "psd", "patch", "pure-shear", "all"}));
  verify_cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
  verify_cmd->add_option("--trials", trials, "Random trials per randomized check")->capture_default_str();
  verify_cmd->add_option("--json", json_path, "Write a JSON summary");

  RectangleSpec rect;
  std::string bottom = "clamped", right = "clamped", top = "clamped", left = "clamped";
  bool simple = false;
  std::string mesh_out;
  auto* mesh_cmd = app.add_subcommand("mesh-gen", "Write a structured rectangle mesh");
  mesh_cmd->add_option("--width", rect.width)->capture_default_str();
  mesh_cmd->add_option("--height", rect.height)->capture_default_str();
  mesh_cmd->add_option("--nx", rect.nx)->capture_default_str();
  mesh_cmd->add_option("--ny", rect.ny)->capture_default_str();
  for (auto [name, target] : {std::pair{"--bottom", &bottom}, {"--right", &right}, {"--top", &top}, {"--left", &left}}) {
    mesh_cmd->add_option(name, *target, "traction, slip or clamped")
        ->check(CLI::IsMember({"traction", "slip", "clamped"}))
        ->capture_default_str();
  }
  mesh_cmd->add_flag("--simple", simple, "Two triangles per cell instead of four");
  mesh_cmd->add_option("-o,--output", mesh_out, "Mesh file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;  // --help exits 0; argument errors share the config code
  }

  try {
    if (*run_cmd) return cmd_run(config_path, out_dir, quiet);
    if (*cert_cmd) return cmd_certify(config_path, cflags);
    if (*verify_cmd) return cmd_verify(suite, seed, trials, json_path);
    if (*mesh_cmd) {
      rect.bottom = boundary_kind_from_string(bottom);
      rect.right = boundary_kind_from_string(right);
      rect.top = boundary_kind_from_string(top);
      rect.left = boundary_kind_from_string(left);
      rect.crossed = !simple;
      if (rect.nx < 1 || rect.ny < 1 || !(rect.width > 0.0) || !(rect.height > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "mesh-gen needs positive sizes and cell counts");
      }
      save_mesh(rectangle_mesh(rect), mesh_out);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
