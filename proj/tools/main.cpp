// Command-line front end: solve a problem file with one of the two splitting
// methods, sample the standing assumptions, or print the brute-force oracle.

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "nashsplit/runner.hpp"

namespace {

// --errors geometric:RHO:MAG or "zero"
nashsplit::ErrorSchedule parse_errors(const std::string& text,
                                      std::uint64_t seed) {
  if (text.empty() || text == "zero") return nashsplit::make_zero_errors();
  const std::string prefix = "geometric:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string rest = text.substr(prefix.size());
    const auto colon = rest.find(':');
    if (colon != std::string::npos) {
      const double rho = std::stod(rest.substr(0, colon));
      const double mag = std::stod(rest.substr(colon + 1));
      return nashsplit::make_geometric_errors(rho, mag, seed);
    }
  }
  throw CLI::ValidationError("--errors", "expected zero or geometric:RHO:MAG");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nash equilibrium solver for non-potential games via monotone "
               "operator splitting"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "run a splitting method on a problem file");
  std::string problem_path, method = "fbf", errors_text, trace_path, report_path;
  double gamma = 0.0, tol = 1e-8, epsilon = 0.0;
  long max_iters = 1'000'000, trace_every = 1;
  std::uint64_t seed = 0;
  solve->add_option("problem", problem_path, "problem JSON file")->required();
  solve->add_option("--method", method, "fbf | fb")->check(CLI::IsMember({"fbf", "fb"}));
  solve->add_option("--gamma", gamma, "constant step size (default: derived from chi)");
  solve->add_option("--epsilon", epsilon, "step-range epsilon (default: derived)");
  solve->add_option("--tol", tol, "residual tolerance");
  solve->add_option("--max-iters", max_iters, "iteration cap");
  solve->add_option("--errors", errors_text, "zero | geometric:RHO:MAG");
  solve->add_option("--seed", seed, "seed for error directions");
  solve->add_option("--trace", trace_path, "trace CSV output path");
  solve->add_option("--report", report_path, "report JSON output path");
  solve->add_option("--trace-every", trace_every, "record every k-th iteration");

  // check
  auto* check = app.add_subcommand("check", "sample monotonicity / Lipschitz / cocoercivity");
  std::string check_path;
  int samples = 1000;
  std::uint64_t check_seed = 0;
  check->add_option("problem", check_path, "problem JSON file")->required();
  check->add_option("--samples", samples, "number of sampled pairs");
  check->add_option("--seed", check_seed, "sampler seed");

  // oracle
  auto* oracle = app.add_subcommand("oracle", "print the brute-force equilibrium");
  std::string oracle_path;
  oracle->add_option("problem", oracle_path, "problem JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  if (solve->parsed()) {
    nashsplit::RunRequest req;
    req.problem_path = problem_path;
    req.config.method = method == "fb" ? nashsplit::Method::Fb
                                       : nashsplit::Method::Fbf;
    if (gamma > 0.0)
      req.config.gamma = nashsplit::GammaSchedule::constant_step(gamma);
    req.config.epsilon = epsilon;
    req.config.tol = tol;
    req.config.max_iters = max_iters;
    req.config.trace_every = trace_every;
    req.config.seed = seed;
    try {
      const nashsplit::ErrorSchedule errors = parse_errors(errors_text, seed);
      req.config.errors_a = errors;
      req.config.errors_b = errors;
      req.config.errors_c = errors;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
    req.trace_path = trace_path;
    req.report_path = report_path;
    return nashsplit::run(req);
  }
  if (check->parsed()) return nashsplit::run_check(check_path, samples, check_seed);
  return nashsplit::run_oracle(oracle_path);
}
