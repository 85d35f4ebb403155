#include "nashsplit/runner.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>

#include "json.hpp"
#include "nashsplit/problem_io.hpp"

namespace nashsplit {

using nlohmann::json;

namespace {

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIters: return "max_iters";
    case SolveStatus::Diverged: return "diverged";
  }
  return "unknown";
}

const char* cert_status_name(EquilibriumCertificate::Status s) {
  switch (s) {
    case EquilibriumCertificate::Status::Verified: return "verified";
    case EquilibriumCertificate::Status::Failed: return "failed";
    case EquilibriumCertificate::Status::Unverifiable: return "unverifiable";
  }
  return "unknown";
}

/// Feasible deterministic start: the projection of the origin under f.
BlockVector default_start(const ProblemSpec& spec) {
  BlockVector zero(spec.layout);
  return prox(spec.f, 1.0, zero);
}

double zero_sum_value(const ProblemSpec& spec, const BlockVector& x) {
  const LinearMap& l = *spec.zero_sum_matrix;
  std::vector<double> ly(static_cast<std::size_t>(l.rows()));
  l.apply(x.block(1), ly);
  double v = 0.0;
  const auto x1 = x.block(0);
  for (std::size_t i = 0; i < ly.size(); ++i) v += x1[i] * ly[i];
  return v;
}

}  // namespace

void write_trace_csv(const SolveReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path + ": cannot open trace file for writing");
  const int blocks = report.final_x.layout().blocks();
  out << "iter,residual,gamma";
  for (int b = 0; b < blocks; ++b) out << ",block" << b << "_norm";
  out << "\n";
  for (const TracePoint& tp : report.trace) {
    out << tp.iter << "," << fmt17(tp.residual) << "," << fmt17(tp.gamma);
    for (double nb : tp.block_norms) out << "," << fmt17(nb);
    out << "\n";
  }
  out.flush();
  if (!out) throw ParseError(path + ": trace write failed");
}

void write_report_json(const ProblemSpec& spec, const SolveReport& report,
                       const std::string& path) {
  json j;
  j["problem_kind"] = to_string(spec.kind);
  j["status"] = status_name(report.status);
  j["iterations"] = report.iterations;
  j["final_residual"] = report.final_residual;
  j["gamma"] = report.gamma_last;
  j["epsilon"] = report.epsilon;
  j["chi"] = report.chi;
  json blocks = json::array();
  for (int b = 0; b < report.final_x.layout().blocks(); ++b) {
    json blk = json::array();
    for (double v : report.final_x.block(b)) blk.push_back(v);
    blocks.push_back(std::move(blk));
  }
  j["final_x"] = std::move(blocks);
  if (spec.kind == ProblemKind::ZeroSumGame)
    j["value"] = zero_sum_value(spec, report.final_x);
  if (report.equilibrium_check) {
    const auto& cert = *report.equilibrium_check;
    json c;
    c["status"] = cert_status_name(cert.status);
    c["player_gaps"] = cert.player_gaps;
    c["max_gap"] = cert.max_gap;
    c["tolerance"] = cert.tolerance;
    c["feasibility_residual"] = cert.feasibility_residual;
    c["note"] = cert.note;
    j["certificate"] = std::move(c);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path + ": cannot open report file for writing");
  out << j.dump(2) << "\n";
  out.flush();
  if (!out) throw ParseError(path + ": report write failed");
}

int run(const RunRequest& req) {
  try {
    const ProblemSpec spec = req.inline_problem ? *req.inline_problem
                                                : load_problem(req.problem_path);
    const BlockVector x0 = default_start(spec);

    SolveReport report = req.config.method == Method::Fbf
                             ? solve_fbf(spec.f, spec.b, x0, req.config)
                             : solve_fb(spec.f, spec.b, x0, req.config);

    try {
      report.equilibrium_check = verify_equilibrium(spec, report.final_x);
    } catch (const std::exception& e) {
      EquilibriumCertificate cert;
      cert.status = EquilibriumCertificate::Status::Unverifiable;
      cert.note = e.what();
      report.equilibrium_check = cert;
    }

    if (!req.trace_path.empty()) write_trace_csv(report, req.trace_path);
    if (!req.report_path.empty()) write_report_json(spec, report, req.report_path);

    if (!req.quiet) {
      std::cout << "status:     " << status_name(report.status) << "\n"
                << "iterations: " << report.iterations << "\n"
                << "residual:   " << fmt17(report.final_residual) << "\n"
                << "gamma:      " << fmt17(report.gamma_last)
                << "  (chi = " << fmt17(report.chi) << ")\n";
      if (spec.kind == ProblemKind::ZeroSumGame)
        std::cout << "value:      " << fmt17(zero_sum_value(spec, report.final_x))
                  << "\n";
      if (report.equilibrium_check) {
        const auto& cert = *report.equilibrium_check;
        std::cout << "certificate " << cert_status_name(cert.status);
        if (cert.status != EquilibriumCertificate::Status::Unverifiable)
          std::cout << "  (max gap " << fmt17(cert.max_gap) << ")";
        std::cout << "  [" << cert.note << "]\n";
      }
    }

    switch (report.status) {
      case SolveStatus::Converged: return 0;
      case SolveStatus::MaxIters: return 2;
      case SolveStatus::Diverged: return 3;
    }
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int run_check(const std::string& problem_path, int samples, std::uint64_t seed,
              bool quiet) {
  try {
    const ProblemSpec spec = load_problem(problem_path);
    bool all_pass = true;

    const MonotonicityReport mono = check_monotone(spec.b, samples, seed);
    all_pass = all_pass && mono.pass;
    if (!quiet)
      std::printf("monotonicity   %s  (min inner product %.3e over %d pairs)\n",
                  mono.pass ? "PASS" : "FAIL", mono.min_inner, mono.samples);

    const LipschitzReport lip = check_lipschitz(spec.b, samples, seed);
    all_pass = all_pass && lip.pass;
    if (!quiet)
      std::printf("lipschitz      %s  (max ratio %.12g, chi %.12g%s)\n",
                  lip.pass ? "PASS" : "FAIL", lip.max_ratio, lip.chi,
                  lip.chi_source == ChiSource::Overridden ? ", overridden"
                  : lip.chi_source == ChiSource::Declared ? ", declared"
                                                          : "");

    if (spec.b.cocoercive()) {
      const CocoercivityReport coco = check_cocoercive(spec.b, samples, seed);
      all_pass = all_pass && coco.pass;
      if (!quiet)
        std::printf("cocoercivity   %s  (min slack %.3e, chi %.12g)\n",
                    coco.pass ? "PASS" : "FAIL", coco.min_slack, coco.chi);
    } else if (!quiet) {
      std::printf("cocoercivity   SKIP  (operator does not declare cocoercivity)\n");
    }
    return all_pass ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int run_oracle(const std::string& problem_path, bool quiet) {
  try {
    const ProblemSpec spec = load_problem(problem_path);
    if (spec.kind != ProblemKind::ZeroSumGame) {
      std::cerr << "error: no brute-force oracle for kind " << to_string(spec.kind)
                << " (supported: zero_sum)\n";
      return 1;
    }
    const ZeroSumSolution sol = zero_sum_oracle(*spec.zero_sum_matrix);
    if (!quiet) {
      std::cout << "value: " << fmt17(sol.value) << "\nx1:";
      for (double v : sol.x1) std::cout << " " << fmt17(v);
      std::cout << "\nx2:";
      for (double v : sol.x2) std::cout << " " << fmt17(v);
      std::cout << "\n";
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace nashsplit
