// Command-line front end. Reports go to stdout as JSON, logs to stderr.
// Exit codes: 0 success, 1 invalid input, 2 no convergence (or a failed check).

#include <chrono>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ncot/io.hpp"

namespace {

using ncot::Json;

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kNotConverged = 2;

void log(const std::string& msg) { std::cerr << "ncot: " << msg << '\n'; }

void emit(const Json& j) { std::cout << j.dump(2) << '\n'; }

int input_error(const std::string& msg) {
  log("error: " + msg);
  emit({{"error", msg}});
  return kInputError;
}

struct SolverFlags {
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::optional<std::string> mode;

  void attach(CLI::App* app) {
    app->add_option("--tol", tol, "Relative solver tolerance (absolute is a tenth of it)")->check(CLI::PositiveNumber);
    app->add_option("--max-iter", max_iter, "Iteration cap")->check(CLI::PositiveNumber);
    app->add_option("--mode", mode, "Feasible plans: modular or all")->check(CLI::IsMember({"modular", "all"}));
  }

  void apply(ncot::SolverOptions& o) const {
    if (tol) {
      o.eps_rel = *tol;
      o.eps_abs = *tol / 10.0;
    }
    if (max_iter) o.max_iter = *max_iter;
  }
};

struct DistanceArgs {
  std::string problem;
  std::string from;
  std::string to;
  bool allow_nonfaithful = false;
  std::uint64_t seed = 0;
  SolverFlags solver;
};

int run_distance(const DistanceArgs& a) {
  const ncot::ProblemFile p = ncot::load_problem(a.problem);
  const ncot::State& mu = p.state(a.from);
  const ncot::State& nu = p.state(a.to);
  ncot::SolverOptions opts = p.solver;
  a.solver.apply(opts);
  const ncot::Mode mode = a.solver.mode ? ncot::parse_mode(*a.solver.mode) : p.mode;

  const bool faithful = mu.faithful() && nu.faithful();
  if (!faithful && !a.allow_nonfaithful)
    throw ncot::InputError("state '" + (mu.faithful() ? a.to : a.from) +
                           "' is not faithful (pass --allow-nonfaithful to compare supports)");
  log("solving " + a.from + " -> " + a.to + " (" + ncot::to_string(mode) + ")");
  const auto t0 = std::chrono::steady_clock::now();
  const ncot::W2Result r = faithful ? ncot::solve_w2(mu, nu, p.generators, mode, opts)
                                    : ncot::nonfaithful_distance(mu, nu, p.generators, mode, opts);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  Json out = ncot::to_json(r, p.generators);
  out["from"] = a.from;
  out["to"] = a.to;
  out["support_compressed"] = !faithful;
  out["wall_time_s"] = seconds;
  out["solver"] = ncot::to_json(opts);
  emit(out);
  for (const auto& w : r.warnings) log("warning: " + w);
  if (!r.converged) {
    log("solver did not converge in " + std::to_string(r.iterations) + " iterations");
    return kNotConverged;
  }
  return kOk;
}

struct VerifyArgs {
  std::size_t dim = 2;
  std::size_t trials = 25;
  std::uint64_t seed = 7;
  std::string suite = "axioms";
  bool abelian = false;
  SolverFlags solver;
};

int run_verify(const VerifyArgs& a) {
  const ncot::FdAlgebra alg = a.abelian ? ncot::FdAlgebra::abelian(a.dim) : ncot::FdAlgebra::full(a.dim);
  const ncot::GeneratorSet k =
      (!a.abelian && a.dim == 2) ? ncot::pauli_generators() : ncot::hermitian_basis(alg);
  ncot::SuiteOptions so;
  a.solver.apply(so.solver);
  log("suite " + a.suite + " on " + (a.abelian ? "C^" : "M_") + std::to_string(a.dim) + ", " +
      std::to_string(a.trials) + " trials, seed " + std::to_string(a.seed));

  Json out;
  bool passed = false;
  if (a.suite == "axioms" || a.suite == "asymmetric") {
    const auto rep = a.suite == "axioms" ? ncot::axiom_suite(alg, k, a.trials, a.seed, so)
                                         : ncot::asymmetric_suite(alg, k, a.trials, a.seed, so);
    out = ncot::to_json(rep);
    passed = rep.passed;
  } else if (a.suite == "kms") {
    const auto mu = ncot::random_faithful_state(alg, ncot::derive_seed(a.seed, 0, 101));
    const auto nu = ncot::random_faithful_state(alg, ncot::derive_seed(a.seed, 0, 102));
    const auto sym = ncot::kms_symmetry_check(mu, nu, k, a.trials, a.seed);
    const auto dual = ncot::kms_duality_check(alg, a.trials, a.seed);
    out = {{"symmetry", ncot::to_json(sym)}, {"duality", ncot::to_json(dual)}, {"passed", sym.passed && dual.passed}};
    passed = sym.passed && dual.passed;
  } else {
    const auto rep = ncot::subadditivity_suite(alg, k, a.trials, a.seed);
    out = ncot::to_json(rep);
    passed = rep.passed;
  }
  out["suite"] = a.suite;
  out["algebra"] = {{"block_dims", alg.block_dims()}};
  emit(out);
  if (!passed) log("suite reported violations beyond tolerance");
  return passed ? kOk : kNotConverged;
}

int run_demo(const std::string& name, const SolverFlags& flags) {
  ncot::SolverOptions opts;
  flags.apply(opts);
  Json out;
  bool passed = false;
  if (name == "pseudometric") {
    const auto rep = ncot::pseudometric_demo({0.6, 0.4}, {0.8, 0.2}, {0.3, 0.7}, opts);
    out = ncot::to_json(rep);
    out["finding"] = "distinct product states at zero distance when the generators miss the second factor";
    passed = rep.passed;
  } else {
    const auto rep = ncot::nonfaithful_demo(opts);
    out = ncot::to_json(rep);
    out["finding"] = "support-compressed distance vanishes on the diagonal and separates orthogonal pure states";
    passed = rep.passed;
  }
  out["demo"] = name;
  emit(out);
  return passed ? kOk : kNotConverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quadratic Wasserstein distance between states of finite-dimensional von Neumann algebras"};
  app.require_subcommand(1);

  DistanceArgs dist;
  auto* distance = app.add_subcommand("distance", "Distance between two states of a problem file");
  distance->add_option("problem", dist.problem, "Problem file (JSON)")->required();
  distance->add_option("--from", dist.from, "Source state name")->required();
  distance->add_option("--to", dist.to, "Target state name")->required();
  distance->add_option("--seed", dist.seed, "Accepted for uniformity; the solver is deterministic");
  distance->add_flag("--allow-nonfaithful", dist.allow_nonfaithful, "Compress non-faithful states to their supports");
  dist.solver.attach(distance);

  VerifyArgs ver;
  auto* verify = app.add_subcommand("verify", "Run a verification suite on random states");
  verify->add_option("--dim", ver.dim, "Matrix size")->check(CLI::PositiveNumber);
  verify->add_option("--trials", ver.trials, "Number of trials");
  verify->add_option("--seed", ver.seed, "Seed");
  verify->add_option("--suite", ver.suite, "axioms, kms, subadd or asymmetric")
      ->check(CLI::IsMember({"axioms", "kms", "subadd", "asymmetric"}));
  verify->add_flag("--abelian", ver.abelian, "Use the diagonal algebra C^dim");
  ver.solver.attach(verify);

  std::string demo_name;
  SolverFlags demo_flags;
  auto* demo = app.add_subcommand("demo", "Run a fixed demonstration (pseudometric, nonfaithful)");
  demo->add_option("name", demo_name, "Demo name")->required();
  demo_flags.attach(demo);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cerr << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    const std::string which = app.get_subcommands().empty() ? "" : app.get_subcommands().front()->get_name();
    if (dynamic_cast<const CLI::CallForHelp*>(&e) == nullptr && !which.empty())
      std::cerr << app.get_subcommand(which)->help();
    return input_error(e.what());
  }

  try {
    if (distance->parsed()) return run_distance(dist);
    if (verify->parsed()) return run_verify(ver);
    if (demo_name != "pseudometric" && demo_name != "nonfaithful")
      return input_error("unknown demo '" + demo_name + "' (available: pseudometric, nonfaithful)");
    return run_demo(demo_name, demo_flags);
  } catch (const ncot::InputError& e) {
    return input_error(e.what());
  } catch (const ncot::NumericalError& e) {
    log(std::string("numerical failure: ") + e.what());
    emit({{"error", e.what()}});
    return kNotConverged;
  }
}
