#include "noether_qds/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "noether_qds/io.hpp"

namespace noether::cli {

namespace {

using io::json;
using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kDefaultSeed = 20160101;

struct CommonOptions {
  std::string format = "json";
  std::optional<double> tol;
  std::string time_grid;
};

std::vector<double> parse_time_grid(const std::string& text) {
  if (text.empty()) return default_time_grid();
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double t = 0.0;
    try {
      t = std::stod(item, &used);
    } catch (const std::exception&) {
      throw io::DocumentError("--time-grid: \"" + item + "\" is not a number");
    }
    if (used != item.size() || !(t >= 0.0) || !std::isfinite(t)) {
      throw io::DocumentError("--time-grid entries must be finite and nonnegative");
    }
    grid.push_back(t);
  }
  if (grid.empty()) throw io::DocumentError("--time-grid is empty");
  return grid;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("NOETHER_QDS_SEED")) {
    char* end = nullptr;
    const auto v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') throw io::DocumentError("NOETHER_QDS_SEED is not a nonnegative integer");
    return v;
  }
  return kDefaultSeed;
}

json envelope(const std::string& command, Clock::time_point start, int exit_code) {
  return {
      {"tool", "noether-qds"},
      {"version", io::kToolVersion},
      {"command", command},
      {"exit_code", exit_code},
      {"timing_ms", std::chrono::duration<double, std::milli>(Clock::now() - start).count()},
  };
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

std::string sci(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(3) << v;
  return os.str();
}

// ---------------------------------------------------------------------------

int classical_check(const std::string& path, const CommonOptions& opts, std::ostream& out) {
  const auto start = Clock::now();
  const auto doc = io::parse_problem(io::read_json_file(path));
  if (doc.kind != io::ProblemKind::classical) throw io::DocumentError("expected a classical problem document");
  if (!doc.A) throw io::DocumentError("missing field \"A\"");
  ToleranceConfig cfg = doc.tolerance_config();
  if (opts.tol) cfg.commute_tol = *opts.tol;
  const auto grid = parse_time_grid(opts.time_grid);

  const auto gen = classical::ClassicalGenerator::validate(doc.M, cfg);
  const auto report = classical::check_constant(*doc.A, gen, cfg, grid);
  const int code = report.is_constant() ? kOk : kAssertionFailed;

  if (opts.format == "text") {
    out << "classical check, d = " << doc.d << "\n";
    out << "communication classes: " << report.classes.size() << "\n";
    out << "  distribution constant : " << yes_no(report.cond_distribution) << " (" << sci(report.distribution_residual) << ")\n";
    out << "  moments constant      : " << yes_no(report.cond_moments) << " (" << sci(report.moment_residual) << ")\n";
    out << "  class measurable      : " << yes_no(report.cond_measurable) << " (" << sci(report.measurable_residual) << ")\n";
    out << "  [A^, M] = 0           : " << yes_no(report.cond_commutator) << " (" << sci(report.commutator_residual) << ")\n";
    out << "constant: " << yes_no(report.is_constant()) << "\n";
  } else {
    json j = envelope("classical-check", start, code);
    j["seed"] = nullptr;
    j["classical"] = io::to_json(report);
    j["classical"]["d"] = doc.d;
    out << j.dump(2) << "\n";
  }
  return code;
}

// ---------------------------------------------------------------------------

struct AnalyzeFlags {
  bool fixed_points = false;
  bool constants = false;
  bool stationary = false;
  bool condexp = false;
};

int quantum_analyze(const std::string& path, AnalyzeFlags flags, const CommonOptions& opts, std::ostream& out,
                    std::ostream& err) {
  const auto start = Clock::now();
  const auto doc = io::parse_problem(io::read_json_file(path));
  if (doc.kind != io::ProblemKind::quantum) throw io::DocumentError("expected a quantum problem document");
  ToleranceConfig cfg = doc.tolerance_config();
  if (opts.tol) {
    cfg.commute_tol = *opts.tol;
    cfg.subspace_tol = *opts.tol;
  }
  const auto grid = parse_time_grid(opts.time_grid);
  const std::vector<ComplexMatrix> observables = doc.observables.value_or(std::vector<ComplexMatrix>{});

  if (!flags.fixed_points && !flags.constants && !flags.stationary && !flags.condexp) {
    flags.fixed_points = flags.stationary = true;
    flags.constants = !observables.empty();
  }

  std::optional<qds::LindbladSpec> spec;
  try {
    spec.emplace(doc.H, doc.L, cfg);
  } catch (const Error& e) {
    throw io::DocumentError(std::string("invalid generator: ") + e.what());
  }
  const auto schr = qds::lindblad_schrodinger(*spec);
  const auto heis = qds::lindblad_heisenberg(*spec);
  const auto stationary = stationary_state(schr, cfg);

  int code = kOk;
  json q;
  q["d"] = doc.d;
  q["postulate_p"] = stationary.postulate_p_holds;
  q["min_stationary_eigenvalue"] = stationary.min_eigenvalue;

  std::ostringstream text;
  text << "quantum analysis, d = " << doc.d << ", " << doc.L.size() << " Lindblad operator(s)\n";
  text << "Postulate (P): " << yes_no(stationary.postulate_p_holds)
       << " (min stationary eigenvalue " << sci(stationary.min_eigenvalue) << ")\n";

  if (flags.stationary) q["stationary"] = io::to_json(stationary);

  if (flags.fixed_points) {
    const auto fixed = fixed_points(heis, cfg);
    const auto comm = commutant(*spec, cfg);
    const double dist = subspace_distance(fixed, comm);
    q["fixed_points"] = io::to_json(fixed);
    q["commutant"] = io::to_json(comm);
    q["subspace_distance"] = dist;
    const bool fixed_ok = !stationary.postulate_p_holds || dist <= cfg.subspace_tol;
    q["fixed_points_equal_commutant"] = dist <= cfg.subspace_tol;
    if (!fixed_ok) code = kAssertionFailed;
    text << "fixed points: dim " << fixed.dim() << ", commutant: dim " << comm.dim() << ", distance "
         << sci(dist) << "\n";
    text << "fixed points closed under adjoint/product: " << yes_no(fixed.closed_under_adjoint()) << "/"
         << yes_no(fixed.closed_under_product()) << "\n";
  }

  if (flags.constants) {
    json list = json::array();
    for (std::size_t k = 0; k < observables.size(); ++k) {
      const auto rep = noether_check(observables[k], *spec, cfg);
      double grid_res = 0.0;
      for (double t : grid) grid_res = std::max(grid_res, (qds::evolve(heis, observables[k], t) - observables[k]).norm());
      json item = io::to_json(rep);
      item["index"] = k;
      item["grid_fixed_residual"] = grid_res;
      list.push_back(std::move(item));
      const bool constant = rep.is_fixed_point && rep.hat_commutes && rep.in_commutant;
      if (!constant) code = kAssertionFailed;
      text << "A[" << k << "]: fixed point " << yes_no(rep.is_fixed_point) << ", hat commutes "
           << yes_no(rep.hat_commutes) << ", in commutant " << yes_no(rep.in_commutant) << " -> constant: "
           << yes_no(constant) << "\n";
    }
    q["observables"] = std::move(list);
  }

  bool postulate_failed = false;
  if (flags.condexp) {
    if (!stationary.postulate_p_holds) {
      postulate_failed = true;
      const std::string why = "conditional expectation requires a faithful stationary state; the ergodic "
                              "projection of I/d has minimal eigenvalue " + sci(stationary.min_eigenvalue);
      q["conditional_expectation"] = {{"error", why}};
      err << "noether-qds: " << why << "\n";
      text << "conditional expectation: unavailable (Postulate (P) fails)\n";
    } else {
      const ConditionalExpectation cond(heis, cfg);
      json list = json::array();
      for (std::size_t k = 0; k < observables.size(); ++k) {
        list.push_back({{"index", k}, {"matrix", io::matrix_to_json(cond(observables[k]))}});
      }
      q["conditional_expectation"] = {{"results", list}};
      text << "conditional expectation computed for " << observables.size() << " observable(s)\n";
    }
  }
  if (postulate_failed) code = kPostulateFailed;

  if (opts.format == "text") {
    out << text.str() << "exit " << code << "\n";
  } else {
    json j = envelope("quantum-analyze", start, code);
    j["seed"] = nullptr;
    j["quantum"] = std::move(q);
    out << j.dump(2) << "\n";
  }
  return code;
}

// ---------------------------------------------------------------------------

int verify(const std::string& source, std::optional<std::uint64_t> seed_flag, std::optional<int> trials,
           const CommonOptions& opts, std::ostream& out) {
  const auto start = Clock::now();
  if (trials && *trials < 0) throw io::DocumentError("--trials must be nonnegative");
  std::uint64_t seed = seed_flag ? *seed_flag : default_seed();
  std::vector<harness::InstanceRecipe> recipes;
  if (source == "paper-suite") {
    recipes = harness::builtin_suite(seed, trials);
  } else {
    auto doc = io::parse_recipes(io::read_json_file(source), seed);
    if (!seed_flag && doc.seed) seed = *doc.seed;
    recipes = std::move(doc.recipes);
    if (trials) {
      for (auto& r : recipes) r.trials = *trials;
    }
  }
  const auto report = harness::verify_equivalences(recipes);
  const int code = report.ok() ? kOk : kAssertionFailed;

  if (opts.format == "text") {
    for (const auto& s : report.suites) {
      out << std::left << std::setw(32) << s.name << " trials " << std::setw(4) << s.trials << " passed "
          << std::setw(4) << s.passed << " skipped " << std::setw(3) << s.skipped << " failed "
          << s.failures.size() << "\n";
      for (const auto& f : s.failures) out << "    #" << f.index << ": " << f.message << "\n";
    }
    out << (report.ok() ? "all suites passed" : "FAILURES") << "\n";
  } else {
    json j = envelope("verify", start, code);
    j["seed"] = seed;
    j["verify"] = io::to_json(report);
    out << j.dump(2) << "\n";
  }
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Noether constants of classical and quantum Markov semigroups", "noether-qds"};
  app.require_subcommand(1);
  app.set_version_flag("--version", io::kToolVersion);

  CommonOptions opts;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", opts.format, "Report format")->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--tol", opts.tol, "Override the assertion tolerances")->check(CLI::PositiveNumber);
    sub->add_option("--time-grid", opts.time_grid, "Comma-separated times for grid cross-checks");
  };

  std::string classical_path;
  auto* classical_cmd = app.add_subcommand("classical-check", "Check a random variable against a classical generator");
  classical_cmd->add_option("input", classical_path, "Problem document (JSON)")->required();
  add_common(classical_cmd);

  std::string quantum_path;
  AnalyzeFlags flags;
  auto* quantum_cmd = app.add_subcommand("quantum-analyze", "Analyze a Lindblad generator and observables");
  quantum_cmd->add_option("input", quantum_path, "Problem document (JSON)")->required();
  quantum_cmd->add_flag("--fixed-points", flags.fixed_points, "Fixed points versus the commutant");
  quantum_cmd->add_flag("--constants", flags.constants, "Noether check for every observable");
  quantum_cmd->add_flag("--stationary", flags.stationary, "Stationary state and Postulate (P)");
  quantum_cmd->add_flag("--condexp", flags.condexp, "Conditional expectation onto the fixed points");
  add_common(quantum_cmd);

  std::string source = "paper-suite";
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  auto* verify_cmd = app.add_subcommand("verify", "Run the randomized equivalence suites");
  verify_cmd->add_option("source", source, "Recipe document or built-in suite name")->capture_default_str();
  verify_cmd->add_option("--seed", seed, "Base seed (default: $NOETHER_QDS_SEED)");
  verify_cmd->add_option("--trials", trials, "Trials per suite");
  add_common(verify_cmd);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kInputError;
  }

  try {
    if (*classical_cmd) return classical_check(classical_path, opts, out);
    if (*quantum_cmd) return quantum_analyze(quantum_path, flags, opts, out, err);
    if (*verify_cmd) return verify(source, seed, trials, opts, out);
  } catch (const io::DocumentError& e) {
    err << "noether-qds: " << e.what() << "\n";
    return kInputError;
  } catch (const Error& e) {
    err << "noether-qds: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "noether-qds: internal error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace noether::cli
