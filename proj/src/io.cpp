#include "noether_qds/io.hpp"

#include <fstream>
#include <sstream>

namespace noether::io {

namespace {

const json& require(const json& j, const std::string& field) {
  if (!j.is_object() || !j.contains(field)) throw DocumentError("missing field \"" + field + "\"");
  return j.at(field);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw DocumentError(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw DocumentError(where + ": non-finite number");
  return v;
}

cplx complex_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) throw DocumentError(where + ": complex scalars are [re, im] pairs");
  return {number(j[0], where), number(j[1], where)};
}

template <typename Entry>
auto matrix_from_json(const json& j, const std::string& field, Entry&& entry) {
  using Scalar = decltype(entry(j, field));
  if (!j.is_array() || j.empty()) throw DocumentError(field + ": expected a nonempty array of rows");
  const auto rows = Eigen::Index(j.size());
  if (!j[0].is_array() || j[0].empty()) throw DocumentError(field + ": rows must be nonempty arrays");
  const auto cols = Eigen::Index(j[0].size());
  Matrix<Scalar> m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[std::size_t(r)];
    if (!row.is_array() || Eigen::Index(row.size()) != cols) throw DocumentError(field + ": ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = entry(row[std::size_t(c)], field + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
  }
  return m;
}

void require_dim(Eigen::Index rows, Eigen::Index cols, Eigen::Index d, const std::string& field) {
  if (rows != d || cols != d) {
    throw DocumentError(field + ": expected " + std::to_string(d) + "x" + std::to_string(d) + ", got " +
                        std::to_string(rows) + "x" + std::to_string(cols));
  }
}

std::vector<ComplexMatrix> complex_matrix_list(const json& j, const std::string& field, Eigen::Index d) {
  if (!j.is_array()) throw DocumentError(field + ": expected an array of matrices");
  std::vector<ComplexMatrix> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string name = field + "[" + std::to_string(k) + "]";
    out.push_back(complex_matrix_from_json(j[k], name));
    require_dim(out.back().rows(), out.back().cols(), d, name);
  }
  return out;
}

double* tolerance_slot(ToleranceConfig& cfg, const std::string& name) {
  if (name == "herm_tol") return &cfg.herm_tol;
  if (name == "eig_cluster_tol") return &cfg.eig_cluster_tol;
  if (name == "nullspace_tol") return &cfg.nullspace_tol;
  if (name == "commute_tol") return &cfg.commute_tol;
  if (name == "positivity_tol") return &cfg.positivity_tol;
  if (name == "subspace_tol") return &cfg.subspace_tol;
  return nullptr;
}

json residual(bool holds, double value) { return {{"holds", holds}, {"residual", value}}; }

}  // namespace

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json matrix_to_json(const RealMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix complex_matrix_from_json(const json& j, const std::string& field) {
  return matrix_from_json(j, field, [](const json& e, const std::string& w) { return complex_from_json(e, w); });
}

RealMatrix real_matrix_from_json(const json& j, const std::string& field) {
  return matrix_from_json(j, field, [](const json& e, const std::string& w) { return number(e, w); });
}

ToleranceConfig ProblemDocument::tolerance_config() const {
  ToleranceConfig cfg;
  for (const auto& [name, value] : tolerances) *tolerance_slot(cfg, name) = value;
  cfg.validate();
  return cfg;
}

ProblemDocument parse_problem(const json& j) {
  if (!j.is_object()) throw DocumentError("problem document must be a JSON object");
  ProblemDocument doc;
  const json& version = require(j, "version");
  if (!version.is_string()) throw DocumentError("version must be a string");
  doc.version = version.get<std::string>();
  if (doc.version.rfind("1.", 0) != 0) throw DocumentError("unsupported version \"" + doc.version + "\"");

  const json& kind = require(j, "kind");
  if (kind == "classical") {
    doc.kind = ProblemKind::classical;
  } else if (kind == "quantum") {
    doc.kind = ProblemKind::quantum;
  } else {
    throw DocumentError("kind must be \"classical\" or \"quantum\"");
  }

  const json& d = require(j, "d");
  if (!d.is_number_integer() || d.get<long long>() < 1) throw DocumentError("d must be a positive integer");
  doc.d = Eigen::Index(d.get<long long>());

  if (doc.kind == ProblemKind::classical) {
    doc.M = real_matrix_from_json(require(j, "M"), "M");
    require_dim(doc.M.rows(), doc.M.cols(), doc.d, "M");
    if (j.contains("A")) {
      const json& a = j.at("A");
      if (!a.is_array() || Eigen::Index(a.size()) != doc.d) {
        throw DocumentError("A: expected an array of " + std::to_string(doc.d) + " numbers");
      }
      RealVector v(doc.d);
      for (Eigen::Index i = 0; i < doc.d; ++i) v(i) = number(a[std::size_t(i)], "A[" + std::to_string(i) + "]");
      doc.A = v;
    }
  } else {
    doc.H = complex_matrix_from_json(require(j, "H"), "H");
    require_dim(doc.H.rows(), doc.H.cols(), doc.d, "H");
    doc.L = complex_matrix_list(require(j, "L"), "L", doc.d);
    if (j.contains("A")) doc.observables = complex_matrix_list(j.at("A"), "A", doc.d);
  }

  if (j.contains("tolerances")) {
    const json& tol = j.at("tolerances");
    if (!tol.is_object()) throw DocumentError("tolerances must be an object");
    for (const auto& [name, value] : tol.items()) {
      ToleranceConfig probe;
      if (!tolerance_slot(probe, name)) throw DocumentError("unknown tolerance \"" + name + "\"");
      const double v = number(value, "tolerances." + name);
      if (!(v > 0.0)) throw DocumentError("tolerances." + name + " must be strictly positive");
      doc.tolerances[name] = v;
    }
  }
  return doc;
}

json to_json(const ProblemDocument& doc) {
  json j;
  j["version"] = doc.version;
  j["kind"] = doc.kind == ProblemKind::classical ? "classical" : "quantum";
  j["d"] = doc.d;
  if (doc.kind == ProblemKind::classical) {
    j["M"] = matrix_to_json(doc.M);
    if (doc.A) j["A"] = std::vector<double>(doc.A->data(), doc.A->data() + doc.A->size());
  } else {
    j["H"] = matrix_to_json(doc.H);
    j["L"] = json::array();
    for (const auto& l : doc.L) j["L"].push_back(matrix_to_json(l));
    if (doc.observables) {
      j["A"] = json::array();
      for (const auto& a : *doc.observables) j["A"].push_back(matrix_to_json(a));
    }
  }
  if (!doc.tolerances.empty()) {
    j["tolerances"] = json::object();
    for (const auto& [name, value] : doc.tolerances) j["tolerances"][name] = value;
  }
  return j;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DocumentError("cannot open \"" + path + "\"");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DocumentError("\"" + path + "\" is not valid JSON: " + e.what());
  }
}

RecipeDocument parse_recipes(const json& j, std::uint64_t default_seed) {
  if (!j.is_object()) throw DocumentError("recipe document must be a JSON object");
  RecipeDocument doc;
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw DocumentError("seed must be a nonnegative integer");
    doc.seed = j.at("seed").get<std::uint64_t>();
  }
  const std::uint64_t base = doc.seed.value_or(default_seed);
  const json& list = require(j, "recipes");
  if (!list.is_array()) throw DocumentError("recipes must be an array");
  for (std::size_t k = 0; k < list.size(); ++k) {
    const json& item = list[k];
    const std::string where = "recipes[" + std::to_string(k) + "]";
    if (!item.is_object()) throw DocumentError(where + " must be an object");
    harness::InstanceRecipe r;
    const json& kind = require(item, "kind");
    const auto parsed = kind.is_string() ? harness::recipe_kind_from_string(kind.get<std::string>()) : std::nullopt;
    if (!parsed) throw DocumentError(where + ".kind is not a known instance kind");
    r.kind = *parsed;
    r.seed = base + k;
    auto get_int = [&](const char* field, auto& slot) {
      if (!item.contains(field)) return;
      if (!item.at(field).is_number_integer()) throw DocumentError(where + "." + field + " must be an integer");
      slot = static_cast<std::remove_reference_t<decltype(slot)>>(item.at(field).get<long long>());
    };
    get_int("d", r.d);
    get_int("d_min", r.d_min);
    get_int("d_max", r.d_max);
    get_int("trials", r.trials);
    if (item.contains("seed")) {
      if (!item.at("seed").is_number_unsigned()) throw DocumentError(where + ".seed must be a nonnegative integer");
      r.seed = item.at("seed").get<std::uint64_t>();
    }
    if (item.contains("sparsity")) r.sparsity = number(item.at("sparsity"), where + ".sparsity");
    if (item.contains("name")) {
      if (!item.at("name").is_string()) throw DocumentError(where + ".name must be a string");
      r.name = item.at("name").get<std::string>();
    }
    if (item.contains("blocks")) {
      const json& blocks = item.at("blocks");
      if (!blocks.is_array()) throw DocumentError(where + ".blocks must be an array of [n, m] pairs");
      for (const auto& b : blocks) {
        if (!b.is_array() || b.size() != 2 || !b[0].is_number_integer() || !b[1].is_number_integer()) {
          throw DocumentError(where + ".blocks entries must be [n, m] integer pairs");
        }
        r.blocks.emplace_back(b[0].get<int>(), b[1].get<int>());
      }
    }
    try {
      r.validate();
    } catch (const Error& e) {
      throw DocumentError(where + ": " + e.what());
    }
    doc.recipes.push_back(std::move(r));
  }
  return doc;
}

json to_json(const classical::NoetherReportClassical& r) {
  json classes = json::array();
  for (const auto& block : r.classes.classes) {
    json b = json::array();
    for (int x : block) b.push_back(x + 1);
    classes.push_back(std::move(b));
  }
  return {
      {"classes", classes},
      {"conditions",
       {{"distribution", residual(r.cond_distribution, r.distribution_residual)},
        {"moments", residual(r.cond_moments, r.moment_residual)},
        {"measurable", residual(r.cond_measurable, r.measurable_residual)},
        {"commutator", residual(r.cond_commutator, r.commutator_residual)}}},
      {"all_agree", r.all_agree()},
      {"is_constant", r.is_constant()},
  };
}

json to_json(const NoetherReportQuantum& r) {
  return {
      {"is_fixed_point", residual(r.is_fixed_point, r.fixed_point_residual)},
      {"hat_commutes", residual(r.hat_commutes, r.hat_residual)},
      {"in_commutant", residual(r.in_commutant, r.commutant_residual)},
      {"all_agree", r.all_agree()},
      {"is_constant", r.is_fixed_point && r.hat_commutes && r.in_commutant},
      {"postulate_p", r.postulate_p_holds},
  };
}

json to_json(const StationaryReport& r) {
  return {
      {"postulate_p", r.postulate_p_holds},
      {"min_eigenvalue", r.min_eigenvalue},
      {"kernel_dim", r.kernel_dim},
      {"stationarity_residual", r.stationarity_residual},
      {"state", matrix_to_json(r.candidate.rho)},
  };
}

json to_json(const OperatorSubspace& s) {
  return {
      {"dim", s.dim()},
      {"closed_under_adjoint", s.closed_under_adjoint()},
      {"closed_under_product", s.closed_under_product()},
      {"contains_identity", s.contains_identity()},
  };
}

json to_json(const harness::SuiteSummary& s) {
  json failures = json::array();
  for (const auto& f : s.failures) failures.push_back({{"index", f.index}, {"message", f.message}});
  json residuals = json::object();
  for (const auto& [k, v] : s.max_residuals) residuals[k] = v;
  return {
      {"name", s.name},       {"trials", s.trials},     {"passed", s.passed},         {"skipped", s.skipped},
      {"failed", int(s.failures.size())}, {"failures", failures}, {"max_residuals", residuals},
  };
}

json to_json(const harness::VerificationReport& r) {
  json suites = json::array();
  for (const auto& s : r.suites) suites.push_back(to_json(s));
  return {{"ok", r.ok()}, {"suites", suites}};
}

}  // namespace noether::io
