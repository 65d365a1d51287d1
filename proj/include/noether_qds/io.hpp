#pragma once

// JSON problem, recipe and report documents.
//
// Complex scalars are [re, im] pairs, matrices are row-major nested arrays.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "noether_qds/classical.hpp"
#include "noether_qds/harness.hpp"
#include "noether_qds/noether.hpp"

namespace noether::io {

using json = nlohmann::json;

inline constexpr const char* kFormatVersion = "1.0";
inline constexpr const char* kToolVersion = "1.0.0";

// Malformed or inconsistent input document.
class DocumentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ProblemKind { classical, quantum };

struct ProblemDocument {
  std::string version = kFormatVersion;
  ProblemKind kind = ProblemKind::classical;
  Eigen::Index d = 0;

  // classical
  RealMatrix M;
  std::optional<RealVector> A;

  // quantum
  ComplexMatrix H;
  // Required, possibly empty.
  std::vector<ComplexMatrix> L;
  std::optional<std::vector<ComplexMatrix>> observables;

  // Only the overrides present in the document, keyed by field name.
  std::map<std::string, double> tolerances;

  ToleranceConfig tolerance_config() const;
};

ProblemDocument parse_problem(const json& j);
json to_json(const ProblemDocument& doc);
// Reads and parses a file; DocumentError on I/O or syntax problems.
json read_json_file(const std::string& path);

json complex_to_json(cplx z);
json matrix_to_json(const ComplexMatrix& m);
json matrix_to_json(const RealMatrix& m);
ComplexMatrix complex_matrix_from_json(const json& j, const std::string& field);
RealMatrix real_matrix_from_json(const json& j, const std::string& field);

struct RecipeDocument {
  std::optional<std::uint64_t> seed;
  std::vector<harness::InstanceRecipe> recipes;
};

// Recipe seeds default to base seed + position when absent.
RecipeDocument parse_recipes(const json& j, std::uint64_t default_seed);

json to_json(const classical::NoetherReportClassical& r);
json to_json(const NoetherReportQuantum& r);
json to_json(const StationaryReport& r);
json to_json(const OperatorSubspace& s);
json to_json(const harness::SuiteSummary& s);
json to_json(const harness::VerificationReport& r);

}  // namespace noether::io
