#include <gtest/gtest.h>

#include <sstream>

#include "noether_qds/cli.hpp"
#include "noether_qds/io.hpp"

using namespace noether;
using io::json;

namespace {

std::string data(const std::string& name) { return std::string(NOETHER_QDS_DATA_DIR) + "/" + name; }

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

io::ProblemDocument random_document(std::uint64_t seed) {
  auto rng = harness::make_rng(seed);
  io::ProblemDocument doc;
  doc.d = 1 + Eigen::Index(seed % 4);
  if (seed % 2 == 0) {
    doc.kind = io::ProblemKind::classical;
    doc.M = harness::gen_random_classical(std::max<Eigen::Index>(doc.d, 2), 0.3, seed).matrix();
    doc.d = doc.M.rows();
    if (seed % 4 == 0) doc.A = RealVector::Random(doc.d);
  } else {
    doc.kind = io::ProblemKind::quantum;
    doc.H = harness::random_hermitian(doc.d, rng);
    for (std::uint64_t k = 0; k < seed % 3; ++k) doc.L.push_back(harness::random_complex(doc.d, doc.d, rng));
    if (seed % 3 == 1) doc.observables = std::vector<ComplexMatrix>{harness::random_hermitian(doc.d, rng)};
  }
  if (seed % 5 == 0) doc.tolerances["commute_tol"] = 1e-7;
  return doc;
}

}  // namespace

TEST(Document, RoundTripIsValueIdentical) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const json first = io::to_json(random_document(seed));
    const io::ProblemDocument parsed = io::parse_problem(first);
    const json second = io::to_json(parsed);
    EXPECT_EQ(first, second) << first.dump();
    // Through text as well, so doubles survive serialization.
    EXPECT_EQ(io::to_json(io::parse_problem(json::parse(first.dump()))), first);
  }
}

TEST(Document, ComplexEncoding) {
  EXPECT_EQ(io::complex_to_json(cplx(1.5, -2.0)), json::array({1.5, -2.0}));
  const json j = json::array({json::array({json::array({0, 1}), json::array({2, 0})})});
  const ComplexMatrix m = io::complex_matrix_from_json(j, "X");
  EXPECT_EQ(m.rows(), 1);
  EXPECT_EQ(m(0, 0), cplx(0, 1));
  EXPECT_EQ(m(0, 1), cplx(2, 0));
}

TEST(Document, RejectsMalformedInput) {
  const json base = io::to_json(random_document(1));
  auto broken = [&](auto edit) {
    json j = base;
    edit(j);
    EXPECT_THROW(io::parse_problem(j), io::DocumentError) << j.dump();
  };
  broken([](json& j) { j.erase("H"); });
  broken([](json& j) { j.erase("L"); });
  broken([](json& j) { j["kind"] = "other"; });
  broken([](json& j) { j["version"] = "2.0"; });
  broken([](json& j) { j["d"] = 7; });
  broken([](json& j) { j["H"][0][0] = 1.0; });
  broken([](json& j) { j["tolerances"] = {{"made_up_tol", 1.0}}; });
  EXPECT_THROW(io::read_json_file(data("does_not_exist.json")), io::DocumentError);
}

TEST(Document, ToleranceOverridesApply) {
  io::ProblemDocument doc = random_document(5);
  EXPECT_EQ(doc.tolerance_config().commute_tol, 1e-7);
  EXPECT_EQ(doc.tolerance_config().herm_tol, ToleranceConfig{}.herm_tol);
}

TEST(Recipes, ParseAndDefaults) {
  const auto doc = io::parse_recipes(io::read_json_file(data("recipes_small.json")), 100);
  ASSERT_TRUE(doc.seed.has_value());
  EXPECT_EQ(*doc.seed, 7u);
  ASSERT_EQ(doc.recipes.size(), 4u);
  EXPECT_EQ(doc.recipes[1].kind, harness::RecipeKind::structured_commutant);
  EXPECT_THROW(io::parse_recipes(io::read_json_file(data("recipes_bad_blocks.json")), 0), io::DocumentError);
}

TEST(Cli, ClassicalExitCodes) {
  EXPECT_EQ(invoke({"classical-check", data("classical_block_chain.json")}).code, cli::kOk);
  EXPECT_EQ(invoke({"classical-check", data("classical_irreducible.json")}).code, cli::kAssertionFailed);
  const Invocation missing = invoke({"classical-check", data("classical_missing_m.json")});
  EXPECT_EQ(missing.code, cli::kInputError);
  EXPECT_NE(missing.err.find("\"M\""), std::string::npos);
  EXPECT_EQ(invoke({"classical-check", data("does_not_exist.json")}).code, cli::kInputError);
}

TEST(Cli, ClassicalJsonReport) {
  const Invocation r = invoke({"classical-check", data("classical_block_chain.json")});
  const json j = json::parse(r.out);
  EXPECT_EQ(j["tool"], "noether-qds");
  EXPECT_EQ(j["exit_code"], 0);
  EXPECT_TRUE(j["classical"]["is_constant"].get<bool>());
  EXPECT_EQ(j["classical"]["classes"].size(), 2u);
}

TEST(Cli, QuantumExitCodes) {
  const Invocation ok = invoke({"quantum-analyze", data("quantum_dephasing_sz.json")});
  ASSERT_EQ(ok.code, cli::kOk) << ok.err;
  const json j = json::parse(ok.out);
  EXPECT_TRUE(j["quantum"]["postulate_p"].get<bool>());
  EXPECT_TRUE(j["quantum"]["observables"][0]["is_constant"].get<bool>());

  const Invocation condexp = invoke({"quantum-analyze", data("quantum_amplitude_damping.json"), "--condexp"});
  EXPECT_EQ(condexp.code, cli::kPostulateFailed);
  EXPECT_NE(condexp.err.find("faithful"), std::string::npos);

  EXPECT_EQ(invoke({"quantum-analyze", data("quantum_dephasing_sx.json"), "--constants"}).code,
            cli::kAssertionFailed);
  EXPECT_EQ(invoke({"quantum-analyze", data("classical_block_chain.json")}).code, cli::kInputError);
}

TEST(Cli, QuantumConditionalExpectationOutput) {
  const Invocation r = invoke({"quantum-analyze", data("quantum_dephasing_sx.json"), "--condexp"});
  ASSERT_EQ(r.code, cli::kOk);
  const json j = json::parse(r.out);
  const ComplexMatrix e =
      io::complex_matrix_from_json(j["quantum"]["conditional_expectation"]["results"][0]["matrix"], "E");
  EXPECT_LT(e.norm(), 1e-12);
}

TEST(Cli, OptionsAreValidated) {
  EXPECT_EQ(invoke({"classical-check", data("classical_block_chain.json"), "--format", "xml"}).code, cli::kInputError);
  EXPECT_EQ(invoke({"classical-check", data("classical_block_chain.json"), "--time-grid", "0,x"}).code,
            cli::kInputError);
  EXPECT_EQ(invoke({"classical-check", data("classical_block_chain.json"), "--time-grid", "0,2.5", "--format", "text"})
                .code,
            cli::kOk);
  EXPECT_EQ(invoke({}).code, cli::kInputError);
  EXPECT_EQ(invoke({"--help"}).code, cli::kOk);
}

TEST(Cli, VerifyExitCodes) {
  const Invocation zero = invoke({"verify", "paper-suite", "--trials", "0"});
  EXPECT_EQ(zero.code, cli::kOk);
  for (const auto& s : json::parse(zero.out)["verify"]["suites"]) EXPECT_EQ(s["trials"], 0);
  EXPECT_EQ(invoke({"verify", data("recipes_small.json")}).code, cli::kOk);
  EXPECT_EQ(invoke({"verify", data("recipes_bad_blocks.json")}).code, cli::kInputError);
  EXPECT_EQ(invoke({"verify", "paper-suite", "--trials", "-1"}).code, cli::kInputError);
}

TEST(Cli, VerifyBuiltinSuiteDefaultSeed) {
  const Invocation r = invoke({"verify", "paper-suite"});
  EXPECT_EQ(r.code, cli::kOk) << r.out;
  EXPECT_TRUE(json::parse(r.out)["verify"]["ok"].get<bool>());
}
