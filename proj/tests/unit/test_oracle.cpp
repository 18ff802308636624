#include <fstream>
#include <random>

#include "doctest.h"
#include "json.hpp"
#include "prox_vs_oracle.hpp"

using namespace testing;

TEST_SUITE("oracle") {

TEST_CASE("brute-force oracle agrees with an external convex solver") {
  std::ifstream in(std::string(OTREPAIR_FIXTURE_DIR) + "/oracle_crosscheck.json");
  REQUIRE(in.good());
  const auto doc = nlohmann::json::parse(in);
  REQUIRE(doc["cases"].size() == 21);
  for (const auto& c : doc["cases"]) {
    oracle::Instance inst;
    inst.kind = c["kind"];
    inst.rows = c["rows"];
    inst.cols = c["cols"];
    inst.gamma_bar = c["gamma_bar"].get<std::vector<double>>();
    inst.vec = c["vec"].get<std::vector<double>>();
    inst.theta = c["theta"].get<std::vector<double>>();
    inst.eta = c["eta"];
    const auto expected = c["solution"].get<std::vector<double>>();
    const auto sol = oracle::solve(inst);
    CAPTURE(inst.kind);
    CHECK(sol.infeasibility < 1e-12);
    for (std::size_t k = 0; k < expected.size(); ++k) {
      CHECK(std::abs(sol.x(static_cast<Eigen::Index>(k)) - expected[k]) < 1e-7);
    }
    CHECK(std::abs(sol.objective - c["objective"].get<double>()) < 1e-7);
  }
}

TEST_CASE("library prox matches the oracle on random small instances") {
  std::mt19937_64 rng(404);
  for (const char* kind : kProxKinds) {
    for (int t = 0; t < 20; ++t) {
      const auto inst = random_instance(rng, kind);
      const auto cmp = compare_with_oracle(inst);
      const std::string name = kind;
      CAPTURE(name);
      CAPTURE(cmp.kl_gap);
      CHECK(cmp.oracle_infeasibility < 1e-12);
      CHECK(cmp.kl_gap < 1e-6);
      CHECK(cmp.max_entry < 1e-5);
    }
  }
}

TEST_CASE("three by three parity band with theta 0.05") {
  oracle::Instance inst;
  inst.kind = "parity_band";
  inst.rows = inst.cols = 3;
  inst.gamma_bar = {0.05, 0.20, 0.10, 0.15, 0.05, 0.10, 0.02, 0.08, 0.25};
  inst.vec = {-1.2, 0.3, 0.9};
  inst.theta = {0.05, 0.05, 0.05};
  const auto cmp = compare_with_oracle(inst);
  CHECK(cmp.kl_gap < 1e-6);
  CHECK(cmp.max_entry < 1e-8);
}

}
