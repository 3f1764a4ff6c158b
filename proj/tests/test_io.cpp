/**
 * @file test_io.cpp
 * @brief Output document serialization: lossless round trip, revalidation
 * and renderings.
 */

#include <catch_amalgamated.hpp>

#include <cmath>

#include "mopchains/io.hpp"

using namespace mopchains;
using Catch::Approx;

namespace {

OutputDocument sample_document() {
  const auto spec = FamilySpec::multiple_hahn(0.4, 0.6, 0.75, 10);
  const auto ch = chains::build(spec, 7, ChainKind::TypeII);
  auto d = io::make_document(spec, ch);
  d.factors = io::factor_entries(factor::stochastic_factors(ch));
  return d;
}

}  // namespace

TEST_CASE("documents round-trip bit for bit") {
  const auto d = sample_document();
  const auto e = io::parse(io::dump(d));
  CHECK(e.family == "multiple-hahn");
  CHECK(e.kind == "II");
  CHECK(e.m == 7);
  CHECK(e.params == d.params);
  CHECK(e.x_max == d.x_max);
  CHECK(e.matrix == d.matrix);
  CHECK(e.steady_state == d.steady_state);
  CHECK(e.return_times == d.return_times);
  CHECK(e.period == d.period);
  CHECK(e.ergodic == d.ergodic);
  CHECK(e.gap_ratio == d.gap_ratio);
  REQUIRE(e.factors);
  REQUIRE(e.factors->size() == 3);
  CHECK((*e.factors)[2].role == "pure-death");
  CHECK((*e.factors)[0].matrix == (*d.factors)[0].matrix);
  CHECK(e.reversal == d.reversal);
  CHECK(e.tolerances == d.tolerances);
  CHECK(io::dump(e) == io::dump(d));
  CHECK(io::revalidate(e).empty());
}

TEST_CASE("field names follow the document schema") {
  auto j = io::to_json(sample_document());
  for (const char* key : {"family", "params", "m", "kind", "shift", "x_max", "matrix", "steady_state", "return_times",
                          "period", "ergodic", "gap_ratio", "factors", "reversal", "warnings", "tolerances"})
    CHECK(j.contains(key));
}

TEST_CASE("simulation reports with missing return times survive the round trip") {
  auto spec = FamilySpec::hahn(0.5, 0.75, 5);
  auto ch = chains::build(spec, 5);
  auto d = io::make_document(spec, ch);
  d.simulation = sim::simulate(ch, 1, 3, 11);
  const auto e = io::parse(io::dump(d));
  REQUIRE(e.simulation);
  CHECK(e.simulation->visit_counts == d.simulation->visit_counts);
  for (int j = 0; j < 5; ++j)
    CHECK(std::isnan(e.simulation->empirical_return_times[j]) == std::isnan(d.simulation->empirical_return_times[j]));
}

TEST_CASE("revalidation catches tampering") {
  auto d = sample_document();
  d.matrix[0][0] += 0.01;
  CHECK_FALSE(io::revalidate(d).empty());
  auto e = sample_document();
  e.steady_state[0] *= 2;
  CHECK_FALSE(io::revalidate(e).empty());
}

TEST_CASE("renderings") {
  auto spec = FamilySpec::hahn(0.5, 0.75, 5);
  auto d = io::make_document(spec, chains::build(spec, 5));
  auto csv = io::to_csv(d.matrix);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  auto table = io::to_table(d, 2);
  CHECK(table.find("0.46   0.54") != std::string::npos);
  CHECK(table.find("steady state: 0.11 0.31 0.35 0.19 0.04") != std::string::npos);
}
