/**
 * @file test_chains.cpp
 * @brief Stochastic matrices and their analyses, checked against direct
 * linear algebra (linear-solve steady state, matrix powers).
 */

#include <catch_amalgamated.hpp>

#include <cmath>

#include "mopchains/chains.hpp"

using namespace mopchains;
using Catch::Approx;

namespace {

double round2(double v) { return std::round(100 * v) / 100; }

std::vector<std::pair<FamilySpec, ChainKind>> sample_chains() {
  return {{FamilySpec::hahn(0.5, 0.75, 9), ChainKind::Scalar},
          {FamilySpec::jacobi01(0.5, 0.75), ChainKind::Scalar},
          {FamilySpec::meixner(1.3, 0.4), ChainKind::Scalar},
          {FamilySpec::charlier(1.7), ChainKind::Scalar},
          {FamilySpec::hermite(3.0), ChainKind::Scalar},
          {FamilySpec::multiple_hahn(0.4, 0.6, 0.75, 10), ChainKind::TypeII},
          {FamilySpec::multiple_hahn(0.4, 0.6, 0.75, 10), ChainKind::TypeI},
          {FamilySpec::jacobi_pineiro(0.6, 0.4, 0.75), ChainKind::TypeII},
          {FamilySpec::multiple_laguerre1(0.4, 0.9), ChainKind::TypeI},
          {FamilySpec::multiple_meixner2(0.7, 1.3, 0.45), ChainKind::TypeII}};
}

}  // namespace

TEST_CASE("printed matrix entries") {
  auto h = chains::build(FamilySpec::hahn(0.5, 0.75, 5), 5);
  const std::vector<double> row1 = {0.46, 0.54, 0, 0, 0};
  for (int j = 0; j < 5; ++j) CHECK(round2(h.P(0, j)) == Approx(row1[j]));

  auto mh = chains::build(FamilySpec::multiple_hahn(0.4, 0.6, 0.75, 10), 7, ChainKind::TypeII);
  CHECK(round2(mh.P(2, 0)) == Approx(0.02));
  // The printed (1,1) entry reads 0.46; the computed value is 0.4472 (see the decisions ledger).
  CHECK(mh.P(0, 0) == Approx(0.4472).margin(5e-5));

  auto jp = chains::build(FamilySpec::jacobi_pineiro(0.4, 0.6, 0.75), 7, ChainKind::TypeI);
  const std::vector<double> jrow = {0.47, 0.39, 0.14, 0, 0, 0, 0};
  for (int j = 0; j < 7; ++j) CHECK(round2(jp.P(0, j)) == Approx(jrow[j]));
}

TEST_CASE("kind must match the family") {
  CHECK_THROWS_AS(chains::build(FamilySpec::hahn(0.5, 0.75, 5), 5, ChainKind::TypeI), Error);
  CHECK_THROWS_AS(chains::build(FamilySpec::jacobi_pineiro(0.4, 0.6, 0.75), 5, ChainKind::Scalar), Error);
  CHECK(chain_kind_from_string("II") == ChainKind::TypeII);
  CHECK_THROWS_AS(chain_kind_from_string("III"), Error);
}

TEST_CASE("a negative diagonal is rejected") {
  CHECK_THROWS_AS(chains::build(FamilySpec::hermite(-1.0), 4), Error);
}

TEST_CASE("rows sum to one and the steady state is fixed") {
  for (const auto& [s, k] : sample_chains())
    for (int m : {2, 5, 8}) {
      auto ch = chains::build(s, m, k);
      CHECK((ch.P.rowwise().sum().array() - 1).abs().maxCoeff() < 1e-10);
      CHECK(ch.P.minCoeff() >= 0);
      auto pi = chains::steady_state(ch);
      auto lin = chains::steady_state_linear(ch.P);
      for (int j = 0; j < m; ++j) CHECK(pi[j] == Approx(lin[j]).epsilon(1e-9).margin(1e-15));
      auto t = chains::return_times(ch);
      for (int j = 0; j < m; ++j) CHECK(t[j] * pi[j] == Approx(1.0));
    }
}

TEST_CASE("printed steady states and return times") {
  auto h = chains::build(FamilySpec::hahn(0.5, 0.75, 5), 5);
  const std::vector<double> pi = {0.11, 0.31, 0.35, 0.19, 0.04};
  auto s = chains::steady_state(h);
  for (int j = 0; j < 5; ++j) CHECK(round2(s[j]) == Approx(pi[j]));

  auto jp = chains::build(FamilySpec::jacobi_pineiro(0.4, 0.6, 0.75), 7);
  const std::vector<double> pj = {0.03, 0.10, 0.21, 0.24, 0.23, 0.14, 0.05};
  auto sj = chains::steady_state(jp);
  for (int j = 0; j < 7; ++j) CHECK(round2(sj[j]) == Approx(pj[j]));

  auto mh = chains::build(FamilySpec::multiple_hahn(0.4, 0.6, 0.75, 10), 7);
  const std::vector<double> tm = {23.10, 7.74, 4.19, 3.95, 4.92, 9.67, 34.73};
  auto t = chains::return_times(mh);
  for (int j = 0; j < 7; ++j) CHECK(t[j] == Approx(tm[j]).margin(0.01));
}

TEST_CASE("single-state chain") {
  auto ch = chains::build(FamilySpec::laguerre(0.5), 1);
  CHECK(ch.P(0, 0) == Approx(1.0));
  CHECK(chains::steady_state(ch) == std::vector<double>{1.0});
  CHECK(chains::return_times(ch) == std::vector<double>{1.0});
  CHECK(chains::reversal(ch).P(0, 0) == Approx(1.0));
  CHECK(chains::period(ch) == 1);
}

TEST_CASE("periods") {
  auto he = chains::build(FamilySpec::hermite(), 5);
  CHECK(chains::period(he) == 2);
  CHECK_FALSE(chains::ergodic(he));
  auto ha = chains::build(FamilySpec::hahn(0.5, 0.75, 5), 5);
  CHECK(chains::period(ha) == 1);
  CHECK(chains::ergodic(ha));

  // Hypothetical multiple bands with b = c = 0 and d > 0.
  RecurrenceBands r;
  r.m = 6;
  r.is_multiple = true;
  r.b.assign(6, 0.0);
  r.c.assign(5, 0.0);
  r.d = {1.0, 2.0, 1.5, 0.7};
  CHECK(chains::coefficient_period(r) == 3);
  Matrix M = banded_matrix(r);
  Matrix support = (M.array() != 0).cast<double>();
  CHECK(chains::graph_period(support) == 3);
}

TEST_CASE("detailed balance for scalar chains, cross balance for multiple chains") {
  auto jc = chains::build(FamilySpec::jacobi01(0.5, 0.75), 5);
  auto q = chains::reversal(jc);
  CHECK((q.P - jc.P).cwiseAbs().maxCoeff() < 1e-12);

  for (const auto& s : {FamilySpec::multiple_hahn(0.4, 0.6, 0.75, 10), FamilySpec::jacobi_pineiro(0.4, 0.6, 0.75)}) {
    auto p2 = chains::build(s, 7, ChainKind::TypeII);
    auto p1 = chains::build(s, 7, ChainKind::TypeI);
    auto rev = chains::reversal(p2);
    CHECK(rev.kind == ChainKind::TypeI);
    CHECK((rev.P - p1.P).cwiseAbs().maxCoeff() < 1e-10);
    auto pi2 = chains::steady_state(p2), pi1 = chains::steady_state(p1);
    for (int j = 0; j < 7; ++j) CHECK(pi1[j] == Approx(pi2[j]).epsilon(1e-10));
  }
}

TEST_CASE("iterated probabilities agree with matrix powers") {
  for (const auto& [s, k] : sample_chains()) {
    auto ch = chains::build(s, 6, k);
    Matrix pw = Matrix::Identity(6, 6);
    for (int r = 0; r <= 20; ++r) {
      CHECK((chains::iterated(ch, r) - pw).cwiseAbs().maxCoeff() < 1e-8);
      pw = pw * ch.P;
    }
  }
  auto he = chains::build(FamilySpec::hermite(), 4);
  CHECK((chains::iterated(he, 1) - he.P).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(chains::iterated(he, -1), Error);
}

TEST_CASE("gap ratio and shift equivariance") {
  auto z = spectral::zeros(recurrence_bands(FamilySpec::hermite(), 6));
  for (double sh : {3.0, 5.0}) {
    auto ch = chains::build(FamilySpec::hermite(sh), 6);
    CHECK(chains::gap_ratio(ch) == Approx((z[4] + sh) / (z[5] + sh)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(chains::gap_ratio(chains::build(FamilySpec::laguerre(0.5), 1)), Error);
}
