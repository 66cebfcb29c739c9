#include "apgarch/error.hpp"
#include "apgarch/simulate.hpp"
#include "apgarch/volatility.hpp"
#include "properties.hpp"

#include <doctest.h>

#include <cmath>

using namespace apgarch;
using testing::bivariate_spec;

TEST_CASE("power split examples") {
  PowerSplit s = power_split(Eigen::Vector2d(2, -3), Eigen::Vector2d(2, 2));
  CHECK(s.plus == Eigen::Vector2d(4, 0));
  CHECK(s.minus == Eigen::Vector2d(0, 9));

  s = power_split(Eigen::Vector2d(0, 0), Eigen::Vector2d(0.7, 3.1));
  CHECK(s.plus.isZero(0.0));
  CHECK(s.minus.isZero(0.0));

  s = power_split(Eigen::Vector2d(-1.5, 0.5), Eigen::Vector2d(1, 1));
  CHECK(s.plus == Eigen::Vector2d(0, 0.5));
  CHECK(s.minus == Eigen::Vector2d(1.5, 0));
}

TEST_CASE("power split identities on random inputs") {
  const auto r = testing::power_split_property();
  CHECK_MESSAGE(r.ok, r.detail);
}

TEST_CASE("constant volatility without dynamics") {
  ModelSpec s = ModelSpec::zeros({2, 0, 0});
  s.omega << 1, 4;
  Eigen::MatrixXd returns(5, 2);
  returns << 1, -2, 0.5, 3, -7, 0, 2, 2, 0.1, -0.1;
  const VolatilityPath path = recursion(s, returns);
  for (int t = 0; t < 5; ++t) {
    CHECK(path.hpow.row(t) == Eigen::RowVector2d(1, 4));
    CHECK(path.h.row(t) == Eigen::RowVector2d(1, 4));
  }
}

TEST_CASE("one-step hand computation") {
  ModelSpec s = ModelSpec::zeros({1, 0, 1});
  s.a_plus[0] << 0.3;
  s.a_minus[0] << 0.3;
  Eigen::MatrixXd returns(2, 1);
  returns << 2, -1;
  const VolatilityPath path = recursion(s, returns);
  CHECK(path.hpow(0, 0) == 1.0);
  CHECK(path.hpow(1, 0) == doctest::Approx(2.2).epsilon(1e-15));
}

TEST_CASE("GARCH(1,1) recursion against a scalar loop with asymmetric powers") {
  const ModelSpec s = testing::garch11_spec(0.1, 0.05, 0.12, 0.8, 1.3);
  GaussianGenerator g(9);
  Eigen::MatrixXd returns(200, 1);
  for (int t = 0; t < 200; ++t) returns(t, 0) = g.normal();
  const VolatilityPath path = recursion(s, returns);
  double hp = 0.1;  // ZeroOmega: hpow_0 = omega, eps_0 = 0
  double prev = 0.0;
  for (int t = 0; t < 200; ++t) {
    hp = 0.1 + 0.05 * std::pow(std::max(prev, 0.0), 1.3) + 0.12 * std::pow(std::max(-prev, 0.0), 1.3) + 0.8 * hp;
    CHECK(path.hpow(t, 0) == doctest::Approx(hp).epsilon(1e-13));
    CHECK(path.h(t, 0) == doctest::Approx(std::pow(hp, 2.0 / 1.3)).epsilon(1e-13));
    prev = returns(t, 0);
  }
}

TEST_CASE("simulator round trip reproduces the volatility path exactly") {
  for (const ModelSpec& s : {bivariate_spec(), testing::garch11_spec(0.05, 0.04, 0.1, 0.85, 1.6)}) {
    SimulationOptions so;
    so.n = 3000;
    so.burn_in = 500;
    so.seed = 21;
    const SimulationOutput sim = simulate(s, so);
    const VolatilityPath path = recursion(s, sim.returns, sim.volatility.presample);
    CHECK(path.hpow == sim.volatility.hpow);
    CHECK(path.h == sim.volatility.h);
  }
}

TEST_CASE("positivity over randomized inputs") {
  const auto r = testing::positivity_property();
  CHECK_MESSAGE(r.ok, r.detail);
}

TEST_CASE("scaling equivariance") {
  const auto r = testing::scaling_property();
  CHECK_MESSAGE(r.ok, r.detail);
}

TEST_CASE("presample choice is forgotten") {
  const ModelSpec s = bivariate_spec();
  SimulationOptions so;
  so.n = 600;
  so.seed = 4;
  const SimulationOutput sim = simulate(s, so);
  const VolatilityPath a = recursion(s, sim.returns, InitPolicy::zero_omega());
  const VolatilityPath b = recursion(s, sim.returns, InitPolicy::sample_mean());
  CHECK((a.hpow.row(so.n - 1) - b.hpow.row(so.n - 1)).cwiseAbs().maxCoeff() < 1e-8);

  const ModelSpec g = testing::garch11_spec(0.05, 0.05, 0.1, 0.85);
  const SimulationOutput sg = simulate(g, so);
  const VolatilityPath c = recursion(g, sg.returns, InitPolicy::zero_omega());
  const VolatilityPath d = recursion(g, sg.returns, InitPolicy::sample_mean());
  const double first = std::abs(c.hpow(0, 0) - d.hpow(0, 0));
  const double last = std::abs(c.hpow(so.n - 1, 0) - d.hpow(so.n - 1, 0));
  CHECK(first > 0.0);
  CHECK(last < 1e-8);
  // Geometric decay at rate beta.
  CHECK(std::abs(c.hpow(50, 0) - d.hpow(50, 0)) <= first * std::pow(0.85, 50) * (1 + 1e-6));
}

TEST_CASE("explosive path is reported with its index") {
  ModelSpec s = ModelSpec::zeros({1, 1, 1});
  s.b[0] << 1e5;
  Eigen::MatrixXd returns = Eigen::MatrixXd::Ones(200, 1);
  try {
    recursion(s, returns);
    FAIL("expected ExplosivePath");
  } catch (const ExplosivePathError& e) {
    CHECK(e.code() == ErrorCode::ExplosivePath);
    CHECK(e.index() > 0);
    CHECK(e.index() < 200);
  }
}

TEST_CASE("ARCH(infinity) weights") {
  ModelSpec p0 = bivariate_spec();
  const ArchInfinity w = arch_infinity_weights(p0, 5);
  CHECK(w.psi_plus[0].isZero(0.0));
  CHECK(w.psi_plus[1] == p0.a_plus[0]);
  CHECK(w.psi_minus[1] == p0.a_minus[0]);
  for (int k = 2; k <= 5; ++k) CHECK(w.psi_plus[k].isZero(0.0));
  CHECK(w.constant == p0.omega);

  const ModelSpec g = testing::garch11_spec(1.0, 0.2, 0.1, 0.5);
  const ArchInfinity wg = arch_infinity_weights(g, 20);
  for (int k = 1; k <= 20; ++k) {
    CHECK(wg.psi_plus[k](0, 0) == doctest::Approx(0.2 * std::pow(0.5, k - 1)).epsilon(1e-14));
    CHECK(wg.psi_minus[k](0, 0) == doctest::Approx(0.1 * std::pow(0.5, k - 1)).epsilon(1e-14));
  }
  CHECK(wg.constant[0] == doctest::Approx(2.0));

  ModelSpec bad = testing::garch11_spec(1.0, 0.2, 0.1, 1.0);
  CHECK_THROWS_AS(arch_infinity_weights(bad, 3), Error);
}

TEST_CASE("ARCH(infinity) expansion equals the recursion for p = 0") {
  const auto r = testing::arch_infinity_property();
  CHECK_MESSAGE(r.ok, r.detail);
}

TEST_CASE("identifiability report") {
  const IdentifiabilityReport p0 = check_identifiability(bivariate_spec());
  CHECK(p0.automatic);
  CHECK(p0.full_rank);
  CHECK(p0.left_coprime_skipped);

  const IdentifiabilityReport one = check_identifiability(testing::garch11_spec(1.0, 0.2, 0.3, 0.5));
  CHECK(one.m_matrix.isApprox(Eigen::RowVector3d(0.2, 0.3, 0.5)));
  CHECK(one.rank_m == 1);
  CHECK(one.full_rank);

  // Column 2 of A+ and A- zero, B_1 = 0, column 1 entries proportional.
  ModelSpec s = ModelSpec::zeros({2, 1, 1});
  s.a_plus[0] << 0.2, 0.0, 0.1, 0.0;
  s.a_minus[0] << 0.4, 0.0, 0.2, 0.0;
  const IdentifiabilityReport r = check_identifiability(s);
  // Rank oracle: the 2x2 Gram matrix M M' has zero determinant and positive trace.
  const Eigen::Matrix2d gram = r.m_matrix * r.m_matrix.transpose();
  CHECK(std::abs(gram.determinant()) < 1e-14);
  CHECK(gram.trace() > 0.0);
  CHECK(r.rank_m == 1);
  CHECK_FALSE(r.full_rank);
  CHECK(r.nonzero_sum);
}
