#include "apgarch/error.hpp"
#include "apgarch/params.hpp"
#include "properties.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

using namespace apgarch;
using testing::bivariate_spec;

namespace {

bool contains(const std::vector<std::string>& v, const std::string& needle) {
  return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("param_count") {
  CHECK(param_count({2, 0, 1}, EstimationMode::Kind::DeltaEstimated) == 13);
  CHECK(param_count({2, 0, 1}, EstimationMode::Kind::DeltaKnown) == 11);
  CHECK(param_count({1, 1, 1}, EstimationMode::Kind::DeltaKnown) == 4);
  CHECK(param_count({3, 2, 1}, EstimationMode::Kind::DeltaKnown) == 3 + 9 * 4 + 3);
}

TEST_CASE("pack of the bivariate design") {
  const ParamVector v = pack(bivariate_spec(), EstimationMode::known(Eigen::Vector2d(2, 2)));
  REQUIRE(v.values.size() == 11);
  Eigen::VectorXd expected(11);
  expected << 1, 1, 0.25, 0.05, 0.05, 0.25, 0.5, 0.5, 0.5, 0.5, 0.5;
  CHECK(v.values == expected);
  CHECK(v.values[v.values.size() - 1] == 0.5);
}

TEST_CASE("pack is column-major and places delta before rho") {
  ModelSpec s = ModelSpec::zeros({2, 1, 1});
  s.a_plus[0] << 1, 2, 3, 4;  // row-major input: (1,1)=1 (1,2)=2 (2,1)=3 (2,2)=4
  s.b[0] << 5, 6, 7, 8;
  s.delta << 1.5, 2.5;
  s.r(0, 1) = s.r(1, 0) = -0.3;
  const ParamVector v = pack(s, EstimationMode::estimated());
  const ParamLayout layout(s.orders, EstimationMode::Kind::DeltaEstimated);
  CHECK(v.values.segment(layout.a_plus(1), 4) == Eigen::Vector4d(1, 3, 2, 4));
  CHECK(v.values.segment(layout.b(1), 4) == Eigen::Vector4d(5, 7, 6, 8));
  CHECK(v.values.segment(layout.delta(), 2) == Eigen::Vector2d(1.5, 2.5));
  CHECK(v.values[layout.rho()] == -0.3);
  CHECK(layout.rho() == layout.size() - 1);
  const auto names = layout.names();
  CHECK(names[layout.a_plus(1) + 1] == "a_plus_1(2,1)");
  CHECK(names[layout.rho()] == "rho_21");
}

TEST_CASE("rho layout for m = 3 is the strict lower triangle by columns") {
  CHECK(rho_index(3, 1, 0) == 0);
  CHECK(rho_index(3, 2, 0) == 1);
  CHECK(rho_index(3, 2, 1) == 2);
}

TEST_CASE("zero univariate spec packs to omega followed by zeros") {
  ModelSpec s = ModelSpec::zeros({1, 2, 2});
  s.omega << 0.7;
  const ParamVector v = pack(s, EstimationMode::known(Eigen::VectorXd::Constant(1, 2.0)));
  REQUIRE(v.values.size() == param_count(s.orders, EstimationMode::Kind::DeltaKnown));
  CHECK(v.values[0] == 0.7);
  CHECK(v.values.tail(v.values.size() - 1).isZero(0.0));
}

TEST_CASE("pack length and roundtrip over an order sweep") {
  const auto r = testing::roundtrip_property();
  CHECK_MESSAGE(r.ok, r.detail);
}

TEST_CASE("known mode carries the fixed delta into unpack") {
  const ParamVector v = pack(bivariate_spec(), EstimationMode::known(Eigen::Vector2d(1.25, 0.75)));
  CHECK(unpack(v).delta == Eigen::Vector2d(1.25, 0.75));
}

TEST_CASE("single zero correlation unpacks to the identity") {
  ModelSpec s = bivariate_spec();
  ParamVector v = pack(s, EstimationMode::known(s.delta));
  v.values[v.values.size() - 1] = 0.0;
  CHECK(unpack(v).r == Eigen::Matrix2d::Identity());
}

TEST_CASE("non positive definite correlation is reported") {
  const double a = 0.9, b = 0.9, c = -0.9;  // r21, r31, r32
  // Characteristic polynomial det(lambda I - R) for a unit-diagonal 3x3:
  // lambda^3 - 3 lambda^2 + (3 - a^2 - b^2 - c^2) lambda - det R.
  const double det = 1.0 + 2.0 * a * b * c - a * a - b * b - c * c;
  auto charpoly = [&](double x) { return x * x * x - 3 * x * x + (3 - a * a - b * b - c * c) * x - det; };
  // Sign change on (-10, 0) means a negative eigenvalue.
  CHECK(charpoly(-10.0) < 0.0);
  CHECK(charpoly(0.0) > 0.0);

  ModelSpec s = ModelSpec::zeros({3, 0, 1});
  ParamVector v = pack(s, EstimationMode::known(s.delta));
  const int rho = ParamLayout(s.orders, EstimationMode::Kind::DeltaKnown).rho();
  v.values[rho + rho_index(3, 1, 0)] = a;
  v.values[rho + rho_index(3, 2, 0)] = b;
  v.values[rho + rho_index(3, 2, 1)] = c;
  try {
    unpack(v);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonPositiveDefiniteCorrelation);
    CHECK(e.exit_code() == 3);
  }
  CHECK_NOTHROW(unpack_unchecked(v));
}

TEST_CASE("pack rejects a fixed delta of the wrong length") {
  CHECK_THROWS_AS(pack(bivariate_spec(), EstimationMode::known(Eigen::VectorXd::Ones(3))), Error);
  ParamVector v = pack(bivariate_spec(), EstimationMode::known(Eigen::Vector2d(2, 2)));
  v.values.conservativeResize(5);
  try {
    unpack(v);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LengthMismatch);
  }
}

TEST_CASE("validate") {
  CHECK(validate(bivariate_spec()).empty());

  ModelSpec s = bivariate_spec();
  s.omega << 0.0, 1.0;
  CHECK(contains(validate(s), "omega[0] not strictly positive"));

  s = bivariate_spec();
  s.r(0, 1) = 0.2;
  CHECK(contains(validate(s), "not symmetric"));

  s.r(0, 1) = s.r(1, 0) = 1.2;
  const auto v = validate(s);
  CHECK(contains(v, "outside (-1, 1)"));
  CHECK(contains(v, "not positive definite"));
}

TEST_CASE("validate accepts generated specs and rejects single-field violations") {
  GaussianGenerator g(5);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int rep = 0; rep < 50; ++rep) {
    const ModelOrders o{1 + rep % 3, rep % 2, 1 + rep % 2};
    const ModelSpec s = testing::random_spec(o, g);
    REQUIRE(validate(s).empty());

    std::vector<ModelSpec> broken(8, s);
    broken[0].omega[0] = -0.1;
    broken[1].delta[0] = 0.0;
    broken[2].a_plus[0](0, 0) = -1e-3;
    broken[3].a_minus[0](0, 0) = nan;
    broken[4].r(0, 0) = 1.1;
    broken[5].omega[0] = std::numeric_limits<double>::infinity();
    broken[6].a_plus.pop_back();
    broken[7].delta.resize(o.m + 1);
    broken[7].delta.setConstant(2.0);
    for (std::size_t k = 0; k < broken.size(); ++k) CHECK_MESSAGE(!validate(broken[k]).empty(), "violation " << k);
    if (o.p > 0) {
      ModelSpec b = s;
      b.b[0](0, 0) = -0.5;
      CHECK(!validate(b).empty());
    }
    if (o.m > 1) {
      ModelSpec b = s;
      b.r(1, 0) += 0.01;
      CHECK(!validate(b).empty());
    }
  }
}
