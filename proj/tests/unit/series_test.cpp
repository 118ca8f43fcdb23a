#include <gtest/gtest.h>

#include <cmath>

#include "relkvn/evaluate.hpp"
#include "relkvn/series.hpp"

using namespace relkvn;
using namespace relkvn::series;
using algebra::op_equal;
using algebra::Representation;
using symbolic::Rational;
using symbolic::ScalarExpr;

namespace {

const ScalarExpr M0 = symbolic::param("m0");

generators::ForceField magnetic() {
  generators::ForceField f;
  f.A = {-symbolic::x(2) * symbolic::param("B0"), 0, 0};
  return f;
}

}  // namespace

TEST(Coefficients, ProductFormula) {
  EXPECT_EQ(velocity_series_coefficient(0), Rational(1));
  EXPECT_EQ(velocity_series_coefficient(1), Rational(1, 2));
  EXPECT_EQ(velocity_series_coefficient(2), Rational(3, 8));
  EXPECT_EQ(velocity_series_coefficient(3), Rational(5, 16));
  EXPECT_EQ(inverse_gamma_coefficient(1), Rational(-1, 2));
  EXPECT_EQ(inverse_gamma_coefficient(2), Rational(-1, 8));
  EXPECT_EQ(inverse_gamma_coefficient(6), Rational(-21, 1024));
}

TEST(TaylorOracle, KnownSeries) {
  const auto a = taylor_coefficients([](std::complex<double> z) { return std::exp(z); }, 6);
  double fact = 1.0;
  for (int n = 0; n <= 6; ++n) {
    if (n > 0) fact *= n;
    EXPECT_NEAR(a[n].real(), 1.0 / fact, 1e-12);
  }
  const auto t = taylor_coefficients([](std::complex<double> z) { return std::tanh(z); }, 5);
  EXPECT_NEAR(t[1].real(), 1.0, 1e-12);
  EXPECT_NEAR(t[3].real(), -1.0 / 3.0, 1e-12);
  EXPECT_NEAR(t[5].real(), 2.0 / 15.0, 1e-12);
}

TEST(AdjointSeries, CommutingTermsVanish) {
  const auto s = adjoint_series(algebra::X(1), algebra::V(2), 3);
  ASSERT_EQ(s.terms.size(), 4u);
  EXPECT_TRUE(s.terms[1].is_zero() && s.terms[2].is_zero() && s.terms[3].is_zero());
}

TEST(AdjointSeries, BoostOnVelocityLowOrders) {
  const auto gen = generators::build_free_generators(M0);
  const auto s = adjoint_series(ScalarExpr::imaginary_unit() * gen.K[2], algebra::V(3), 2);
  const ScalarExpr vz = symbolic::v(3);
  // (Vz - tanh s)/(1 - Vz tanh s) = Vz + s(Vz² - 1) + s² Vz(Vz² - 1) + ...
  EXPECT_TRUE(op_equal(s.terms[1], algebra::OperatorExpr::scalar(vz * vz - 1), 1e-12, 1).equal);
  EXPECT_TRUE(op_equal(s.terms[2], algebra::OperatorExpr::scalar(vz * (vz * vz - 1)), 1e-12, 1).equal);
}

TEST(AdjointSeries, C2OnCanonicalMomentum) {
  const auto f = magnetic();
  const auto s = adjoint_series(c2_exponent(f), algebra::P(1), 2);
  EXPECT_TRUE(op_equal(s.terms[1], algebra::OperatorExpr::scalar(f.A[0], Representation::Momentum), 1e-12, 1).equal);
  EXPECT_TRUE(s.terms[2].is_zero());
}

TEST(C1, ExponentIsAntiHermitian) {
  const auto x = c1_exponent();
  EXPECT_TRUE(op_equal(algebra::adjoint(x), -x, 1e-12, 1).equal);
}

TEST(C1, VelocityThroughOrderSix) {
  const auto r = verify_c1_on_velocity(M0, 6);
  EXPECT_TRUE(r.all_pass()) << r.table();
  EXPECT_NE(r.find("V1/order2")->note.find("3/8"), std::string::npos);
}

TEST(C1, LambdaThroughOrderSix) {
  const auto r = verify_c1_on_lambda(M0, 6);
  EXPECT_TRUE(r.all_pass()) << r.table();
}

TEST(C2, ShiftsAndTerminates) {
  const auto r = verify_c2(magnetic());
  EXPECT_TRUE(r.all_pass()) << r.table();
  generators::ForceField constant;
  constant.A = {ScalarExpr(2), ScalarExpr(-1), 0};
  EXPECT_TRUE(verify_c2(constant).all_pass());
  // A = (-x2 B0, 0, 0): λ'_x2 picks up +B0 λp1
  const auto lx = adjoint_series(c2_exponent(magnetic()), algebra::lambda_x(2, Representation::Momentum), 1);
  const auto expected = symbolic::param("B0") * algebra::lambda_p(1);
  EXPECT_TRUE(op_equal(lx.terms[1], expected, 1e-12, 1).equal);
}

TEST(CanonicalMap, CommutationTablePreserved) {
  const auto r = verify_canonical_map(M0, magnetic(), 6);
  EXPECT_TRUE(r.all_pass()) << r.table();
}

TEST(Boost, VelocityAdditionThroughOrderFour) {
  symbolic::ProbeOptions o;
  o.tol = 1e-8;
  const auto r = verify_boost_closed_forms(BoostKind::Velocity, 0.3, 4, o);
  EXPECT_TRUE(r.all_pass()) << r.table();
}

TEST(Boost, FourVectorThroughOrderFour) {
  symbolic::ProbeOptions o;
  o.tol = 1e-8;
  const auto r = verify_boost_closed_forms(BoostKind::EnergyMomentum, 0.3, 4, o);
  EXPECT_TRUE(r.all_pass()) << r.table();
}

TEST(Boost, PositionThroughOrderTwo) {
  symbolic::ProbeOptions o;
  o.tol = 1e-8;
  const auto r = verify_boost_closed_forms(BoostKind::Position, 0.3, 4, o);
  EXPECT_TRUE(r.all_pass()) << r.table();
  EXPECT_TRUE(r.find("X3/order3")->informational);
}

TEST(Boost, PositionLowOrderCommutators) {
  const auto gen = generators::build_free_generators(M0);
  const ScalarExpr z = symbolic::x(3), vz = symbolic::v(3), i = ScalarExpr::imaginary_unit();
  const auto k = algebra::commutator(gen.K[2], algebra::X(3));
  EXPECT_TRUE(op_equal(k, algebra::OperatorExpr::scalar(-i * z * vz), 1e-12, 1).equal);
  const auto kk = algebra::commutator(gen.K[2], k);
  EXPECT_TRUE(op_equal(kk, algebra::OperatorExpr::scalar(z - 2 * z * vz * vz), 1e-12, 1).equal);
}

TEST(Boost, SeriesConvergesMonotonically) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    symbolic::ProbeOptions o;
    o.seed = seed;
    o.trials = 50;
    const auto err = boost_velocity_convergence(0.5, 8, o);
    for (std::size_t n = 1; n < err.size(); ++n) EXPECT_LT(err[n], err[n - 1]) << "seed " << seed << " N " << n;
  }
}
