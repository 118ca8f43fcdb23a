#include <gtest/gtest.h>

#include "relkvn/error.hpp"
#include "relkvn/evaluate.hpp"
#include "relkvn/generators.hpp"

using namespace relkvn;
using namespace relkvn::generators;
using algebra::commutator;
using algebra::op_equal;
using symbolic::ScalarExpr;

namespace {

const ScalarExpr I = ScalarExpr::imaginary_unit();
const ScalarExpr M0 = symbolic::param("m0");
constexpr Representation kMom = Representation::Momentum;

OperatorExpr scalar(const ScalarExpr& f, Representation rep = Representation::Velocity) {
  return OperatorExpr::scalar(f, rep);
}

bool same(const OperatorExpr& a, const OperatorExpr& b) { return op_equal(a, b, 1e-9, 17).equal; }

ForceField magnetic() {
  ForceField f;
  f.A = {-symbolic::x(2) * symbolic::param("B0"), 0, 0};
  return f;
}

ForceField electric() {
  ForceField f;
  f.phi = symbolic::x(1);
  return f;
}

}  // namespace

TEST(FreeGenerators, SelectedBrackets) {
  const GeneratorSet g = build_free_generators(M0);
  EXPECT_TRUE(same(commutator(g.K[0], g.K[1]), -I * g.J[2]));
  for (int i = 0; i < 3; ++i) {
    EXPECT_TRUE(same(commutator(g.K[i], g.L), I * g.lambda_r[i]));
    EXPECT_TRUE(same(I * commutator(g.L, g.X[i]), g.W[i]));
  }
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) {
      const ScalarExpr d(j == k ? 1 : 0);
      EXPECT_TRUE(same(commutator(g.K[j], g.W[k]), scalar(I * (d - symbolic::v(j + 1) * symbolic::v(k + 1)))));
    }
}

TEST(FreeGenerators, VectorOperatorRelations) {
  const GeneratorSet g = build_free_generators(M0);
  const int eps[3][3][3] = {{{0, 0, 0}, {0, 0, 1}, {0, -1, 0}}, {{0, 0, -1}, {0, 0, 0}, {1, 0, 0}},
                            {{0, 1, 0}, {-1, 0, 0}, {0, 0, 0}}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      OperatorExpr x, v, lv;
      for (int k = 0; k < 3; ++k) {
        x += ScalarExpr(eps[i][j][k]) * I * g.X[k];
        v += ScalarExpr(eps[i][j][k]) * I * g.W[k];
        lv += ScalarExpr(eps[i][j][k]) * I * g.lambda_w[k];
      }
      EXPECT_TRUE(same(commutator(g.J[i], g.X[j]), x));
      EXPECT_TRUE(same(commutator(g.J[i], g.W[j]), v));
      EXPECT_TRUE(same(commutator(g.J[i], g.lambda_w[j]), lv));
    }
}

TEST(FreeGenerators, AllHermitian) {
  for (const auto& [name, op] : build_free_generators(M0, symbolic::time_symbol()).generators())
    EXPECT_TRUE(algebra::is_hermitian(op, 1e-9, 3)) << name;
}

TEST(Closure, FreeVelocityAtTwoTimes) {
  for (const ScalarExpr t : {ScalarExpr(0), ScalarExpr::constant(1.7)}) {
    const auto r = verify_poincare_closure(build_free_generators(M0, t));
    EXPECT_EQ(r.relations.size(), 45u);
    EXPECT_TRUE(r.all_pass()) << r.table();
  }
}

TEST(Closure, WithoutTimeTermStillCloses) {
  GeneratorSet g = build_free_generators(M0, symbolic::time_symbol());
  const auto r = verify_poincare_closure(g);
  EXPECT_TRUE(r.all_pass()) << r.table();
}

TEST(Closure, FreeMomentum) {
  const auto r = verify_poincare_closure(build_momentum_generators(M0, ScalarExpr::constant(1.7)));
  EXPECT_EQ(r.relations.size(), 45u);
  EXPECT_TRUE(r.all_pass()) << r.table();
}

TEST(Closure, MutatedKFailsExactlyKRelations) {
  const auto r = verify_poincare_closure(mutate(build_free_generators(M0), "K"));
  int failed = 0;
  for (const auto& rel : r.relations) {
    const bool involves_k = rel.id.find('K') != std::string::npos;
    EXPECT_EQ(rel.pass, !involves_k) << rel.id;
    failed += rel.pass ? 0 : 1;
  }
  EXPECT_EQ(failed, 24);
}

TEST(Closure, MutatedLFailsRotationInvariance) {
  const auto r = verify_poincare_closure(mutate(build_free_generators(M0), "L"));
  EXPECT_FALSE(r.find("[J3,L]")->pass);
  EXPECT_FALSE(r.find("[J2,L]")->pass);
  EXPECT_THROW(mutate(build_free_generators(M0), "Q"), ConfigError);
}

TEST(Closure, InteractingGeometricPart) {
  const auto r = verify_poincare_closure(build_interacting_generators(M0, magnetic()), {},
                                         ClosureScope::WithoutLiouvillian);
  EXPECT_EQ(r.asserted(), 27);
  EXPECT_TRUE(r.all_pass()) << r.table();
}

TEST(Interacting, ReducesToFreeAndHermitian) {
  EXPECT_TRUE(same(build_interacting_liouvillian(M0, {}), build_free_liouvillian()));
  for (const ForceField& f : {ForceField::constant_force(symbolic::param("F")), electric(), magnetic()}) {
    const OperatorExpr L = build_interacting_liouvillian(M0, f);
    EXPECT_TRUE(algebra::is_hermitian(L, 1e-9, 4));
    for (int i = 0; i < 3; ++i)
      EXPECT_TRUE(same(I * commutator(L, algebra::X(i + 1)), algebra::V(i + 1)));
  }
}

TEST(Interacting, OneDimensionalConstantForce) {
  const ScalarExpr F = symbolic::param("F");
  const ScalarExpr v1 = symbolic::v(1);
  const OperatorExpr L = build_interacting_liouvillian(M0, ForceField::constant_force(F), 1);
  const ScalarExpr c = F / M0 * symbolic::pow(1 - v1 * v1, symbolic::Rational(3, 2));
  EXPECT_TRUE(same(L, algebra::V(1) * algebra::lambda_x(1) + algebra::symmetrize(scalar(c), algebra::lambda_v(1))));
  EXPECT_TRUE(same(I * commutator(L, algebra::V(1)), scalar(c)));
}

TEST(ForceEquation, ThreeFields) {
  EXPECT_TRUE(verify_force_equation(M0, ForceField::constant_force(symbolic::param("F"))).all_pass());
  const auto e = verify_force_equation(M0, electric());
  EXPECT_TRUE(e.all_pass()) << e.table();
  EXPECT_NE(e.relations[0].rhs.find("-1"), std::string::npos);
  const auto b = verify_force_equation(M0, magnetic());
  EXPECT_TRUE(b.all_pass()) << b.table();
  const Vec3 B = magnetic().B();
  EXPECT_TRUE(B[0].is_zero() && B[1].is_zero());
  EXPECT_TRUE(B[2].same_as(symbolic::param("B0")));
}

TEST(Lagrangian, StructureAndMomentum) {
  const auto s = build_lagrangian_structure(M0, {});
  for (int i = 0; i < 3; ++i)
    EXPECT_TRUE(same(s.P[i], scalar(M0 * gamma() * symbolic::v(i + 1))));
  symbolic::ProbeOptions o;
  o.fixed = {{"v1", 0.0}, {"v2", 0.0}, {"v3", 0.0}};
  EXPECT_TRUE(symbolic::equal_numeric(s.kinetic_coenergy, 0, o).equal);
  const auto report = verify_canonical_momentum(M0, magnetic());
  EXPECT_TRUE(report.all_pass()) << report.table();
  EXPECT_FALSE(report.find("[P1,Lv1]/printed")->pass);
}

TEST(EulerLagrange, MatchedPairsVanish) {
  const auto free = apply_euler_lagrange(build_lagrangian_structure(M0, {}).lagrangian, build_free_liouvillian());
  for (const auto& c : free) EXPECT_TRUE(same(c, OperatorExpr()));
  for (const ForceField& f : {electric(), magnetic()}) {
    const auto phi = apply_euler_lagrange(build_lagrangian_structure(M0, f).lagrangian,
                                          build_interacting_liouvillian(M0, f));
    for (const auto& c : phi) EXPECT_TRUE(same(c, OperatorExpr()));
  }
}

TEST(EulerLagrange, MismatchedPairLeavesForce) {
  const ForceField f = magnetic();
  const auto phi = apply_euler_lagrange(build_lagrangian_structure(M0, {}).lagrangian,
                                        build_interacting_liouvillian(M0, f));
  const Vec3 F = f.force({symbolic::v(1), symbolic::v(2), symbolic::v(3)});
  bool any_nonzero = false;
  for (int a = 0; a < 3; ++a) {
    EXPECT_TRUE(same(phi[a], scalar(F[a])));
    any_nonzero = any_nonzero || !op_equal(phi[a], OperatorExpr(), 1e-9, 1).equal;
  }
  EXPECT_TRUE(any_nonzero);
}

TEST(Momentum, BoostOnMomentumGivesEnergy) {
  const GeneratorSet g = build_momentum_generators(M0);
  const ScalarExpr h = momentum_energy(M0, {});
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      EXPECT_TRUE(same(commutator(g.K[i], g.W[j]), scalar(i == j ? I * h : ScalarExpr(0), kMom)));
}

TEST(Momentum, ElectricLiouvillian) {
  const OperatorExpr L = build_momentum_generators(M0, electric()).L;
  const ScalarExpr h = momentum_energy(M0, {});
  OperatorExpr expected(kMom);
  for (int i = 0; i < 3; ++i) expected += scalar(symbolic::p(i + 1) / h, kMom) * algebra::lambda_x(i + 1, kMom);
  expected -= algebra::lambda_p(1);
  EXPECT_TRUE(same(L, expected));
}

TEST(Momentum, GeneralFormReducesWithoutVectorPotential) {
  ForceField f = electric();
  f.phi = f.phi + symbolic::x(2) * symbolic::x(3);
  EXPECT_TRUE(same(momentum_liouvillian_printed(M0, f), momentum_liouvillian_electric(M0, f)));
  EXPECT_TRUE(same(momentum_liouvillian_transported(M0, f), momentum_liouvillian_electric(M0, f)));
}

TEST(Momentum, TransportedFormGivesHamiltonEquations) {
  ForceField f = magnetic();
  f.phi = symbolic::x(1) * symbolic::x(3);
  const OperatorExpr L = momentum_liouvillian_transported(M0, f);
  EXPECT_TRUE(algebra::is_hermitian(L, 1e-9, 2));
  const ScalarExpr h = momentum_energy(M0, f) + f.phi;
  for (int k = 1; k <= 3; ++k) {
    EXPECT_TRUE(same(I * commutator(L, algebra::X(k, kMom)), scalar(symbolic::diff(h, "p" + std::to_string(k)), kMom)));
    EXPECT_TRUE(same(I * commutator(L, algebra::P(k)), scalar(-symbolic::diff(h, "x" + std::to_string(k)), kMom)));
  }
}

TEST(Poisson, FreeLiouvillian) {
  const auto h = poisson_correspondence(build_momentum_generators(M0).L);
  ASSERT_TRUE(h.has_value());
  EXPECT_TRUE(symbolic::equal_numeric(*h, momentum_energy(M0, {}) - M0, 30, 1e-9, 1).equal);
}

TEST(Poisson, AngularMomentum) {
  const auto h = poisson_correspondence(build_momentum_generators(M0).J[2]);
  ASSERT_TRUE(h.has_value());
  const ScalarExpr expected = symbolic::x(1) * symbolic::p(2) - symbolic::x(2) * symbolic::p(1);
  EXPECT_TRUE(symbolic::equal_numeric(*h, expected, 30, 1e-9, 1).equal);
}

TEST(Poisson, ElectricLiouvillianGivesEnergyPlusPotential) {
  ForceField f = electric();
  const auto h = poisson_correspondence(build_momentum_generators(M0, f).L);
  ASSERT_TRUE(h.has_value());
  EXPECT_TRUE(symbolic::equal_numeric(*h, momentum_energy(M0, {}) - M0 + f.phi, 30, 1e-9, 1).equal);
}

TEST(Poisson, NotHamiltonian) {
  EXPECT_FALSE(poisson_correspondence(algebra::X(1, kMom)).has_value());
  EXPECT_FALSE(poisson_correspondence(build_free_liouvillian()).has_value());
  const OperatorExpr compressible = scalar(symbolic::p(1), kMom) * algebra::lambda_p(1);
  EXPECT_FALSE(poisson_correspondence(compressible).has_value());
}
