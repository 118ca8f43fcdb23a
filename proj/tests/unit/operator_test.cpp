#include <gtest/gtest.h>

#include <random>

#include "relkvn/error.hpp"
#include "relkvn/operator_expr.hpp"

using namespace relkvn;
using namespace relkvn::algebra;
using symbolic::ScalarExpr;

namespace {

const ScalarExpr I = ScalarExpr::imaginary_unit();

OperatorExpr scalar(const ScalarExpr& f) { return OperatorExpr::scalar(f); }

bool same(const OperatorExpr& a, const OperatorExpr& b, double tol = 1e-9) { return op_equal(a, b, tol, 7).equal; }

OperatorExpr J3() { return X(1) * lambda_x(2) - X(2) * lambda_x(1) + V(1) * lambda_v(2) - V(2) * lambda_v(1); }

// Order <= 1 operator with small polynomial coefficients.
OperatorExpr random_first_order(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> small(-3, 3);
  std::uniform_int_distribution<int> var(0, 6);
  const ScalarExpr atoms[] = {symbolic::x(1), symbolic::x(2), symbolic::x(3), symbolic::v(1),
                              symbolic::v(2), symbolic::v(3), ScalarExpr(1)};
  auto coeff = [&] {
    return ScalarExpr(small(rng)) * atoms[var(rng)] * atoms[var(rng)] + I * ScalarExpr(small(rng)) * atoms[var(rng)];
  };
  OperatorExpr out = scalar(coeff());
  for (int i = 1; i <= 3; ++i) {
    out += coeff() * lambda_x(i);
    out += coeff() * lambda_v(i);
  }
  return out;
}

}  // namespace

TEST(Operator, CanonicalCommutator) {
  EXPECT_TRUE(same(commutator(X(1), lambda_x(1)), scalar(I)));
  EXPECT_TRUE(commutator(X(1), V(2)).is_zero());
  EXPECT_TRUE(commutator(lambda_x(1), lambda_x(2)).is_zero());
  EXPECT_TRUE(same(commutator(V(2), lambda_v(2)), scalar(I)));
  EXPECT_TRUE(commutator(V(2), lambda_v(3)).is_zero());
}

TEST(Operator, ComposeIdentityAndLeibniz) {
  const OperatorExpr a = V(1) * lambda_x(2) + scalar(symbolic::x(3));
  EXPECT_TRUE(same(compose(identity(), a), a));
  const ScalarExpr f = symbolic::x(1) * symbolic::x(1);
  const OperatorExpr got = compose(lambda_x(1), scalar(f));
  EXPECT_TRUE(same(got, f * lambda_x(1) + scalar(-2 * I * symbolic::x(1))));
}

TEST(Operator, RotationOfPosition) { EXPECT_TRUE(same(commutator(J3(), X(1)), I * X(2))); }

TEST(Operator, Symmetrize) {
  EXPECT_TRUE(same(symmetrize(V(1), lambda_v(1)), V(1) * lambda_v(1) - scalar(I / 2)));
  EXPECT_TRUE(same(symmetrize(X(1), X(2)), X(1) * X(2)));
  const OperatorExpr a = V(1) * V(2), b = lambda_v(1);
  EXPECT_TRUE((symmetrize(a, b) - symmetrize(b, a)).is_zero());
}

TEST(Operator, Adjoint) {
  EXPECT_TRUE(same(adjoint(X(1)), X(1)));
  EXPECT_TRUE(same(adjoint(lambda_x(1)), lambda_x(1)));
  EXPECT_TRUE(same(adjoint(V(1) * lambda_v(1)), V(1) * lambda_v(1) - scalar(I)));
}

TEST(Operator, Hermiticity) {
  const OperatorExpr l_free = V(1) * lambda_x(1) + V(2) * lambda_x(2) + V(3) * lambda_x(3);
  EXPECT_TRUE(is_hermitian(l_free, 1e-9, 1));
  EXPECT_TRUE(is_hermitian(lambda_v(1), 1e-9, 1));
  EXPECT_FALSE(is_hermitian(I * X(1), 1e-9, 1));
}

TEST(Operator, OpEqualReportsWorstMonomial) {
  const OperatorExpr l_free = V(1) * lambda_x(1) + V(2) * lambda_x(2) + V(3) * lambda_x(3);
  EXPECT_TRUE(op_equal(l_free, l_free, 1e-12, 3).equal);
  const auto r = op_equal(l_free, l_free + identity(), 1e-9, 3);
  EXPECT_FALSE(r.equal);
  EXPECT_DOUBLE_EQ(r.max_residual, 1.0);
  EXPECT_EQ(r.worst_monomial, "1");
}

TEST(Operator, OrderCapIsAnError) {
  OperatorExpr a = lambda_x(1);
  for (int k = 0; k < 5; ++k) a = compose(a, lambda_v(2));
  EXPECT_EQ(a.order(), 6);
  EXPECT_THROW(compose(a, lambda_x(3)), OrderCapExceeded);
  EXPECT_NO_THROW(compose(a, lambda_x(3), 7));
}

TEST(Operator, RepresentationsDoNotMix) {
  EXPECT_THROW(V(1) + P(1), RepresentationMismatch);
  EXPECT_THROW(compose(lambda_v(1), lambda_p(1)), RepresentationMismatch);
}

TEST(OperatorProperties, JacobiAssociativityInvolution) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const OperatorExpr a = random_first_order(rng), b = random_first_order(rng), c = random_first_order(rng);
    const OperatorExpr jac =
        commutator(commutator(a, b), c) + commutator(commutator(b, c), a) + commutator(commutator(c, a), b);
    EXPECT_TRUE(same(jac, OperatorExpr())) << trial;
    EXPECT_TRUE(same(compose(compose(a, b), c), compose(a, compose(b, c)))) << trial;
    EXPECT_TRUE(same(adjoint(adjoint(a)), a)) << trial;
    EXPECT_LE(commutator(a, b).order(), 1) << trial;
  }
}

TEST(OperatorProperties, SymmetrizedHermitianIsHermitian) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const OperatorExpr a0 = random_first_order(rng), b0 = random_first_order(rng);
    const OperatorExpr a = symmetrize(a0, adjoint(a0)) * identity() + a0 + adjoint(a0);
    const OperatorExpr b = b0 + adjoint(b0);
    ASSERT_TRUE(is_hermitian(a, 1e-9, 2));
    ASSERT_TRUE(is_hermitian(b, 1e-9, 2));
    EXPECT_TRUE(is_hermitian(symmetrize(a, b), 1e-9, 2)) << trial;
  }
}

TEST(OperatorParse, Syntax) {
  EXPECT_TRUE(same(parse_operator("comm(X1, Lx1)"), scalar(I)));
  EXPECT_TRUE(same(parse_operator("S(V1, Lv1)"), V(1) * lambda_v(1) - scalar(I / 2)));
  EXPECT_TRUE(same(parse_operator("X1*Lx2 - X2*Lx1 + V1*Lv2 - V2*Lv1"), J3()));
  EXPECT_TRUE(same(parse_operator("m0*sqrt(1 - v1^2)*Lv1"),
                   ScalarExpr::symbol("m0") * symbolic::sqrt(1 - symbolic::v(1) * symbolic::v(1)) * lambda_v(1)));
  const OperatorExpr m = parse_operator("P1*Lxp1 + Lp2");
  EXPECT_EQ(m.representation(), Representation::Momentum);
  EXPECT_TRUE(same(m, P(1) * lambda_x(1, Representation::Momentum) + lambda_p(2)));
  EXPECT_TRUE(same(parse_operator("Lx1^2"), compose(lambda_x(1), lambda_x(1))));
  EXPECT_TRUE(same(parse_operator("comm(J, X1)", {{"J", J3()}}), I * X(2)));
  EXPECT_THROW(parse_operator("V1 + P1"), RepresentationMismatch);
  EXPECT_THROW(parse_operator("S(X1 Lx1)"), ParseError);
  EXPECT_THROW(parse_operator("Lx1^(1/2)"), ParseError);
}
