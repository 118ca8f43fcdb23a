#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "relkvn/generators.hpp"
#include "relkvn/operator_expr.hpp"
#include "relkvn/probe.hpp"
#include "relkvn/report.hpp"

namespace relkvn::series {

using algebra::OperatorExpr;
using generators::ForceField;
using symbolic::ScalarExpr;

/// Terms ad_X^n(Y)/n! of e^X Y e^-X for n = 0..order.
struct AdjointSeries {
  OperatorExpr X;
  OperatorExpr Y;
  int order = 0;
  std::vector<OperatorExpr> terms;

  /// Σ_{n≤k} param^n terms[n].
  OperatorExpr partial_sum(int k, const ScalarExpr& param = 1) const;
};

AdjointSeries adjoint_series(const OperatorExpr& X, const OperatorExpr& Y, int order,
                             int cap = algebra::kDefaultOrderCap);

/// (i/2)(V² V·λv)_S.
OperatorExpr c1_exponent();
/// i A·λp in the momentum representation.
OperatorExpr c2_exponent(const ForceField& field);

/// Π_{k=1..n} (2k-1)/(2k).
symbolic::Rational velocity_series_coefficient(int n);
/// Taylor coefficients of sqrt(1-u): 1, -1/2, -1/8, -1/16, ...
symbolic::Rational inverse_gamma_coefficient(int n);

VerificationReport verify_c1_on_velocity(const ScalarExpr& m0, int order, const symbolic::ProbeOptions& options = {});
VerificationReport verify_c1_on_lambda(const ScalarExpr& m0, int order, const symbolic::ProbeOptions& options = {});
VerificationReport verify_c2(const ForceField& field, const symbolic::ProbeOptions& options = {});

/// Velocity-representation images of (X, P, λ', λp) under the scale step and
/// the two unitary maps, checked against the canonical momentum table, plus
/// the per-order C1 checks through `order`.
VerificationReport verify_canonical_map(const ScalarExpr& m0, const ForceField& field, int order,
                                        const symbolic::ProbeOptions& options = {});

enum class BoostKind { Velocity, EnergyMomentum, Position };

/// Taylor coefficients in s of the closed-form boost laws along z against the
/// adjoint series of i s K_z. Position orders above 2 are informational. A
/// final informational row compares the summed series at rapidity `s`.
VerificationReport verify_boost_closed_forms(BoostKind kind, double s, int order,
                                             const symbolic::ProbeOptions& options = {});

/// Max over probe points of |Σ_{n≤N} s^n term_n - closed form| for V_z, for N = 0..order.
std::vector<double> boost_velocity_convergence(double s, int order, const symbolic::ProbeOptions& options = {});

/// a_n = (1/2πi)∮ f(z) z^{-n-1} dz on a circle of `radius` with `points` nodes.
std::vector<std::complex<double>> taylor_coefficients(const std::function<std::complex<double>(std::complex<double>)>& f,
                                                      int order, double radius = 0.5, int points = 64);

}  // namespace relkvn::series
