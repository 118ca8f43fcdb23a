#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>

#include "relkvn/evaluate.hpp"
#include "relkvn/scalar_expr.hpp"

namespace relkvn::symbolic {

/// Sampling contract for numeric equality.
///
/// Every trial draws all ten phase variables (x, v, p, t) plus any named
/// parameter in play. The point for trial k depends only on (seed, k, attempt),
/// never on shared generator state. Velocities are drawn per component from
/// [-v_max, v_max] and redrawn until |v| <= v_max.
struct ProbeOptions {
  int trials = 100;
  double tol = 1e-9;
  std::uint64_t seed = 0;
  double v_max = 0.9;
  double coordinate_range = 2.0;  // x, p and t drawn from [-range, range]
  double param_min = 0.5;
  double param_max = 2.0;
  int max_retries = 64;
  std::map<std::string, double> fixed;  // symbols pinned to a value instead of sampled
};

struct ProbeReport {
  bool equal = true;
  double max_residual = 0.0;
  int trials = 0;
  int resamples = 0;
  SamplePoint worst;
};

/// |a - b| scaled by max(1, |a|, |b|).
double residual(std::complex<double> a, std::complex<double> b);

SamplePoint sample_point(const std::set<std::string>& parameters, const ProbeOptions& options, int trial,
                         int attempt);

/// Runs `residual_at` at options.trials seeded points. DomainError at a point
/// triggers a redraw; ProbeExhausted after options.max_retries redraws.
ProbeReport probe(const std::set<std::string>& symbols, const ProbeOptions& options,
                  const std::function<double(const SamplePoint&)>& residual_at);

ProbeReport equal_numeric(const ScalarExpr& a, const ScalarExpr& b, const ProbeOptions& options = {});
ProbeReport equal_numeric(const ScalarExpr& a, const ScalarExpr& b, int trials, double tol, std::uint64_t seed);

}  // namespace relkvn::symbolic
