#include "relkvn/probe.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "relkvn/error.hpp"

namespace relkvn::symbolic {

double residual(std::complex<double> a, std::complex<double> b) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) / scale;
}

SamplePoint sample_point(const std::set<std::string>& parameters, const ProbeOptions& options, int trial,
                         int attempt) {
  std::seed_seq seq{static_cast<std::uint32_t>(options.seed & 0xffffffffu),
                    static_cast<std::uint32_t>(options.seed >> 32), static_cast<std::uint32_t>(trial),
                    static_cast<std::uint32_t>(attempt)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> coord(-options.coordinate_range, options.coordinate_range);
  std::uniform_real_distribution<double> vel(-options.v_max, options.v_max);
  std::uniform_real_distribution<double> par(options.param_min, options.param_max);

  SamplePoint pt;
  for (int i = 1; i <= 3; ++i) pt.set(vars::x(i), coord(rng));
  for (int i = 1; i <= 3; ++i) pt.set(vars::p(i), coord(rng));
  pt.set(vars::t, coord(rng));
  double v[3];
  do {
    for (double& c : v) c = vel(rng);
  } while (v[0] * v[0] + v[1] * v[1] + v[2] * v[2] > options.v_max * options.v_max);
  for (int i = 1; i <= 3; ++i) pt.set(vars::v(i), v[i - 1]);
  for (const auto& name : parameters) {
    if (!vars::is_phase_variable(name)) pt.set(name, par(rng));
  }
  for (const auto& [name, value] : options.fixed) pt.set(name, value);
  return pt;
}

ProbeReport probe(const std::set<std::string>& symbols, const ProbeOptions& options,
                  const std::function<double(const SamplePoint&)>& residual_at) {
  ProbeReport report;
  for (int k = 0; k < options.trials; ++k) {
    int attempt = 0;
    for (;; ++attempt) {
      if (attempt > options.max_retries) {
        throw ProbeExhausted("no well-defined sample point after " + std::to_string(options.max_retries) +
                             " redraws (trial " + std::to_string(k) + ")");
      }
      const SamplePoint pt = sample_point(symbols, options, k, attempt);
      double r = 0.0;
      try {
        r = residual_at(pt);
      } catch (const DomainError&) {
        continue;
      }
      if (!std::isfinite(r)) continue;
      if (report.trials == 0 || r > report.max_residual) {
        report.worst = pt;
        report.max_residual = r;
      }
      break;
    }
    report.resamples += attempt;
    ++report.trials;
  }
  report.equal = report.max_residual <= options.tol;
  return report;
}

ProbeReport equal_numeric(const ScalarExpr& a, const ScalarExpr& b, const ProbeOptions& options) {
  std::set<std::string> symbols = a.free_symbols();
  const auto sb = b.free_symbols();
  symbols.insert(sb.begin(), sb.end());
  std::vector<std::string> slots(symbols.begin(), symbols.end());
  const Tape tape({a, b}, slots);
  Tape::Workspace ws;
  std::complex<double> out[2];
  return probe(symbols, options, [&](const SamplePoint& pt) {
    tape.evaluate(tape.slot_values(pt), ws, out);
    return residual(out[0], out[1]);
  });
}

ProbeReport equal_numeric(const ScalarExpr& a, const ScalarExpr& b, int trials, double tol, std::uint64_t seed) {
  ProbeOptions o;
  o.trials = trials;
  o.tol = tol;
  o.seed = seed;
  return equal_numeric(a, b, o);
}

}  // namespace relkvn::symbolic
