#include <cmath>
#include <stdexcept>

#include "relkvn/error.hpp"
#include "relkvn/phase_flow.hpp"

namespace relkvn::flow {

namespace {

struct Phase {
  Vec3d r, v;
};

double dot(const Vec3d& a, const Vec3d& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Phase rate(double m0, const ForceFieldNum& field, const Phase& z, double t) {
  const double s2 = dot(z.v, z.v);
  if (!std::isfinite(s2)) throw NonFiniteState("trajectory became non-finite at t = " + std::to_string(t));
  if (!(s2 < 1.0)) throw SpeedLimitBreached("|v| reached " + std::to_string(std::sqrt(s2)) + " at t = " + std::to_string(t));
  const Vec3d F = field.force(z.r, z.v, t);
  for (double f : F)
    if (!std::isfinite(f)) throw NonFiniteState("field is non-finite at t = " + std::to_string(t));
  const double g = std::sqrt(1.0 - s2) / m0;
  const double vf = dot(z.v, F);
  Phase d;
  d.r = z.v;
  for (int i = 0; i < 3; ++i) d.v[i] = g * (F[i] - vf * z.v[i]);
  return d;
}

Phase axpy(const Phase& z, double h, const Phase& d) {
  Phase out;
  for (int i = 0; i < 3; ++i) {
    out.r[i] = z.r[i] + h * d.r[i];
    out.v[i] = z.v[i] + h * d.v[i];
  }
  return out;
}

void check(const Phase& z, double t) {
  for (int i = 0; i < 3; ++i) {
    if (!std::isfinite(z.r[i]) || !std::isfinite(z.v[i])) {
      throw NonFiniteState("trajectory became non-finite at t = " + std::to_string(t));
    }
  }
  const double s = std::sqrt(dot(z.v, z.v));
  if (!(s < 1.0)) throw SpeedLimitBreached("|v| reached " + std::to_string(s) + " at t = " + std::to_string(t));
}

}  // namespace

TrajectoryRecord integrate_trajectory(double m0, const ForceFieldNum& field, const Vec3d& r0, const Vec3d& v0,
                                      double t_end, double dt, int record_every) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be nonnegative");
  if (!(m0 > 0.0)) throw std::invalid_argument("m0 must be positive");
  if (record_every < 1) throw std::invalid_argument("record_every must be at least 1");

  Phase z{r0, v0};
  check(z, 0.0);
  const long steps = t_end > 0.0 ? static_cast<long>(std::ceil(t_end / dt - 1e-9)) : 0;
  const double h = steps > 0 ? t_end / static_cast<double>(steps) : dt;

  TrajectoryRecord rec;
  rec.dt = h;
  const bool gauge = field.has_potentials();
  auto record = [&](double t) {
    const double g = 1.0 / std::sqrt(1.0 - dot(z.v, z.v));
    Vec3d p;
    for (int i = 0; i < 3; ++i) p[i] = m0 * g * z.v[i];
    if (gauge) {
      const auto pot = field.potential_derivatives(z.r, t);
      for (int i = 0; i < 3; ++i) p[i] += pot.A[i];
    }
    rec.t.push_back(t);
    rec.r.push_back(z.r);
    rec.v.push_back(z.v);
    rec.p.push_back(p);
  };
  record(0.0);
  for (long n = 0; n < steps; ++n) {
    const double t = n * h;
    const Phase k1 = rate(m0, field, z, t);
    const Phase k2 = rate(m0, field, axpy(z, 0.5 * h, k1), t + 0.5 * h);
    const Phase k3 = rate(m0, field, axpy(z, 0.5 * h, k2), t + 0.5 * h);
    const Phase k4 = rate(m0, field, axpy(z, h, k3), t + h);
    for (int i = 0; i < 3; ++i) {
      z.r[i] += h / 6.0 * (k1.r[i] + 2.0 * k2.r[i] + 2.0 * k3.r[i] + k4.r[i]);
      z.v[i] += h / 6.0 * (k1.v[i] + 2.0 * k2.v[i] + 2.0 * k3.v[i] + k4.v[i]);
    }
    const double t1 = (n + 1 == steps) ? t_end : (n + 1) * h;
    check(z, t1);
    if ((n + 1) % record_every == 0 || n + 1 == steps) record(t1);
  }
  return rec;
}

std::pair<double, double> constant_force_oracle(double m0, double F, double t) {
  if (F == 0.0) throw std::invalid_argument("constant_force_oracle needs F != 0");
  if (t < 0.0) throw std::invalid_argument("constant_force_oracle needs t >= 0");
  const double a = F / m0;
  const double at = a * t;
  const double root = std::sqrt(1.0 + at * at);
  // (root - 1) / a without cancellation for small at
  const double x = at * t / (root + 1.0);
  return {x, at / root};
}

}  // namespace relkvn::flow
