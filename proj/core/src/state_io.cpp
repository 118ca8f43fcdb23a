#include "relkvn/state_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "relkvn/error.hpp"

namespace relkvn::flow {

namespace {

constexpr const char* kMagic = "# kvn-state v1";

void put_le(std::ostream& os, double d) {
  auto bits = std::bit_cast<std::uint64_t>(d);
  char b[8];
  for (int k = 0; k < 8; ++k) b[k] = static_cast<char>((bits >> (8 * k)) & 0xffu);
  os.write(b, 8);
}

double get_le(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw ParseError("snapshot: truncated binary data");
  std::uint64_t bits = 0;
  for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(b[k]) << (8 * k);
  return std::bit_cast<double>(bits);
}

std::string next_line(std::istream& is, const char* what) {
  std::string line;
  if (!std::getline(is, line)) throw ParseError(std::string("snapshot: missing ") + what);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

void write_snapshot(const PhaseSpaceState& state, std::ostream& os, SnapshotEncoding enc) {
  os << kMagic << '\n';
  os << "representation " << algebra::to_string(state.representation()) << '\n';
  os << std::setprecision(17);
  os << "time " << state.time() << '\n';
  for (const auto& ax : state.axes()) {
    os << "axis " << ax.variable << ' ' << ax.min << ' ' << ax.max << ' ' << ax.points << '\n';
  }
  os << "layout row-major-last-fastest\n";
  os << "encoding " << (enc == SnapshotEncoding::Text ? "text" : "binary-le-f64") << '\n';
  os << "data\n";
  const auto& psi = state.amplitudes();
  if (enc == SnapshotEncoding::Text) {
    for (std::size_t k = 0; k < psi.size(); ++k) os << k << ' ' << psi[k].real() << ' ' << psi[k].imag() << '\n';
  } else {
    for (const auto& a : psi) {
      put_le(os, a.real());
      put_le(os, a.imag());
    }
  }
}

void write_snapshot(const PhaseSpaceState& state, const std::string& path, SnapshotEncoding enc) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  write_snapshot(state, os, enc);
}

PhaseSpaceState read_snapshot(std::istream& is) {
  if (next_line(is, "header") != kMagic) throw ParseError("snapshot: bad magic line");
  Representation rep = Representation::Velocity;
  double t = 0.0;
  std::vector<GridAxis> axes;
  std::string encoding;
  for (;;) {
    const std::string line = next_line(is, "data marker");
    if (line == "data") break;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "representation") {
      std::string r;
      ls >> r;
      if (r == "velocity") {
        rep = Representation::Velocity;
      } else if (r == "momentum") {
        rep = Representation::Momentum;
      } else {
        throw ParseError("snapshot: unknown representation '" + r + "'");
      }
    } else if (key == "time") {
      if (!(ls >> t)) throw ParseError("snapshot: bad time");
    } else if (key == "axis") {
      GridAxis ax;
      if (!(ls >> ax.variable >> ax.min >> ax.max >> ax.points)) throw ParseError("snapshot: bad axis line");
      axes.push_back(ax);
    } else if (key == "layout") {
      std::string l;
      ls >> l;
      if (l != "row-major-last-fastest") throw ParseError("snapshot: unsupported layout '" + l + "'");
    } else if (key == "encoding") {
      ls >> encoding;
    } else {
      throw ParseError("snapshot: unknown header key '" + key + "'");
    }
  }
  PhaseSpaceState s = [&] {
    try {
      return PhaseSpaceState(rep, axes, t);
    } catch (const ConfigError& e) {
      throw ParseError(std::string("snapshot: ") + e.what());
    }
  }();
  auto& psi = s.amplitudes();
  if (encoding == "text") {
    for (std::size_t k = 0; k < psi.size(); ++k) {
      std::size_t idx = 0;
      double re = 0.0, im = 0.0;
      if (!(is >> idx >> re >> im) || idx != k) throw ParseError("snapshot: bad amplitude record " + std::to_string(k));
      psi[k] = {re, im};
    }
  } else if (encoding == "binary-le-f64") {
    for (auto& a : psi) {
      const double re = get_le(is);
      a = {re, get_le(is)};
    }
  } else {
    throw ParseError("snapshot: unknown encoding '" + encoding + "'");
  }
  return s;
}

PhaseSpaceState read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  return read_snapshot(is);
}

void write_trajectory_csv(const TrajectoryRecord& rec, std::ostream& os, bool momentum) {
  os << (momentum ? "t,x1,x2,x3,p1,p2,p3\n" : "t,x1,x2,x3,v1,v2,v3\n");
  os << std::fixed << std::setprecision(12);
  for (std::size_t k = 0; k < rec.t.size(); ++k) {
    const Vec3d& w = momentum ? rec.p[k] : rec.v[k];
    os << rec.t[k];
    for (double c : rec.r[k]) os << ',' << c;
    for (double c : w) os << ',' << c;
    os << '\n';
  }
}

void write_trajectory_csv(const TrajectoryRecord& rec, const std::string& path, bool momentum) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  write_trajectory_csv(rec, os, momentum);
}

}  // namespace relkvn::flow
