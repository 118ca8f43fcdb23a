#pragma once

#include <iosfwd>
#include <string>

#include "relkvn/phase_flow.hpp"

namespace relkvn::flow {

enum class SnapshotEncoding { Text, Binary };

/// Snapshot layout:
///
///   # kvn-state v1
///   representation velocity|momentum
///   time <t>
///   axis <variable> <min> <max> <points>     (one line per axis, in order)
///   layout row-major-last-fastest
///   encoding text|binary-le-f64
///   data
///
/// followed by `index re im` lines (text) or 2·N little-endian doubles
/// (re, im interleaved) for the binary encoding.
void write_snapshot(const PhaseSpaceState& state, std::ostream& os, SnapshotEncoding enc = SnapshotEncoding::Text);
void write_snapshot(const PhaseSpaceState& state, const std::string& path,
                    SnapshotEncoding enc = SnapshotEncoding::Text);
/// Throws ParseError on a malformed stream.
PhaseSpaceState read_snapshot(std::istream& is);
PhaseSpaceState read_snapshot(const std::string& path);

/// CSV with header t,x1,x2,x3,v1,v2,v3 (p1,p2,p3 when `momentum`), 12 decimals.
void write_trajectory_csv(const TrajectoryRecord& rec, std::ostream& os, bool momentum = false);
void write_trajectory_csv(const TrajectoryRecord& rec, const std::string& path, bool momentum = false);

}  // namespace relkvn::flow
