#pragma once

// Binary field dumps. Layout, all little-endian:
//   char[8]  magic "BECSQFLD"
//   u32      format version (1)
//   u32      dim
//   u64[3]   points per axis
//   f64[3]   extents (m)
//   f64      dt (s)
//   u64      seed
//   u64      trajectory
//   f64      hold time at the dump (s)
//   f64[2M]  phi_a as interleaved re, im
//   f64[2M]  phi_b as interleaved re, im

#include <cstdint>
#include <string>

#include "becsq/lattice.hpp"
#include "becsq/twa.hpp"

namespace becsq::twa {

struct SnapshotHeader {
  FieldLattice lattice;
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t trajectory = 0;
  double time = 0.0;
};

std::string snapshot_filename(std::uint64_t trajectory);

void write_snapshot(const std::string& path, const SnapshotHeader& header, const FieldPair& fields);

/// Throws std::runtime_error on a bad magic, version or truncated file.
FieldPair read_snapshot(const std::string& path, SnapshotHeader& header);

}  // namespace becsq::twa
