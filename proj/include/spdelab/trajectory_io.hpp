#pragma once

#include <filesystem>
#include <iosfwd>

#include "spdelab/simulator.hpp"

namespace spdelab {

/// SPD1 layout, all little-endian:
///   "SPD1" | u32 version = 1 | u64 M | u64 N | f64 l | f64 T | f64 nu | f64 alpha | u64 seed
///   | (N+1)(M+1) f64 values, row-major by time.
inline constexpr std::uint32_t kTrajectoryVersion = 1;
inline constexpr std::size_t kTrajectoryHeaderBytes = 64;

void write_trajectory(std::ostream& out, const Trajectory& traj);
void write_trajectory(const std::filesystem::path& path, const Trajectory& traj);

/// Throws BadMagic, VersionUnsupported, or TruncatedFile (location = bytes available).
Trajectory read_trajectory(std::istream& in);
Trajectory read_trajectory(const std::filesystem::path& path);

}  // namespace spdelab
