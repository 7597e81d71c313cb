#include "spdelab/trajectory_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <vector>

#include "spdelab/error.hpp"

namespace spdelab {

namespace {

void put_u32(std::vector<unsigned char>& buf, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void put_u64(std::vector<unsigned char>& buf, std::uint64_t v)
{
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void put_f64(std::vector<unsigned char>& buf, double v)
{
    put_u64(buf, std::bit_cast<std::uint64_t>(v));
}

std::uint64_t get_u64(const unsigned char* p)
{
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

std::uint32_t get_u32(const unsigned char* p)
{
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

double get_f64(const unsigned char* p)
{
    return std::bit_cast<double>(get_u64(p));
}

}  // namespace

void write_trajectory(std::ostream& out, const Trajectory& traj)
{
    const auto& g = traj.grid;
    require(traj.values.size() == (g.N + 1) * (g.M + 1), "write_trajectory: values do not match the grid");
    std::vector<unsigned char> buf;
    buf.reserve(kTrajectoryHeaderBytes + 8 * traj.values.size());
    buf.insert(buf.end(), {'S', 'P', 'D', '1'});
    put_u32(buf, kTrajectoryVersion);
    put_u64(buf, g.M);
    put_u64(buf, g.N);
    put_f64(buf, g.length);
    put_f64(buf, g.horizon);
    put_f64(buf, traj.nu);
    put_f64(buf, traj.alpha);
    put_u64(buf, traj.seed);
    for (double v : traj.values) put_f64(buf, v);
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) fail(ErrorCode::Io, "write_trajectory: write failed");
}

void write_trajectory(const std::filesystem::path& path, const Trajectory& traj)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    write_trajectory(out, traj);
}

Trajectory read_trajectory(std::istream& in)
{
    const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() < 4 || std::memcmp(bytes.data(), "SPD1", 4) != 0) {
        fail(ErrorCode::BadMagic, "not an SPD1 trajectory file (bad magic bytes)");
    }
    if (bytes.size() < 8) throw Error(ErrorCode::TruncatedFile, "trajectory truncated inside the header", bytes.size());
    const std::uint32_t version = get_u32(bytes.data() + 4);
    if (version != kTrajectoryVersion) {
        fail(ErrorCode::VersionUnsupported, "unsupported SPD1 version " + std::to_string(version));
    }
    if (bytes.size() < kTrajectoryHeaderBytes) {
        throw Error(ErrorCode::TruncatedFile, "trajectory truncated inside the header", bytes.size());
    }
    const unsigned char* p = bytes.data() + 8;
    Trajectory traj;
    traj.grid.M = get_u64(p);
    traj.grid.N = get_u64(p + 8);
    traj.grid.length = get_f64(p + 16);
    traj.grid.horizon = get_f64(p + 24);
    traj.nu = get_f64(p + 32);
    traj.alpha = get_f64(p + 40);
    traj.seed = get_u64(p + 48);
    if (traj.grid.M < 2 || traj.grid.N < 1 || traj.grid.M > (1ull << 32) || traj.grid.N > (1ull << 40)) {
        fail(ErrorCode::InvalidArgument, "trajectory header carries an implausible grid");
    }
    const std::size_t count = (traj.grid.N + 1) * (traj.grid.M + 1);
    const std::size_t expected = kTrajectoryHeaderBytes + 8 * count;
    if (bytes.size() < expected) {
        std::ostringstream msg;
        msg << "trajectory truncated at byte offset " << bytes.size() << " (expected " << expected << " bytes)";
        throw Error(ErrorCode::TruncatedFile, msg.str(), bytes.size());
    }
    traj.values.resize(count);
    const unsigned char* v = bytes.data() + kTrajectoryHeaderBytes;
    for (std::size_t i = 0; i < count; ++i) traj.values[i] = get_f64(v + 8 * i);
    return traj;
}

Trajectory read_trajectory(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
    return read_trajectory(in);
}

}  // namespace spdelab
