#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace spdelab {

enum class ErrorCode {
    InvalidArgument,
    GridMismatch,
    ZeroInformation,
    EmptyWindow,
    BlowUp,
    TooManyBlowUps,
    BadMagic,
    VersionUnsupported,
    TruncatedFile,
    Config,
    Io,
};

/// Stable machine-readable name, e.g. "zero_information".
const char* error_code_name(ErrorCode code);

/// True for failures of the numerics (as opposed to bad input).
bool is_numerical(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::optional<std::uint64_t> location = {});

    ErrorCode code() const noexcept { return code_; }

    /// Step index for BlowUp, byte offset for TruncatedFile.
    std::optional<std::uint64_t> location() const noexcept { return location_; }

private:
    ErrorCode code_;
    std::optional<std::uint64_t> location_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, std::string_view message)
{
    if (!condition) fail(ErrorCode::InvalidArgument, std::string(message));
}

}  // namespace spdelab
