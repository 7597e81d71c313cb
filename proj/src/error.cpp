#include "spdelab/error.hpp"

namespace spdelab {

const char* error_code_name(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::GridMismatch: return "grid_mismatch";
    case ErrorCode::ZeroInformation: return "zero_information";
    case ErrorCode::EmptyWindow: return "empty_window";
    case ErrorCode::BlowUp: return "blow_up";
    case ErrorCode::TooManyBlowUps: return "too_many_blow_ups";
    case ErrorCode::BadMagic: return "bad_magic";
    case ErrorCode::VersionUnsupported: return "version_unsupported";
    case ErrorCode::TruncatedFile: return "truncated_file";
    case ErrorCode::Config: return "config";
    case ErrorCode::Io: return "io";
    }
    return "unknown";
}

bool is_numerical(ErrorCode code)
{
    return code == ErrorCode::BlowUp || code == ErrorCode::ZeroInformation ||
           code == ErrorCode::TooManyBlowUps;
}

Error::Error(ErrorCode code, const std::string& message, std::optional<std::uint64_t> location)
    : std::runtime_error(message), code_(code), location_(location)
{
}

void fail(ErrorCode code, const std::string& message)
{
    throw Error(code, message);
}

}  // namespace spdelab
