#pragma once

#include <stdexcept>
#include <string>

namespace splinequad {

enum class errc {
    invalid_argument,
    out_of_range,
    unsupported_target,
    invalid_pattern,
    invalid_source,
    continuation_stalled,
    dimension_mismatch,
    oracle_inconsistency,
    parse_error,
};

inline const char* to_string(errc code) {
    switch (code) {
    case errc::invalid_argument: return "invalid-argument";
    case errc::out_of_range: return "out-of-range";
    case errc::unsupported_target: return "unsupported-target";
    case errc::invalid_pattern: return "invalid-pattern";
    case errc::invalid_source: return "invalid-source";
    case errc::continuation_stalled: return "continuation-stalled";
    case errc::dimension_mismatch: return "dimension-mismatch";
    case errc::oracle_inconsistency: return "oracle-inconsistency";
    case errc::parse_error: return "parse-error";
    }
    return "unknown";
}

/// Every failure raised by the library carries one of the codes above.
class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

} // namespace splinequad
