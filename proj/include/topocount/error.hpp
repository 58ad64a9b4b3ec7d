#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace topocount {

enum class Errc {
    InvalidParam,
    NyquistViolation,
    SignalTooShort,
    InvalidFraction,
    ResultEmpty,
    ZeroPowerSignal,
    InvalidRange,
    DimensionMismatch,
    InvalidStride,
    TooManyLandmarks,
    NonmonotoneFiltration,
    TooFewSnapshots,
    DegenerateSpectrum,
    ParseError,
    UnknownAxis,
    ConfigError,
    IoError,
};

constexpr std::string_view to_string(Errc code) noexcept {
    switch (code) {
    case Errc::InvalidParam: return "InvalidParam";
    case Errc::NyquistViolation: return "NyquistViolation";
    case Errc::SignalTooShort: return "SignalTooShort";
    case Errc::InvalidFraction: return "InvalidFraction";
    case Errc::ResultEmpty: return "ResultEmpty";
    case Errc::ZeroPowerSignal: return "ZeroPowerSignal";
    case Errc::InvalidRange: return "InvalidRange";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::InvalidStride: return "InvalidStride";
    case Errc::TooManyLandmarks: return "TooManyLandmarks";
    case Errc::NonmonotoneFiltration: return "NonmonotoneFiltration";
    case Errc::TooFewSnapshots: return "TooFewSnapshots";
    case Errc::DegenerateSpectrum: return "DegenerateSpectrum";
    case Errc::ParseError: return "ParseError";
    case Errc::UnknownAxis: return "UnknownAxis";
    case Errc::ConfigError: return "ConfigError";
    case Errc::IoError: return "IoError";
    }
    return "Unknown";
}

/// Every failure in the library is reported as an Error carrying a machine-readable code.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

namespace detail {
inline void require(bool condition, Errc code, const std::string& what) {
    if (!condition) {
        throw Error(code, what);
    }
}
} // namespace detail

} // namespace topocount
