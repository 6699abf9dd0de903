#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qpa {

enum class ErrorKind {
    NotHermitian,
    NotIdempotent,
    NotRankOne,
    NotComplete,
    NotAProjector,
    DimensionMismatch,
    DimensionTooSmall,
    TraceNotOne,
    InvalidProbabilities,
    NonFiniteInput,
    ConstructionFailed,
    MissingRecord,
    LatticeLeavesPsdCone,
    MalformedInput,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::NotHermitian: return "NotHermitian";
        case ErrorKind::NotIdempotent: return "NotIdempotent";
        case ErrorKind::NotRankOne: return "NotRankOne";
        case ErrorKind::NotComplete: return "NotComplete";
        case ErrorKind::NotAProjector: return "NotAProjector";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::DimensionTooSmall: return "DimensionTooSmall";
        case ErrorKind::TraceNotOne: return "TraceNotOne";
        case ErrorKind::InvalidProbabilities: return "InvalidProbabilities";
        case ErrorKind::NonFiniteInput: return "NonFiniteInput";
        case ErrorKind::ConstructionFailed: return "ConstructionFailed";
        case ErrorKind::MissingRecord: return "MissingRecord";
        case ErrorKind::LatticeLeavesPsdCone: return "LatticeLeavesPsdCone";
        case ErrorKind::MalformedInput: return "MalformedInput";
    }
    return "Unknown";
}

/// Every failure raised by the library. `index()` names the offending
/// element (projector, assignment, record) when one exists.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& detail, std::optional<std::size_t> index = std::nullopt)
        : std::runtime_error(format(kind, detail, index)), kind_(kind), index_(index) {}

    ErrorKind kind() const noexcept { return kind_; }
    std::optional<std::size_t> index() const noexcept { return index_; }

private:
    static std::string format(ErrorKind kind, const std::string& detail, std::optional<std::size_t> index) {
        std::string msg(to_string(kind));
        if (index) msg += " at index " + std::to_string(*index);
        if (!detail.empty()) msg += ": " + detail;
        return msg;
    }

    ErrorKind kind_;
    std::optional<std::size_t> index_;
};

} // namespace qpa
