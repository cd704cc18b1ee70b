#pragma once

#include <algorithm>
#include <string>
#include <vector>

namespace regcap {

enum class IssueCode {
    // graph structure
    DuplicateNodeId,
    UnknownNodeId,
    SelfLoop,
    LayerOrderViolation,
    DuplicateEdge,
    AttrMissing,
    AttrUnexpected,
    AttrOutOfRange,
    ThresholdOrder,
    UnreachableCapability,
    EquipmentWithoutResource,
    ZeroWeightSum,
    // scenario
    GridTooCoarse,
    UnknownSignal,
    DuplicateSignalName,
    InvalidSignal,
    InvalidEvent,
    InvalidDynamics,
    InvalidPiecewise,
    PiecewiseDiscontinuity,
    MissingPiecewiseParams,
};

inline const char* to_string(IssueCode code) {
    switch (code) {
        case IssueCode::DuplicateNodeId: return "DuplicateNodeId";
        case IssueCode::UnknownNodeId: return "UnknownNodeId";
        case IssueCode::SelfLoop: return "SelfLoop";
        case IssueCode::LayerOrderViolation: return "LayerOrderViolation";
        case IssueCode::DuplicateEdge: return "DuplicateEdge";
        case IssueCode::AttrMissing: return "AttrMissing";
        case IssueCode::AttrUnexpected: return "AttrUnexpected";
        case IssueCode::AttrOutOfRange: return "AttrOutOfRange";
        case IssueCode::ThresholdOrder: return "ThresholdOrder";
        case IssueCode::UnreachableCapability: return "UnreachableCapability";
        case IssueCode::EquipmentWithoutResource: return "EquipmentWithoutResource";
        case IssueCode::ZeroWeightSum: return "ZeroWeightSum";
        case IssueCode::GridTooCoarse: return "GridTooCoarse";
        case IssueCode::UnknownSignal: return "UnknownSignal";
        case IssueCode::DuplicateSignalName: return "DuplicateSignalName";
        case IssueCode::InvalidSignal: return "InvalidSignal";
        case IssueCode::InvalidEvent: return "InvalidEvent";
        case IssueCode::InvalidDynamics: return "InvalidDynamics";
        case IssueCode::InvalidPiecewise: return "InvalidPiecewise";
        case IssueCode::PiecewiseDiscontinuity: return "PiecewiseDiscontinuity";
        case IssueCode::MissingPiecewiseParams: return "MissingPiecewiseParams";
    }
    return "UnknownIssue";
}

struct Issue {
    IssueCode code;
    std::string message;
};

/// Aggregated outcome of graph/scenario validation. Errors block a run,
/// warnings do not.
struct ValidationReport {
    std::vector<Issue> errors;
    std::vector<Issue> warnings;

    bool ok() const { return errors.empty(); }

    void error(IssueCode code, std::string message) { errors.push_back({code, std::move(message)}); }
    void warn(IssueCode code, std::string message) { warnings.push_back({code, std::move(message)}); }

    bool has_error(IssueCode code) const {
        return std::any_of(errors.begin(), errors.end(), [&](const Issue& i) { return i.code == code; });
    }
    bool has_warning(IssueCode code) const {
        return std::any_of(warnings.begin(), warnings.end(), [&](const Issue& i) { return i.code == code; });
    }

    void merge(const ValidationReport& other) {
        errors.insert(errors.end(), other.errors.begin(), other.errors.end());
        warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
    }

    std::string to_string() const {
        std::string out;
        for (const auto& e : errors) {
            out += "error: ";
            out += regcap::to_string(e.code);
            out += ": " + e.message + "\n";
        }
        for (const auto& w : warnings) {
            out += "warning: ";
            out += regcap::to_string(w.code);
            out += ": " + w.message + "\n";
        }
        return out;
    }
};

}  // namespace regcap
