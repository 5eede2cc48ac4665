#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace icsthreat {

enum class ElementKind { Process, ExternalEntity, DataStore };

std::string_view to_string(ElementKind kind);
std::optional<ElementKind> parse_element_kind(std::string_view text);

// Purdue level 0..5 or the DMZ between levels 3 and 4. Out-of-range integers
// are representable so that the validator can report them.
class PurdueLevel {
public:
    static PurdueLevel level(int value) { return PurdueLevel(value, false); }
    static PurdueLevel dmz() { return PurdueLevel(0, true); }

    bool is_dmz() const { return dmz_; }
    int value() const { return value_; }
    bool in_range() const { return dmz_ || (value_ >= 0 && value_ <= 5); }
    std::string to_string() const;

    friend bool operator==(const PurdueLevel&, const PurdueLevel&) = default;

private:
    PurdueLevel(int value, bool dmz) : value_(value), dmz_(dmz) {}
    int value_;
    bool dmz_;
};

struct Element {
    std::string id;
    std::string name;
    ElementKind kind = ElementKind::Process;
    PurdueLevel purdue_level = PurdueLevel::level(0);
    std::string zone;
    bool gateway = false; // drawn as a circle: interfaces several devices

    friend bool operator==(const Element&, const Element&) = default;
};

struct Flow {
    std::string id;
    std::string source;
    std::string target;
    std::string protocol;
    std::string data_class;
    bool self_loop = false;

    friend bool operator==(const Flow&, const Flow&) = default;
};

std::string default_flow_id(std::string_view source, std::string_view target);

struct TrustBoundary {
    std::string id;
    std::string name;
    std::vector<std::string> members;

    friend bool operator==(const TrustBoundary&, const TrustBoundary&) = default;
};

struct SystemModel {
    std::string name;
    std::vector<Element> elements;
    std::vector<Flow> flows;
    std::vector<TrustBoundary> boundaries;

    const Element* find_element(std::string_view id) const;
    const Flow* find_flow(std::string_view id) const;

    friend bool operator==(const SystemModel&, const SystemModel&) = default;
};

/// Copy with elements, flows, boundaries and boundary members sorted by id.
SystemModel canonicalize(SystemModel model);

/// Equality up to declaration order.
bool structurally_equal(const SystemModel& a, const SystemModel& b);

// ---------------------------------------------------------------------------
// Serialization

/// Parses the JSON model document. Referential errors are left to
/// validate_model; duplicate ids are rejected here (DUP_ID).
SystemModel parse_model(std::string_view text);

/// Canonical writer: fixed key order, arrays sorted by id, two-space indent,
/// trailing newline.
std::string render_model(const SystemModel& model);

// ---------------------------------------------------------------------------
// Validation

enum class IssueCode { BadId, DupId, LevelRange, RefUnknown, SelfLoop, EmptyBoundary };
enum class Severity { Error, Warning };

std::string_view to_string(IssueCode code);
std::string_view to_string(Severity severity);

struct ValidationIssue {
    IssueCode code;
    Severity severity;
    std::string subject;
    std::string message;

    friend bool operator==(const ValidationIssue&, const ValidationIssue&) = default;
};

using ValidationReport = std::vector<ValidationIssue>;

ValidationReport validate_model(const SystemModel& model);

/// Throws Error(INVALID_MODEL) listing the first issues when the model is invalid.
void require_valid(const SystemModel& model);

// ---------------------------------------------------------------------------
// Analysis

struct AssetInventory {
    std::vector<std::string> external_actors;
    std::vector<std::string> processes;
    std::vector<std::string> data_stores;
    std::vector<std::string> flows;
    std::vector<std::string> interfaces;
};

AssetInventory identify_assets(const SystemModel& model);

/// Flow ids whose endpoints belong to different boundary membership sets, in
/// declaration order. An element outside every boundary is its own zone.
std::vector<std::string> trust_boundary_crossings(const SystemModel& model);

bool crosses_boundary(const SystemModel& model, const Flow& flow);

enum class PurdueCode { LevelSkip, NoDmz };

std::string_view to_string(PurdueCode code);

struct PurdueIssue {
    std::string flow_id;
    PurdueCode code;

    friend bool operator==(const PurdueIssue&, const PurdueIssue&) = default;
};

/// Sorted by flow id, then code, so the result does not depend on declaration order.
std::vector<PurdueIssue> purdue_check(const SystemModel& model);

std::string export_dot(const SystemModel& model);

} // namespace icsthreat
