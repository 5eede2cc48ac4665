#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "icsthreat/model.hpp"

namespace icsthreat {

// Declaration order is the STRIDE order, which is also the tie-break order
// used when ranking threats.
enum class StrideCategory {
    Spoofing,
    Tampering,
    Repudiation,
    InformationDisclosure,
    DenialOfService,
    ElevationOfPrivilege,
};

inline constexpr std::array<StrideCategory, 6> kStrideOrder = {
    StrideCategory::Spoofing,        StrideCategory::Tampering,       StrideCategory::Repudiation,
    StrideCategory::InformationDisclosure, StrideCategory::DenialOfService, StrideCategory::ElevationOfPrivilege,
};

/// Alphabetical by display name, the row order of the summary tables.
inline constexpr std::array<StrideCategory, 6> kSummaryOrder = {
    StrideCategory::DenialOfService, StrideCategory::ElevationOfPrivilege, StrideCategory::InformationDisclosure,
    StrideCategory::Repudiation,     StrideCategory::Spoofing,             StrideCategory::Tampering,
};

/// Snake-case token used in files and machine output, e.g. "denial_of_service".
std::string_view token(StrideCategory category);
/// Table label, e.g. "Denial Of Service".
std::string_view display_name(StrideCategory category);
/// CamelCase name used in report JSON, e.g. "DenialOfService".
std::string_view camel_name(StrideCategory category);
/// One-line meaning of the category.
std::string_view definition(StrideCategory category);
/// Accepts the token, the CamelCase name, or the display name.
std::optional<StrideCategory> parse_category(std::string_view text);

enum class Crossing { Yes, No, Any };

struct ThreatRule {
    std::string rule_id;
    StrideCategory category = StrideCategory::Spoofing;
    std::optional<ElementKind> source_kind; // nullopt matches any kind
    std::optional<ElementKind> target_kind;
    Crossing requires_boundary_crossing = Crossing::Any;
    std::string title_template;
    std::string description_template;

    bool matches(const Element& source, const Element& target, bool crossing) const;
};

using RuleSet = std::vector<ThreatRule>;

/// JSON array of rule objects. DUP_RULE on a repeated rule_id; PARSE_ERROR on
/// schema problems or templates using placeholders other than
/// {source}, {target}, {flow}.
RuleSet load_rules(std::string_view text);

struct Threat {
    std::string threat_id; // "<rule_id>:<flow id>"
    StrideCategory category = StrideCategory::Spoofing;
    std::string interaction; // flow id
    std::string attributed_asset;
    std::string rule_id;
    std::string title;
    std::string description;

    friend bool operator==(const Threat&, const Threat&) = default;
};

/// Canonical order: interaction, then category (STRIDE order), then rule id.
bool canonical_less(const Threat& a, const Threat& b);

struct ThreatSet {
    std::string model_name;
    std::vector<Threat> threats;

    std::size_t size() const { return threats.size(); }
    bool empty() const { return threats.empty(); }
};

/// One threat per (flow, matching rule). Spoofing is attributed to the flow
/// source, every other category to the flow target. Throws INVALID_MODEL.
ThreatSet enumerate_threats(const SystemModel& model, const RuleSet& rules);

struct CategoryCount {
    StrideCategory category;
    std::size_t count;
};

/// Six rows in kSummaryOrder.
std::array<CategoryCount, 6> summarize_by_category(const ThreatSet& threats);

std::map<std::string, std::size_t> summarize_by_asset(const ThreatSet& threats);

/// Canonical JSON listing (two-space indent, trailing newline).
std::string render_threats_json(const ThreatSet& threats);
/// Markdown pipe table of the same listing.
std::string render_threats_markdown(const ThreatSet& threats);

} // namespace icsthreat
