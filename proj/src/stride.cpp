#include "icsthreat/stride.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <tuple>

#include "json_util.hpp"
#include "text_util.hpp"

namespace icsthreat {

using detail::Json;
using detail::OrderedJson;

std::string_view token(StrideCategory category)
{
    switch (category) {
    case StrideCategory::Spoofing: return "spoofing";
    case StrideCategory::Tampering: return "tampering";
    case StrideCategory::Repudiation: return "repudiation";
    case StrideCategory::InformationDisclosure: return "information_disclosure";
    case StrideCategory::DenialOfService: return "denial_of_service";
    case StrideCategory::ElevationOfPrivilege: return "elevation_of_privilege";
    }
    return "spoofing";
}

std::string_view display_name(StrideCategory category)
{
    switch (category) {
    case StrideCategory::Spoofing: return "Spoofing";
    case StrideCategory::Tampering: return "Tampering";
    case StrideCategory::Repudiation: return "Repudiation";
    case StrideCategory::InformationDisclosure: return "Information Disclosure";
    case StrideCategory::DenialOfService: return "Denial Of Service";
    case StrideCategory::ElevationOfPrivilege: return "Elevation Of Privilege";
    }
    return "Spoofing";
}

std::string_view camel_name(StrideCategory category)
{
    switch (category) {
    case StrideCategory::Spoofing: return "Spoofing";
    case StrideCategory::Tampering: return "Tampering";
    case StrideCategory::Repudiation: return "Repudiation";
    case StrideCategory::InformationDisclosure: return "InformationDisclosure";
    case StrideCategory::DenialOfService: return "DenialOfService";
    case StrideCategory::ElevationOfPrivilege: return "ElevationOfPrivilege";
    }
    return "Spoofing";
}

std::string_view definition(StrideCategory category)
{
    switch (category) {
    case StrideCategory::Spoofing: return "Disguising the real identity to appear as trusted source";
    case StrideCategory::Tampering: return "Modifying data without permission";
    case StrideCategory::Repudiation: return "Denying taking part in a transaction falsely";
    case StrideCategory::InformationDisclosure: return "Revealing sensitive data to unauthorized entities";
    case StrideCategory::DenialOfService: return "Denying access to resource or data";
    case StrideCategory::ElevationOfPrivilege: return "Gaining unauthorized access of elevated rights";
    }
    return "";
}

std::optional<StrideCategory> parse_category(std::string_view text)
{
    const std::string folded = detail::fold_label(text);
    for (StrideCategory c : kStrideOrder) {
        if (folded == detail::fold_label(token(c))) {
            return c;
        }
    }
    return std::nullopt;
}

bool ThreatRule::matches(const Element& source, const Element& target, bool crossing) const
{
    if (source_kind && *source_kind != source.kind) {
        return false;
    }
    if (target_kind && *target_kind != target.kind) {
        return false;
    }
    switch (requires_boundary_crossing) {
    case Crossing::Yes: return crossing;
    case Crossing::No: return !crossing;
    case Crossing::Any: return true;
    }
    return true;
}

namespace {

std::optional<ElementKind> read_kind(const Json& rule, const char* key, const std::string& path)
{
    std::string text = detail::require_string(rule, key, path);
    if (text == "*" || text == "any") {
        return std::nullopt;
    }
    auto kind = parse_element_kind(text);
    if (!kind) {
        detail::schema_error(path + "." + key, "unknown element kind '" + text + "'");
    }
    return kind;
}

Crossing read_crossing(const Json& rule, const std::string& path)
{
    std::string text = detail::optional_string(rule, "requires_boundary_crossing", path);
    if (text.empty() || text == "any") return Crossing::Any;
    if (text == "yes") return Crossing::Yes;
    if (text == "no") return Crossing::No;
    detail::schema_error(path + ".requires_boundary_crossing", "expected yes, no or any");
}

void check_template(const std::string& text, const std::string& path)
{
    std::size_t pos = 0;
    while ((pos = text.find_first_of("{}", pos)) != std::string::npos) {
        if (text[pos] == '}') {
            detail::schema_error(path, "unbalanced '}' in template");
        }
        std::size_t close = text.find('}', pos);
        if (close == std::string::npos) {
            detail::schema_error(path, "unterminated placeholder in template");
        }
        std::string name = text.substr(pos + 1, close - pos - 1);
        if (name != "source" && name != "target" && name != "flow") {
            detail::schema_error(path, "unknown placeholder {" + name + "}");
        }
        pos = close + 1;
    }
}

std::string expand(const std::string& text, const Element& source, const Element& target, const Flow& flow)
{
    std::string out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t open = text.find('{', pos);
        if (open == std::string::npos) {
            out.append(text, pos, std::string::npos);
            break;
        }
        out.append(text, pos, open - pos);
        std::size_t close = text.find('}', open);
        std::string name = text.substr(open + 1, close - open - 1);
        if (name == "source") {
            out += source.name.empty() ? source.id : source.name;
        } else if (name == "target") {
            out += target.name.empty() ? target.id : target.name;
        } else {
            out += flow.id;
        }
        pos = close + 1;
    }
    return out;
}

} // namespace

RuleSet load_rules(std::string_view text)
{
    Json root = detail::parse_json(text, "rules");
    if (!root.is_array()) {
        detail::schema_error("", "rule file must be a JSON array");
    }
    RuleSet rules;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < root.size(); ++i) {
        const std::string path = detail::index_path("rules", i);
        const Json& json = root[i];
        detail::require_object(json, path);
        detail::check_keys(json,
                           {"rule_id", "category", "source_kind", "target_kind", "requires_boundary_crossing",
                            "title_template", "description_template"},
                           path);
        ThreatRule rule;
        rule.rule_id = detail::require_string(json, "rule_id", path);
        if (rule.rule_id.empty()) {
            detail::schema_error(path + ".rule_id", "must not be empty");
        }
        std::string category = detail::require_string(json, "category", path);
        auto parsed = parse_category(category);
        if (!parsed) {
            detail::schema_error(path + ".category", "unknown STRIDE category '" + category + "'");
        }
        rule.category = *parsed;
        rule.source_kind = read_kind(json, "source_kind", path);
        rule.target_kind = read_kind(json, "target_kind", path);
        rule.requires_boundary_crossing = read_crossing(json, path);
        rule.title_template = detail::require_string(json, "title_template", path);
        rule.description_template = detail::optional_string(json, "description_template", path);
        check_template(rule.title_template, path + ".title_template");
        check_template(rule.description_template, path + ".description_template");
        if (!seen.insert(rule.rule_id).second) {
            throw Error(ErrorCode::DupRule, "duplicate rule_id '" + rule.rule_id + "'");
        }
        rules.push_back(std::move(rule));
    }
    return rules;
}

bool canonical_less(const Threat& a, const Threat& b)
{
    return std::tie(a.interaction, a.category, a.rule_id) < std::tie(b.interaction, b.category, b.rule_id);
}

ThreatSet enumerate_threats(const SystemModel& model, const RuleSet& rules)
{
    require_valid(model);
    ThreatSet out;
    out.model_name = model.name;
    for (const auto& flow : model.flows) {
        const Element& source = *model.find_element(flow.source);
        const Element& target = *model.find_element(flow.target);
        const bool crossing = crosses_boundary(model, flow);
        for (const auto& rule : rules) {
            if (!rule.matches(source, target, crossing)) {
                continue;
            }
            Threat threat;
            threat.threat_id = rule.rule_id + ":" + flow.id;
            threat.category = rule.category;
            threat.interaction = flow.id;
            threat.attributed_asset = rule.category == StrideCategory::Spoofing ? source.id : target.id;
            threat.rule_id = rule.rule_id;
            threat.title = expand(rule.title_template, source, target, flow);
            threat.description = expand(rule.description_template, source, target, flow);
            out.threats.push_back(std::move(threat));
        }
    }
    std::sort(out.threats.begin(), out.threats.end(), canonical_less);
    return out;
}

std::array<CategoryCount, 6> summarize_by_category(const ThreatSet& threats)
{
    std::array<CategoryCount, 6> rows{};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i] = {kSummaryOrder[i], 0};
    }
    for (const auto& t : threats.threats) {
        for (auto& row : rows) {
            if (row.category == t.category) {
                ++row.count;
            }
        }
    }
    return rows;
}

std::map<std::string, std::size_t> summarize_by_asset(const ThreatSet& threats)
{
    std::map<std::string, std::size_t> counts;
    for (const auto& t : threats.threats) {
        ++counts[t.attributed_asset];
    }
    return counts;
}

std::string render_threats_json(const ThreatSet& threats)
{
    OrderedJson root;
    root["model"] = threats.model_name;
    root["count"] = threats.size();
    root["threats"] = OrderedJson::array();
    for (const auto& t : threats.threats) {
        OrderedJson j;
        j["threat_id"] = t.threat_id;
        j["category"] = std::string(token(t.category));
        j["interaction"] = t.interaction;
        j["asset"] = t.attributed_asset;
        j["rule_id"] = t.rule_id;
        j["title"] = t.title;
        j["description"] = t.description;
        root["threats"].push_back(std::move(j));
    }
    return detail::dump_canonical(root);
}

std::string render_threats_markdown(const ThreatSet& threats)
{
    std::ostringstream out;
    out << "# Threats: " << threats.model_name << "\n\n";
    out << threats.size() << " threat(s)\n\n";
    out << "| Threat | Category | Interaction | Asset | Title |\n";
    out << "|---|---|---|---|---|\n";
    for (const auto& t : threats.threats) {
        out << "| " << detail::md_cell(t.threat_id) << " | " << token(t.category) << " | "
            << detail::md_cell(t.interaction) << " | " << detail::md_cell(t.attributed_asset) << " | "
            << detail::md_cell(t.title) << " |\n";
    }
    return out.str();
}

} // namespace icsthreat
