#include "icsthreat/model.hpp"

#include <algorithm>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include "icsthreat/error.hpp"
#include "text_util.hpp"

namespace icsthreat {

std::string_view to_string(ElementKind kind)
{
    switch (kind) {
    case ElementKind::Process: return "process";
    case ElementKind::ExternalEntity: return "external_entity";
    case ElementKind::DataStore: return "data_store";
    }
    return "process";
}

std::optional<ElementKind> parse_element_kind(std::string_view text)
{
    if (text == "process") return ElementKind::Process;
    if (text == "external_entity") return ElementKind::ExternalEntity;
    if (text == "data_store") return ElementKind::DataStore;
    return std::nullopt;
}

std::string PurdueLevel::to_string() const
{
    return dmz_ ? "DMZ" : "L" + std::to_string(value_);
}

std::string default_flow_id(std::string_view source, std::string_view target)
{
    return std::string(source) + "_to_" + std::string(target);
}

const Element* SystemModel::find_element(std::string_view id) const
{
    auto it = std::find_if(elements.begin(), elements.end(), [&](const Element& e) { return e.id == id; });
    return it == elements.end() ? nullptr : &*it;
}

const Flow* SystemModel::find_flow(std::string_view id) const
{
    auto it = std::find_if(flows.begin(), flows.end(), [&](const Flow& f) { return f.id == id; });
    return it == flows.end() ? nullptr : &*it;
}

SystemModel canonicalize(SystemModel model)
{
    auto by_id = [](const auto& a, const auto& b) { return a.id < b.id; };
    std::sort(model.elements.begin(), model.elements.end(), by_id);
    std::sort(model.flows.begin(), model.flows.end(), by_id);
    std::sort(model.boundaries.begin(), model.boundaries.end(), by_id);
    for (auto& b : model.boundaries) {
        std::sort(b.members.begin(), b.members.end());
    }
    return model;
}

bool structurally_equal(const SystemModel& a, const SystemModel& b)
{
    return canonicalize(a) == canonicalize(b);
}

// ---------------------------------------------------------------------------

std::string_view to_string(IssueCode code)
{
    switch (code) {
    case IssueCode::BadId: return "BAD_ID";
    case IssueCode::DupId: return "DUP_ID";
    case IssueCode::LevelRange: return "LEVEL_RANGE";
    case IssueCode::RefUnknown: return "REF_UNKNOWN";
    case IssueCode::SelfLoop: return "SELF_LOOP";
    case IssueCode::EmptyBoundary: return "EMPTY_BOUNDARY";
    }
    return "UNKNOWN";
}

std::string_view to_string(Severity severity)
{
    return severity == Severity::Error ? "error" : "warning";
}

namespace {

bool valid_token(std::string_view id)
{
    static const std::regex pattern("[a-z][a-z0-9_]*");
    return std::regex_match(id.begin(), id.end(), pattern);
}

} // namespace

ValidationReport validate_model(const SystemModel& model)
{
    ValidationReport issues;
    auto add = [&](IssueCode code, const std::string& subject, std::string message) {
        issues.push_back({code, Severity::Error, subject, std::move(message)});
    };

    std::set<std::string> element_ids;
    for (const auto& e : model.elements) {
        if (!valid_token(e.id)) {
            add(IssueCode::BadId, e.id, "element id must match [a-z][a-z0-9_]*");
        }
        if (!element_ids.insert(e.id).second) {
            add(IssueCode::DupId, e.id, "duplicate element id");
        }
        if (!e.purdue_level.in_range()) {
            add(IssueCode::LevelRange, e.id,
                "purdue level " + std::to_string(e.purdue_level.value()) + " outside 0-5/DMZ");
        }
    }

    std::set<std::string> flow_ids;
    for (const auto& f : model.flows) {
        if (!valid_token(f.id)) {
            add(IssueCode::BadId, f.id, "flow id must match [a-z][a-z0-9_]*");
        }
        if (!flow_ids.insert(f.id).second) {
            add(IssueCode::DupId, f.id, "duplicate flow id");
        }
        for (const std::string* end : {&f.source, &f.target}) {
            if (!element_ids.contains(*end)) {
                add(IssueCode::RefUnknown, *end, "flow '" + f.id + "' references undeclared element");
            }
        }
        if (f.source == f.target && !f.self_loop) {
            add(IssueCode::SelfLoop, f.id, "source equals target without self_loop");
        }
    }

    std::set<std::string> boundary_ids;
    for (const auto& b : model.boundaries) {
        if (!valid_token(b.id)) {
            add(IssueCode::BadId, b.id, "boundary id must match [a-z][a-z0-9_]*");
        }
        if (!boundary_ids.insert(b.id).second) {
            add(IssueCode::DupId, b.id, "duplicate boundary id");
        }
        if (b.members.empty()) {
            add(IssueCode::EmptyBoundary, b.id, "boundary has no members");
        }
        for (const auto& m : b.members) {
            if (!element_ids.contains(m)) {
                add(IssueCode::RefUnknown, m, "boundary '" + b.id + "' references undeclared element");
            }
        }
    }
    return issues;
}

void require_valid(const SystemModel& model)
{
    ValidationReport issues = validate_model(model);
    if (issues.empty()) {
        return;
    }
    std::string message = "model '" + model.name + "' has " + std::to_string(issues.size()) + " issue(s)";
    for (std::size_t i = 0; i < issues.size() && i < 3; ++i) {
        message += "; " + std::string(to_string(issues[i].code)) + "(" + issues[i].subject + ")";
    }
    throw Error(ErrorCode::InvalidModel, message);
}

// ---------------------------------------------------------------------------

AssetInventory identify_assets(const SystemModel& model)
{
    require_valid(model);
    AssetInventory inventory;
    for (const auto& e : model.elements) {
        switch (e.kind) {
        case ElementKind::ExternalEntity: inventory.external_actors.push_back(e.id); break;
        case ElementKind::Process: inventory.processes.push_back(e.id); break;
        case ElementKind::DataStore: inventory.data_stores.push_back(e.id); break;
        }
    }
    for (const auto& f : model.flows) {
        inventory.flows.push_back(f.id);
    }
    inventory.interfaces = trust_boundary_crossings(model);
    return inventory;
}

namespace {

std::set<std::string> membership(const SystemModel& model, const std::string& element)
{
    std::set<std::string> zones;
    for (const auto& b : model.boundaries) {
        if (std::find(b.members.begin(), b.members.end(), element) != b.members.end()) {
            zones.insert(b.id);
        }
    }
    if (zones.empty()) {
        // '#' cannot appear in a boundary id, so implicit zones never collide.
        zones.insert("#" + element);
    }
    return zones;
}

} // namespace

bool crosses_boundary(const SystemModel& model, const Flow& flow)
{
    if (model.boundaries.empty()) {
        return false;
    }
    return membership(model, flow.source) != membership(model, flow.target);
}

std::vector<std::string> trust_boundary_crossings(const SystemModel& model)
{
    std::vector<std::string> out;
    for (const auto& f : model.flows) {
        if (crosses_boundary(model, f)) {
            out.push_back(f.id);
        }
    }
    return out;
}

std::string_view to_string(PurdueCode code)
{
    return code == PurdueCode::LevelSkip ? "LEVEL_SKIP" : "NO_DMZ";
}

std::vector<PurdueIssue> purdue_check(const SystemModel& model)
{
    std::vector<PurdueIssue> issues;
    for (const auto& f : model.flows) {
        const Element* source = model.find_element(f.source);
        const Element* target = model.find_element(f.target);
        if (source == nullptr || target == nullptr) {
            continue;
        }
        const PurdueLevel& a = source->purdue_level;
        const PurdueLevel& b = target->purdue_level;
        if (a.is_dmz() || b.is_dmz()) {
            continue;
        }
        if (std::abs(a.value() - b.value()) > 1) {
            issues.push_back({f.id, PurdueCode::LevelSkip});
        }
        int high = std::max(a.value(), b.value());
        int low = std::min(a.value(), b.value());
        if (high >= 4 && low <= 3) {
            issues.push_back({f.id, PurdueCode::NoDmz});
        }
    }
    std::sort(issues.begin(), issues.end(), [](const PurdueIssue& x, const PurdueIssue& y) {
        return std::tie(x.flow_id, x.code) < std::tie(y.flow_id, y.code);
    });
    return issues;
}

// ---------------------------------------------------------------------------

std::string export_dot(const SystemModel& input)
{
    SystemModel model = canonicalize(input);
    std::ostringstream out;
    out << "digraph " << detail::dot_quote(model.name) << " {\n";
    out << "  rankdir=LR;\n";

    auto node_line = [](const Element& e) {
        std::string label = (e.name.empty() ? e.id : e.name) + "\n" + e.purdue_level.to_string();
        return detail::dot_quote(e.id) + " [label=" + detail::dot_quote(label) +
               ", shape=" + (e.gateway ? "circle" : "box") + "];";
    };

    // An element listed in several boundaries is drawn in the first (by id).
    std::map<std::string, std::string> home;
    for (const auto& b : model.boundaries) {
        for (const auto& m : b.members) {
            home.emplace(m, b.id);
        }
    }

    for (const auto& b : model.boundaries) {
        out << "  subgraph " << detail::dot_quote("cluster_" + b.id) << " {\n";
        out << "    label=" << detail::dot_quote(b.name) << ";\n";
        for (const auto& e : model.elements) {
            auto it = home.find(e.id);
            if (it != home.end() && it->second == b.id) {
                out << "    " << node_line(e) << "\n";
            }
        }
        out << "  }\n";
    }
    for (const auto& e : model.elements) {
        if (!home.contains(e.id)) {
            out << "  " << node_line(e) << "\n";
        }
    }
    for (const auto& f : model.flows) {
        out << "  " << detail::dot_quote(f.source) << " -> " << detail::dot_quote(f.target)
            << " [label=" << detail::dot_quote(f.id) << "];\n";
    }
    out << "}\n";
    return out.str();
}

} // namespace icsthreat
