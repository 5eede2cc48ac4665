#include "icsthreat/model.hpp"

#include <algorithm>
#include <set>

#include "json_util.hpp"
#include "text_util.hpp"

namespace icsthreat {

using detail::Json;
using detail::OrderedJson;

namespace {

PurdueLevel read_level(const Json& element, const std::string& path)
{
    const Json& value = detail::require(element, "purdue_level", path);
    if (value.is_number_integer()) {
        return PurdueLevel::level(value.get<int>());
    }
    if (value.is_string() && detail::to_lower(value.get<std::string>()) == "dmz") {
        return PurdueLevel::dmz();
    }
    detail::schema_error(path + ".purdue_level", "expected an integer level or \"DMZ\"");
}

Element read_element(const Json& json, const std::string& path)
{
    detail::require_object(json, path);
    detail::check_keys(json, {"id", "name", "kind", "purdue_level", "zone", "gateway"}, path);
    Element element;
    element.id = detail::require_string(json, "id", path);
    element.name = detail::require_string(json, "name", path);
    std::string kind = detail::require_string(json, "kind", path);
    auto parsed = parse_element_kind(kind);
    if (!parsed) {
        detail::schema_error(path + ".kind", "unknown element kind '" + kind + "'");
    }
    element.kind = *parsed;
    element.purdue_level = read_level(json, path);
    element.zone = detail::optional_string(json, "zone", path);
    element.gateway = detail::optional_bool(json, "gateway", path);
    return element;
}

Flow read_flow(const Json& json, const std::string& path)
{
    detail::require_object(json, path);
    detail::check_keys(json, {"id", "source", "target", "protocol", "data_class", "self_loop"}, path);
    Flow flow;
    flow.source = detail::require_string(json, "source", path);
    flow.target = detail::require_string(json, "target", path);
    flow.id = detail::optional_string(json, "id", path);
    if (flow.id.empty()) {
        flow.id = default_flow_id(flow.source, flow.target);
    }
    flow.protocol = detail::optional_string(json, "protocol", path);
    flow.data_class = detail::optional_string(json, "data_class", path);
    flow.self_loop = detail::optional_bool(json, "self_loop", path);
    return flow;
}

TrustBoundary read_boundary(const Json& json, const std::string& path)
{
    detail::require_object(json, path);
    detail::check_keys(json, {"id", "name", "members"}, path);
    TrustBoundary boundary;
    boundary.id = detail::require_string(json, "id", path);
    boundary.name = detail::require_string(json, "name", path);
    boundary.members = detail::require_string_array(json, "members", path);
    return boundary;
}

template <typename T>
void reject_duplicates(const std::vector<T>& items, std::string_view what)
{
    std::set<std::string> seen;
    for (const auto& item : items) {
        if (!seen.insert(item.id).second) {
            throw Error(ErrorCode::DupId, "duplicate " + std::string(what) + " id '" + item.id + "'");
        }
    }
}

} // namespace

SystemModel parse_model(std::string_view text)
{
    Json root = detail::parse_json(text, "model");
    detail::require_object(root, "");
    detail::check_keys(root, {"name", "elements", "flows", "boundaries"}, "");

    SystemModel model;
    model.name = detail::require_string(root, "name", "");
    if (root.contains("elements")) {
        const Json& elements = detail::require_array(root, "elements", "");
        for (std::size_t i = 0; i < elements.size(); ++i) {
            model.elements.push_back(read_element(elements[i], detail::index_path("elements", i)));
        }
    }
    if (root.contains("flows")) {
        const Json& flows = detail::require_array(root, "flows", "");
        for (std::size_t i = 0; i < flows.size(); ++i) {
            model.flows.push_back(read_flow(flows[i], detail::index_path("flows", i)));
        }
    }
    if (root.contains("boundaries")) {
        const Json& boundaries = detail::require_array(root, "boundaries", "");
        for (std::size_t i = 0; i < boundaries.size(); ++i) {
            model.boundaries.push_back(read_boundary(boundaries[i], detail::index_path("boundaries", i)));
        }
    }
    reject_duplicates(model.elements, "element");
    reject_duplicates(model.flows, "flow");
    reject_duplicates(model.boundaries, "boundary");
    return model;
}

std::string render_model(const SystemModel& input)
{
    SystemModel model = canonicalize(input);
    OrderedJson root;
    root["name"] = model.name;

    root["elements"] = OrderedJson::array();
    for (const auto& e : model.elements) {
        OrderedJson j;
        j["id"] = e.id;
        j["name"] = e.name;
        j["kind"] = std::string(to_string(e.kind));
        if (e.purdue_level.is_dmz()) {
            j["purdue_level"] = "DMZ";
        } else {
            j["purdue_level"] = e.purdue_level.value();
        }
        if (!e.zone.empty()) {
            j["zone"] = e.zone;
        }
        if (e.gateway) {
            j["gateway"] = true;
        }
        root["elements"].push_back(std::move(j));
    }

    root["flows"] = OrderedJson::array();
    for (const auto& f : model.flows) {
        OrderedJson j;
        j["id"] = f.id;
        j["source"] = f.source;
        j["target"] = f.target;
        if (!f.protocol.empty()) {
            j["protocol"] = f.protocol;
        }
        if (!f.data_class.empty()) {
            j["data_class"] = f.data_class;
        }
        if (f.self_loop) {
            j["self_loop"] = true;
        }
        root["flows"].push_back(std::move(j));
    }

    root["boundaries"] = OrderedJson::array();
    for (const auto& b : model.boundaries) {
        OrderedJson j;
        j["id"] = b.id;
        j["name"] = b.name;
        j["members"] = b.members;
        root["boundaries"].push_back(std::move(j));
    }
    return detail::dump_canonical(root);
}

} // namespace icsthreat
