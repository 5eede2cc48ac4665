#include "icsthreat/attack_graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <set>
#include <sstream>
#include <tuple>
#include <utility>

#include "icsthreat/error.hpp"
#include "json_util.hpp"
#include "text_util.hpp"

namespace icsthreat {

using detail::Json;

namespace {

std::optional<int> canonical_column(std::string_view tactic)
{
    for (std::size_t i = 0; i < kTacticNames.size(); ++i) {
        if (kTacticNames[i] == tactic) {
            return static_cast<int>(i);
        }
    }
    return std::nullopt;
}

int require_column(std::string_view tactic)
{
    auto column = canonical_column(tactic);
    if (!column) {
        throw Error(ErrorCode::BadTactic, "unknown tactic '" + std::string(tactic) + "'");
    }
    return *column;
}

} // namespace

bool technique_less(const Technique& a, const Technique& b)
{
    return std::tie(a.column, a.name) < std::tie(b.column, b.name);
}

AttackMatrix::AttackMatrix(std::vector<Tactic> tactics, std::vector<Technique> techniques)
    : tactics_(std::move(tactics)), techniques_(std::move(techniques))
{
    std::sort(tactics_.begin(), tactics_.end(), [](const Tactic& a, const Tactic& b) { return a.column < b.column; });
    std::sort(techniques_.begin(), techniques_.end(), technique_less);
}

const Tactic& AttackMatrix::tactic(std::string_view name) const
{
    for (const auto& t : tactics_) {
        if (t.name == name) {
            return t;
        }
    }
    throw Error(ErrorCode::BadTactic, "unknown tactic '" + std::string(name) + "'");
}

const Technique& AttackMatrix::technique(std::string_view name) const
{
    for (const auto& t : techniques_) {
        if (t.name == name) {
            return t;
        }
    }
    throw Error(ErrorCode::UnknownTechnique, "no technique named '" + std::string(name) + "'");
}

std::vector<Technique> AttackMatrix::techniques_named(std::string_view name) const
{
    std::vector<Technique> out;
    for (const auto& t : techniques_) {
        if (t.name == name) {
            out.push_back(t);
        }
    }
    return out;
}

std::size_t AttackMatrix::technique_count(std::string_view tactic) const
{
    return static_cast<std::size_t>(
        std::count_if(techniques_.begin(), techniques_.end(), [&](const Technique& t) { return t.tactic == tactic; }));
}

AttackMatrix load_attack_matrix(std::string_view text)
{
    Json root = detail::parse_json(text, "attack matrix");
    detail::require_object(root, "");
    detail::check_keys(root, {"tactics", "techniques"}, "");

    std::vector<Tactic> tactics;
    std::set<std::string> declared;
    for (const auto& name : detail::require_string_array(root, "tactics", "")) {
        int column = require_column(name);
        if (!declared.insert(name).second) {
            detail::schema_error("tactics", "tactic '" + name + "' listed twice");
        }
        tactics.push_back({name, column});
    }
    if (tactics.size() != kTacticNames.size()) {
        detail::schema_error("tactics", "expected " + std::to_string(kTacticNames.size()) + " tactics, found " +
                                            std::to_string(tactics.size()));
    }

    std::vector<Technique> techniques;
    std::set<std::pair<std::string, std::string>> seen;
    const Json& list = detail::require_array(root, "techniques", "");
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string path = detail::index_path("techniques", i);
        detail::require_object(list[i], path);
        detail::check_keys(list[i], {"name", "tactic"}, path);
        Technique t;
        t.name = detail::require_string(list[i], "name", path);
        t.tactic = detail::require_string(list[i], "tactic", path);
        if (!declared.contains(t.tactic)) {
            throw Error(ErrorCode::BadTactic, path + ": technique '" + t.name + "' references unknown tactic '" +
                                                  t.tactic + "'");
        }
        if (!seen.emplace(t.tactic, t.name).second) {
            detail::schema_error(path, "technique '" + t.name + "' listed twice under '" + t.tactic + "'");
        }
        t.technique_id = detail::slugify(t.name);
        t.column = require_column(t.tactic);
        techniques.push_back(std::move(t));
    }
    return AttackMatrix(std::move(tactics), std::move(techniques));
}

// ---------------------------------------------------------------------------

MappingTable::MappingTable(std::map<StrideCategory, std::vector<MappedTechnique>> entries)
    : entries_(std::move(entries))
{
    for (auto& [category, list] : entries_) {
        std::stable_sort(list.begin(), list.end(), [](const MappedTechnique& a, const MappedTechnique& b) {
            return technique_less(a.technique, b.technique);
        });
    }
}

const std::vector<MappedTechnique>& MappingTable::at(StrideCategory category) const
{
    auto it = entries_.find(category);
    if (it == entries_.end()) {
        throw Error(ErrorCode::UnmappedCategory,
                    "mapping has no techniques for '" + std::string(token(category)) + "'");
    }
    return it->second;
}

MappingTable load_mapping(std::string_view text, const AttackMatrix& matrix)
{
    Json root = detail::parse_json(text, "mapping");
    detail::require_object(root, "");
    std::map<StrideCategory, std::vector<MappedTechnique>> entries;
    for (auto it = root.begin(); it != root.end(); ++it) {
        if (!it.key().empty() && it.key().front() == '_') {
            continue;
        }
        auto category = parse_category(it.key());
        if (!category) {
            detail::schema_error(it.key(), "unknown STRIDE category");
        }
        if (!it->is_array()) {
            detail::schema_error(it.key(), "expected an array of technique names");
        }
        auto& list = entries[*category];
        for (std::size_t i = 0; i < it->size(); ++i) {
            const Json& entry = (*it)[i];
            const std::string path = detail::index_path(it.key(), i);
            std::string name;
            std::string cwe;
            if (entry.is_string()) {
                name = entry.get<std::string>();
            } else {
                detail::require_object(entry, path);
                detail::check_keys(entry, {"technique", "cwe"}, path);
                name = detail::require_string(entry, "technique", path);
                cwe = detail::optional_string(entry, "cwe", path);
            }
            auto found = matrix.techniques_named(name);
            if (found.empty()) {
                throw Error(ErrorCode::UnknownTechnique, path + ": no technique named '" + name + "'");
            }
            for (auto& t : found) {
                list.push_back({std::move(t), cwe});
            }
        }
    }
    return MappingTable(std::move(entries));
}

std::vector<MappedTechnique> map_threat_to_techniques(const Threat& threat, const MappingTable& mapping)
{
    return mapping.at(threat.category);
}

// ---------------------------------------------------------------------------

std::string step_id(std::string_view element, const Technique& technique)
{
    return std::string(element) + "/" + detail::slugify(technique.tactic) + "/" + technique.technique_id;
}

std::string AttackNode::step_id() const
{
    return icsthreat::step_id(element, technique);
}

std::size_t AttackGraph::edge_count() const
{
    std::size_t n = 0;
    for (const auto& s : successors) {
        n += s.size();
    }
    return n;
}

void AttackGraph::add_edge(std::size_t from, std::size_t to)
{
    if (successors.size() < nodes.size()) {
        successors.resize(nodes.size());
    }
    auto& list = successors.at(from);
    auto pos = std::lower_bound(list.begin(), list.end(), to);
    if (from != to && (pos == list.end() || *pos != to)) {
        list.insert(pos, to);
    }
}

AttackGraph build_attack_graph(const SystemModel& model, const ThreatSet& threats, const AttackMatrix& matrix,
                               const MappingTable& mapping)
{
    require_valid(model);

    using Key = std::tuple<std::string, int, std::string>;
    std::map<Key, AttackNode> by_key;
    for (const auto& threat : threats.threats) {
        if (model.find_element(threat.attributed_asset) == nullptr) {
            throw Error(ErrorCode::InvalidModel, "threat '" + threat.threat_id + "' names unknown asset '" +
                                                     threat.attributed_asset + "'");
        }
        for (const auto& mapped : map_threat_to_techniques(threat, mapping)) {
            // Resolving through the matrix rejects mappings built against another matrix.
            matrix.tactic(mapped.technique.tactic);
            Key key{threat.attributed_asset, mapped.technique.column, mapped.technique.name};
            auto [it, inserted] = by_key.try_emplace(key);
            AttackNode& node = it->second;
            if (inserted) {
                node.element = threat.attributed_asset;
                node.technique = mapped.technique;
            }
            if (node.cwe_note.empty()) {
                node.cwe_note = mapped.cwe_note;
            }
            node.threats.push_back(threat.threat_id);
        }
    }

    AttackGraph graph;
    for (auto& [key, node] : by_key) {
        std::sort(node.threats.begin(), node.threats.end());
        node.threats.erase(std::unique(node.threats.begin(), node.threats.end()), node.threats.end());
        graph.nodes.push_back(std::move(node));
    }
    graph.successors.assign(graph.nodes.size(), {});

    std::set<std::pair<std::string, std::string>> adjacent;
    for (const auto& f : model.flows) {
        adjacent.emplace(f.source, f.target);
    }
    for (std::size_t u = 0; u < graph.nodes.size(); ++u) {
        const AttackNode& from = graph.nodes[u];
        for (std::size_t v = 0; v < graph.nodes.size(); ++v) {
            if (u == v) {
                continue;
            }
            const AttackNode& to = graph.nodes[v];
            if (to.technique.column < from.technique.column) {
                continue;
            }
            if (from.element == to.element || adjacent.contains({from.element, to.element})) {
                graph.successors[u].push_back(v);
            }
        }
    }
    return graph;
}

// ---------------------------------------------------------------------------

StepScores make_step_scores(const AttackGraph& graph, const std::map<std::string, Score>& threat_scores)
{
    std::map<std::string, Score> by_step;
    for (const auto& node : graph.nodes) {
        for (const auto& id : node.threats) {
            auto it = threat_scores.find(id);
            if (it == threat_scores.end()) {
                continue;
            }
            auto [slot, inserted] = by_step.try_emplace(node.step_id(), it->second);
            if (!inserted && it->second.tenths() > slot->second.tenths()) {
                slot->second = it->second;
            }
        }
    }
    return [table = std::move(by_step)](const AttackStep& step) -> std::optional<Score> {
        auto it = table.find(step_id(step));
        if (it == table.end()) {
            return std::nullopt;
        }
        return it->second;
    };
}

namespace {

double step_factor(const std::optional<Score>& score, double default_score)
{
    return (score ? score->value() : default_score) / 10.0;
}

AttackStep make_step(const AttackNode& node)
{
    AttackStep step;
    step.element = node.element;
    step.technique = node.technique;
    if (!node.threats.empty()) {
        step.threat = node.threats.front();
    }
    step.cwe_note = node.cwe_note;
    return step;
}

int step_tenths(const std::optional<Score>& score)
{
    return score ? score->tenths() : static_cast<int>(kDefaultStepScore * 10.0 + 0.5);
}

// Ranking key of a path. Scores are compared exactly: a path score is
// 10 * prod(t_i) / 100^len with t_i the step scores in tenths, so two paths
// compare as prod(a) * 100^len(b) against prod(b) * 100^len(a).
struct RankKey {
    double score = 0.0;
    std::vector<int> tenths;
    std::vector<std::string> ids;
};

using Limbs = std::vector<std::uint32_t>; // base 1e9, least significant first

void multiply(Limbs& x, std::uint32_t factor)
{
    std::uint64_t carry = 0;
    for (auto& limb : x) {
        std::uint64_t v = std::uint64_t{limb} * factor + carry;
        limb = static_cast<std::uint32_t>(v % 1000000000u);
        carry = v / 1000000000u;
    }
    while (carry != 0) {
        x.push_back(static_cast<std::uint32_t>(carry % 1000000000u));
        carry /= 1000000000u;
    }
    while (x.size() > 1 && x.back() == 0) {
        x.pop_back();
    }
}

Limbs scaled_product(const std::vector<int>& tenths, std::size_t other_len)
{
    Limbs x{1};
    for (int t : tenths) {
        multiply(x, static_cast<std::uint32_t>(t));
    }
    for (std::size_t i = 0; i < other_len; ++i) {
        multiply(x, 100);
    }
    return x;
}

int compare_exact(const RankKey& a, const RankKey& b)
{
    Limbs x = scaled_product(a.tenths, b.tenths.size());
    Limbs y = scaled_product(b.tenths, a.tenths.size());
    if (x.size() != y.size()) {
        return x.size() < y.size() ? -1 : 1;
    }
    for (std::size_t i = x.size(); i-- > 0;) {
        if (x[i] != y[i]) {
            return x[i] < y[i] ? -1 : 1;
        }
    }
    return 0;
}

bool rank_before(const RankKey& a, const RankKey& b)
{
    // Doubles settle clearly separated scores; near-equal ones go exact.
    if (std::abs(a.score - b.score) > 1e-9 * std::max(a.score, b.score)) {
        return a.score > b.score;
    }
    if (int c = compare_exact(a, b); c != 0) {
        return c > 0;
    }
    if (a.ids.size() != b.ids.size()) {
        return a.ids.size() < b.ids.size();
    }
    return a.ids < b.ids;
}

RankKey rank_key(const AttackPath& path)
{
    RankKey key;
    key.score = path.path_score;
    for (const auto& s : path.steps) {
        key.tenths.push_back(step_tenths(s.score));
        key.ids.push_back(step_id(s));
    }
    return key;
}

} // namespace

double path_score(const std::vector<AttackStep>& steps, double default_score)
{
    double product = 1.0;
    for (const auto& s : steps) {
        product *= step_factor(s.score, default_score);
    }
    return 10.0 * product;
}

std::vector<AttackPath> rank_paths(std::vector<AttackPath> paths, const StepScores& scores)
{
    std::vector<std::pair<RankKey, AttackPath>> keyed;
    keyed.reserve(paths.size());
    for (auto& path : paths) {
        if (scores) {
            for (auto& step : path.steps) {
                step.score = scores(step);
            }
        }
        path.path_score = path_score(path.steps);
        RankKey key = rank_key(path);
        keyed.emplace_back(std::move(key), std::move(path));
    }
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return rank_before(a.first, b.first); });
    std::vector<AttackPath> out;
    out.reserve(keyed.size());
    for (auto& [ids, path] : keyed) {
        out.push_back(std::move(path));
    }
    return out;
}

std::vector<AttackPath> enumerate_paths(const AttackGraph& graph, std::string_view entry, std::string_view goal,
                                        std::size_t max_len, std::size_t max_paths, const StepScores& scores)
{
    const int entry_column = require_column(entry);
    const int goal_column = require_column(goal);
    if (entry_column >= goal_column) {
        throw Error(ErrorCode::BadBounds, "entry tactic '" + std::string(entry) + "' must precede goal '" +
                                              std::string(goal) + "'");
    }
    if (max_len < 2) {
        throw Error(ErrorCode::BadBounds, "max_len must be at least 2");
    }

    const std::size_t n = graph.nodes.size();
    std::vector<AttackStep> steps;
    std::vector<double> factor;
    std::vector<int> tenths;
    std::vector<std::string> ids;
    steps.reserve(n);
    for (const auto& node : graph.nodes) {
        AttackStep step = make_step(node);
        if (scores) {
            step.score = scores(step);
        }
        factor.push_back(step_factor(step.score, kDefaultStepScore));
        tenths.push_back(step_tenths(step.score));
        ids.push_back(step_id(step));
        steps.push_back(std::move(step));
    }

    struct Candidate {
        RankKey key;
        std::vector<std::size_t> nodes;
    };
    auto before = [](const Candidate& a, const Candidate& b) { return rank_before(a.key, b.key); };

    // Extending a path multiplies its score by a factor <= 1, so once the
    // kept set is full any prefix already scoring below its worst member is
    // dropped without changing the top max_paths. The margin keeps prefixes
    // whose extensions could tie the worst member exactly.
    std::vector<Candidate> kept;
    std::vector<std::size_t> path;
    std::vector<bool> on_path(n, false);

    auto record = [&](double score) {
        Candidate c{{score, {}, {}}, path};
        for (std::size_t v : path) {
            c.key.tenths.push_back(tenths[v]);
            c.key.ids.push_back(ids[v]);
        }
        if (max_paths == 0) {
            kept.push_back(std::move(c));
            return;
        }
        auto pos = std::upper_bound(kept.begin(), kept.end(), c, before);
        if (kept.size() < max_paths) {
            kept.insert(pos, std::move(c));
        } else if (pos != kept.end()) {
            kept.insert(pos, std::move(c));
            kept.pop_back();
        }
    };

    auto dfs = [&](auto&& self, std::size_t u, double product) -> void {
        if (max_paths != 0 && kept.size() == max_paths && 10.0 * product < kept.back().key.score * (1.0 - 1e-9)) {
            return;
        }
        if (path.size() >= 2 && graph.nodes[u].technique.column == goal_column) {
            record(10.0 * product);
        }
        if (path.size() == max_len || u >= graph.successors.size()) {
            return;
        }
        for (std::size_t v : graph.successors[u]) {
            if (on_path[v]) {
                continue;
            }
            on_path[v] = true;
            path.push_back(v);
            self(self, v, product * factor[v]);
            path.pop_back();
            on_path[v] = false;
        }
    };

    for (std::size_t start = 0; start < n; ++start) {
        if (graph.nodes[start].technique.column != entry_column) {
            continue;
        }
        on_path[start] = true;
        path.push_back(start);
        dfs(dfs, start, 1.0 * factor[start]);
        path.pop_back();
        on_path[start] = false;
    }

    std::vector<AttackPath> paths;
    paths.reserve(kept.size());
    for (const auto& c : kept) {
        AttackPath p;
        p.goal = std::string(goal);
        p.nodes = c.nodes;
        for (std::size_t v : c.nodes) {
            p.steps.push_back(steps[v]);
        }
        paths.push_back(std::move(p));
    }
    paths = rank_paths(std::move(paths));
    if (max_paths != 0 && paths.size() > max_paths) {
        paths.resize(max_paths);
    }
    return paths;
}

std::string export_paths_dot(const std::vector<AttackPath>& paths)
{
    std::ostringstream out;
    out << "digraph \"attack_paths\" {\n";
    out << "  rankdir=LR;\n";
    for (std::size_t p = 0; p < paths.size(); ++p) {
        const AttackPath& path = paths[p];
        const std::string prefix = "p" + std::to_string(p + 1);
        char score[32];
        std::snprintf(score, sizeof score, "%.4f", path.path_score);
        out << "  subgraph " << detail::dot_quote("cluster_path_" + std::to_string(p + 1)) << " {\n";
        out << "    label=" << detail::dot_quote("#" + std::to_string(p + 1) + " goal " + path.goal + " score " + score)
            << ";\n";
        for (std::size_t s = 0; s < path.steps.size(); ++s) {
            const AttackStep& step = path.steps[s];
            out << "    " << detail::dot_quote(prefix + "_s" + std::to_string(s + 1)) << " [label="
                << detail::dot_quote(step.element + " / " + step.technique.name + " / " + step.technique.tactic)
                << ", shape=box];\n";
        }
        for (std::size_t s = 1; s < path.steps.size(); ++s) {
            out << "    " << detail::dot_quote(prefix + "_s" + std::to_string(s)) << " -> "
                << detail::dot_quote(prefix + "_s" + std::to_string(s + 1)) << ";\n";
        }
        out << "  }\n";
    }
    out << "}\n";
    return out.str();
}

} // namespace icsthreat
