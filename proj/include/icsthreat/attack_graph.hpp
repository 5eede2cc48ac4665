#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "icsthreat/model.hpp"
#include "icsthreat/scoring.hpp"
#include "icsthreat/stride.hpp"

namespace icsthreat {

/// Column order of the ICS matrix.
inline constexpr std::array<std::string_view, 12> kTacticNames = {
    "Initial Access",  "Execution",  "Persistence",         "Privilege Escalation",
    "Evasion",         "Discovery",  "Lateral Movement",    "Collection",
    "Command and Control", "Inhibit Response Function", "Impair Process Control", "Impact",
};

struct Tactic {
    std::string name;
    int column = 0;
};

struct Technique {
    std::string technique_id; // slug of the name
    std::string name;
    std::string tactic;
    int column = 0; // column of `tactic`

    friend bool operator==(const Technique&, const Technique&) = default;
};

/// Column order, then name.
bool technique_less(const Technique& a, const Technique& b);

class AttackMatrix {
public:
    AttackMatrix(std::vector<Tactic> tactics, std::vector<Technique> techniques);

    const std::vector<Tactic>& tactics() const { return tactics_; }
    const std::vector<Technique>& techniques() const { return techniques_; }

    /// BAD_TACTIC for an unknown tactic name.
    const Tactic& tactic(std::string_view name) const;
    /// First technique with this name in column order; UNKNOWN_TECHNIQUE otherwise.
    const Technique& technique(std::string_view name) const;
    /// Every column the name appears under (e.g. "Hooking" is in two).
    std::vector<Technique> techniques_named(std::string_view name) const;
    std::size_t technique_count(std::string_view tactic) const;

private:
    std::vector<Tactic> tactics_;
    std::vector<Technique> techniques_; // sorted by technique_less
};

/// {tactics: [names], techniques: [{name, tactic}]}. The twelve canonical
/// tactics must all be present. PARSE_ERROR, BAD_TACTIC.
AttackMatrix load_attack_matrix(std::string_view text);

struct MappedTechnique {
    Technique technique;
    std::string cwe_note;
};

/// STRIDE category -> techniques, loaded from
/// {category: [name | {technique, cwe?}]}. Names are resolved against the
/// matrix; a name listed under several tactics maps to all of them.
class MappingTable {
public:
    MappingTable() = default;
    explicit MappingTable(std::map<StrideCategory, std::vector<MappedTechnique>> entries);

    bool has(StrideCategory category) const { return entries_.contains(category); }
    const std::vector<MappedTechnique>& at(StrideCategory category) const;

private:
    std::map<StrideCategory, std::vector<MappedTechnique>> entries_;
};

MappingTable load_mapping(std::string_view text, const AttackMatrix& matrix);

/// Techniques for the threat's category in column order, then name.
/// UNMAPPED_CATEGORY when the mapping has no entry for the category.
std::vector<MappedTechnique> map_threat_to_techniques(const Threat& threat, const MappingTable& mapping);

// ---------------------------------------------------------------------------

struct AttackNode {
    std::string element;
    Technique technique;
    std::vector<std::string> threats; // contributing threat ids, sorted
    std::string cwe_note;

    /// "element/tactic-slug/technique-id", unique within a graph.
    std::string step_id() const;
};

/// Plain adjacency structure. build_attack_graph produces one from a model;
/// tests also assemble graphs by hand.
struct AttackGraph {
    std::vector<AttackNode> nodes;
    std::vector<std::vector<std::size_t>> successors; // sorted, no self edges

    std::size_t edge_count() const;
    void add_edge(std::size_t from, std::size_t to);
};

/// Node per (attributed asset, mapped technique). Edge u->v iff v's column is
/// not before u's and u, v share an element or a model flow runs from u's
/// element to v's. Nodes are ordered by (element, column, technique name).
AttackGraph build_attack_graph(const SystemModel& model, const ThreatSet& threats, const AttackMatrix& matrix,
                               const MappingTable& mapping);

struct AttackStep {
    std::string element;
    Technique technique;
    std::optional<std::string> threat;
    std::string cwe_note;
    std::optional<Score> score;
};

struct AttackPath {
    std::string goal;
    std::vector<AttackStep> steps;
    std::vector<std::size_t> nodes; // indices into the source graph
    double path_score = 0.0;
};

/// Score used for a step when the lookup has nothing for it.
inline constexpr double kDefaultStepScore = 5.0;

/// "element/tactic-slug/technique-id"
std::string step_id(std::string_view element, const Technique& technique);
inline std::string step_id(const AttackStep& step) { return step_id(step.element, step.technique); }

/// Per-step score lookup; an empty function leaves step scores untouched.
using StepScores = std::function<std::optional<Score>(const AttackStep&)>;

/// Lookup scoring each node with the highest score among its contributing
/// threats (keyed by threat id); nodes without a scored threat stay unscored.
StepScores make_step_scores(const AttackGraph& graph, const std::map<std::string, Score>& threat_scores);

/// 10 * prod(score_i / 10), with kDefaultStepScore for unscored steps.
double path_score(const std::vector<AttackStep>& steps, double default_score = kDefaultStepScore);

/// Simple paths of 2..max_len nodes from any node of the entry tactic to any
/// node of the goal tactic, ranked by rank_paths and cut to max_paths (0 keeps
/// all). BAD_BOUNDS unless entry precedes goal and max_len >= 2.
std::vector<AttackPath> enumerate_paths(const AttackGraph& graph, std::string_view entry, std::string_view goal,
                                        std::size_t max_len, std::size_t max_paths, const StepScores& scores = {});

/// Fills step scores from the lookup, recomputes path_score, and sorts:
/// descending score, then fewer steps, then step ids lexicographically.
std::vector<AttackPath> rank_paths(std::vector<AttackPath> paths, const StepScores& scores = {});

/// One cluster subgraph per path; nodes labeled "element / technique / tactic".
std::string export_paths_dot(const std::vector<AttackPath>& paths);

} // namespace icsthreat
