#pragma once

// Brute-force reference for path enumeration: every injective node sequence
// is generated without looking at edges, then filtered and ranked with exact
// integer arithmetic on score tenths.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "icsthreat/attack_graph.hpp"

namespace pathoracle {

inline icsthreat::AttackGraph make_graph(const std::vector<int>& columns,
                                         const std::vector<std::pair<std::size_t, std::size_t>>& edges)
{
    icsthreat::AttackGraph g;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        icsthreat::AttackNode node;
        node.element = "n" + std::to_string(i);
        node.technique.name = "T" + std::to_string(i);
        node.technique.technique_id = "t" + std::to_string(i);
        node.technique.column = columns[i];
        node.technique.tactic = std::string(icsthreat::kTacticNames.at(static_cast<std::size_t>(columns[i])));
        g.nodes.push_back(std::move(node));
    }
    g.successors.resize(columns.size());
    for (auto [from, to] : edges) {
        g.add_edge(from, to);
    }
    return g;
}

struct Expected {
    std::vector<std::size_t> nodes;
    std::vector<std::string> ids;
    __int128 tenths_product = 1; // product of step scores in tenths
};

inline __int128 pow100(std::size_t n)
{
    __int128 r = 1;
    while (n--) {
        r *= 100;
    }
    return r;
}

/// a ranks before b: higher score, then fewer steps, then smaller ids.
inline bool expected_before(const Expected& a, const Expected& b)
{
    const __int128 lhs = a.tenths_product * pow100(b.nodes.size());
    const __int128 rhs = b.tenths_product * pow100(a.nodes.size());
    if (lhs != rhs) {
        return lhs > rhs;
    }
    if (a.nodes.size() != b.nodes.size()) {
        return a.nodes.size() < b.nodes.size();
    }
    return a.ids < b.ids;
}

inline std::vector<Expected> brute_force(const icsthreat::AttackGraph& g, int entry, int goal, std::size_t max_len,
                                         const std::vector<int>& tenths)
{
    const std::size_t n = g.nodes.size();
    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v : g.successors[u]) {
            adj[u][v] = true;
        }
    }
    std::vector<Expected> out;
    std::vector<std::size_t> seq;
    std::vector<bool> used(n, false);
    std::function<void()> grow = [&] {
        if (seq.size() >= 2) {
            bool ok = g.nodes[seq.front()].technique.column == entry && g.nodes[seq.back()].technique.column == goal;
            for (std::size_t i = 1; ok && i < seq.size(); ++i) {
                ok = adj[seq[i - 1]][seq[i]];
            }
            if (ok) {
                Expected e;
                e.nodes = seq;
                for (std::size_t v : seq) {
                    e.ids.push_back(g.nodes[v].step_id());
                    e.tenths_product *= tenths[v];
                }
                out.push_back(std::move(e));
            }
        }
        if (seq.size() == max_len) {
            return;
        }
        for (std::size_t v = 0; v < n; ++v) {
            if (!used[v]) {
                used[v] = true;
                seq.push_back(v);
                grow();
                seq.pop_back();
                used[v] = false;
            }
        }
    };
    grow();
    std::sort(out.begin(), out.end(), expected_before);
    return out;
}

struct TrialResult {
    std::size_t trials = 0;
    std::size_t mismatches = 0;
    std::size_t paths_compared = 0;
    std::string first_failure;
};

/// Random graphs of up to eight nodes checked against brute_force. Half the
/// trials use scores whose factors are exact in binary so ties are common.
inline TrialResult run_trials(std::size_t trials, std::uint32_t seed)
{
    std::mt19937 rng(seed);
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    const int dyadic[] = {0, 25, 50, 75, 100};

    TrialResult result;
    for (std::size_t t = 0; t < trials; ++t) {
        ++result.trials;
        const int entry = pick(0, 10);
        const int goal = pick(entry + 1, 11);
        const auto n = static_cast<std::size_t>(pick(1, 8));
        std::vector<int> columns(n);
        for (auto& c : columns) {
            switch (pick(0, 3)) {
            case 0: c = entry; break;
            case 1: c = goal; break;
            case 2: c = pick(entry, goal); break;
            default: c = pick(0, 11); break;
            }
        }
        const bool monotone = pick(0, 3) != 0;
        const int density = pick(20, 80);
        std::vector<std::pair<std::size_t, std::size_t>> edges;
        for (std::size_t u = 0; u < n; ++u) {
            for (std::size_t v = 0; v < n; ++v) {
                if (u != v && (!monotone || columns[v] >= columns[u]) && pick(0, 99) < density) {
                    edges.emplace_back(u, v);
                }
            }
        }
        auto g = make_graph(columns, edges);

        const bool exact_factors = t % 2 == 0;
        std::vector<int> tenths(n);
        std::map<std::string, int> scored;
        for (std::size_t i = 0; i < n; ++i) {
            if (pick(0, 4) == 0) {
                tenths[i] = 50; // unscored, default step score
                continue;
            }
            tenths[i] = exact_factors ? dyadic[pick(0, 4)] : pick(0, 100);
            scored[g.nodes[i].element] = tenths[i];
        }
        icsthreat::StepScores lookup = [&scored](const icsthreat::AttackStep& s) -> std::optional<icsthreat::Score> {
            auto it = scored.find(s.element);
            if (it == scored.end()) {
                return std::nullopt;
            }
            return icsthreat::Score::from_raw(it->second / 10.0, icsthreat::ScoreMethod::Cvss31Base);
        };

        const auto max_len = static_cast<std::size_t>(pick(2, static_cast<int>(n) + 1));
        const auto max_paths = static_cast<std::size_t>(pick(0, 1) ? 0 : pick(1, 8));
        auto expected = brute_force(g, entry, goal, max_len, tenths);
        if (max_paths != 0 && expected.size() > max_paths) {
            expected.resize(max_paths);
        }
        auto actual = icsthreat::enumerate_paths(g, icsthreat::kTacticNames[static_cast<std::size_t>(entry)],
                                                 icsthreat::kTacticNames[static_cast<std::size_t>(goal)], max_len,
                                                 max_paths, lookup);

        bool ok = actual.size() == expected.size();
        for (std::size_t i = 0; ok && i < actual.size(); ++i) {
            double want = 10.0;
            for (std::size_t v : expected[i].nodes) {
                want *= tenths[v] / 100.0;
            }
            ok = actual[i].nodes == expected[i].nodes && std::abs(actual[i].path_score - want) < 1e-9;
            ++result.paths_compared;
        }
        if (!ok) {
            ++result.mismatches;
            if (result.first_failure.empty()) {
                std::ostringstream msg;
                msg << "trial " << t << ": n=" << n << " entry=" << entry << " goal=" << goal
                    << " max_len=" << max_len << " max_paths=" << max_paths << " expected " << expected.size()
                    << " paths, got " << actual.size();
                for (std::size_t i = 0; i < std::min(actual.size(), expected.size()); ++i) {
                    if (actual[i].nodes != expected[i].nodes) {
                        msg << "; rank " << i << " differs: got";
                        for (auto v : actual[i].nodes) msg << ' ' << v;
                        msg << " (" << actual[i].path_score << "), expected";
                        for (auto v : expected[i].nodes) msg << ' ' << v;
                        break;
                    }
                }
                result.first_failure = msg.str();
            }
        }
    }
    return result;
}

} // namespace pathoracle
