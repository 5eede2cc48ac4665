#pragma once

// Shared checks for the two scorers, used by the unit tests and the
// acceptance runner.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "icsthreat/scoring.hpp"

namespace scoringchecks {

struct GoldenVector {
    std::string vector;
    std::string score;
};

/// "vector score" lines; '#' starts a comment line.
inline std::vector<GoldenVector> load_golden(const std::filesystem::path& path)
{
    std::ifstream in(path);
    std::vector<GoldenVector> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::istringstream fields(line);
        GoldenVector g;
        fields >> g.vector >> g.score;
        out.push_back(g);
    }
    return out;
}

// Independent evaluation of the overall-score formula from literal weights.
struct MetricTuple {
    int c, i, a, e_base, imp, e_t, rl, rc, cdp;
};

inline double reference_overall(const MetricTuple& t)
{
    static const double impact[] = {0.0, 0.5, 1.0};
    static const double e_base[] = {0.85, 0.9, 0.95, 1.0};
    static const double imp[] = {0.0, 0.22, 0.56, 0.7, 0.85};
    static const double e_t[] = {0.0, 0.9, 0.95, 1.0, 1.0};
    static const double rl[] = {0.0, 0.25, 0.75, 1.0};
    static const double rc[] = {0.0, 0.5, 1.0};
    static const double cdp[] = {0.0, 0.1, 0.3, 0.4, 0.5};
    const double c = impact[t.c];
    const double num = (1 - (1 - c) * (1 - impact[t.i]) * (1 - impact[t.a])) * e_t[t.e_t] * rl[t.rl] * rc[t.rc];
    const double den = (0.6 * (1 - c) + 0.4 * (1 - cdp[t.cdp])) * imp[t.imp] + 0.6 * cdp[t.cdp];
    if (den == 0.0) {
        return num == 0.0 ? 0.0 : 10.0;
    }
    return std::min(10.0, num / den * e_base[t.e_base]);
}

inline icsthreat::OverallMetrics to_metrics(const MetricTuple& t)
{
    using namespace icsthreat;
    OverallMetrics m;
    m.base.confidentiality = static_cast<ImpactLevel>(t.c);
    m.base.integrity = static_cast<ImpactLevel>(t.i);
    m.base.availability = static_cast<ImpactLevel>(t.a);
    m.base.exploitability = static_cast<Exploitability>(t.e_base);
    m.base.impact = static_cast<ImpactRating>(t.imp);
    m.temporal.exploit_code_maturity = static_cast<ExploitCodeMaturity>(t.e_t);
    m.temporal.remediation_level = static_cast<RemediationLevel>(t.rl);
    m.temporal.report_confidence = static_cast<ReportConfidence>(t.rc);
    m.environmental.collateral_damage = static_cast<CollateralDamage>(t.cdp);
    return m;
}

struct PropertyResult {
    std::size_t tuples = 0;
    std::size_t oracle_mismatches = 0;
    std::size_t range_failures = 0;
    std::size_t absorption_failures = 0;
    std::size_t monotonicity_failures = 0;
    std::size_t absorption_cases = 0;
    std::size_t clamped_cases = 0;

    std::size_t failures() const
    {
        return oracle_mismatches + range_failures + absorption_failures + monotonicity_failures;
    }
};

/// Random metric tuples: agreement with reference_overall, [0, 10] range with one
/// decimal, a zero temporal product forcing 0.0, and non-decreasing value when
/// one of C, I, A, E_t, RL, RC, E_base is raised.
inline PropertyResult run_overall_properties(std::size_t count, unsigned seed)
{
    std::mt19937 rng(seed);
    auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
    auto random_tuple = [&] {
        return MetricTuple{pick(3), pick(3), pick(3), pick(4), pick(5), pick(5), pick(4), pick(3), pick(5)};
    };
    auto score = [](const MetricTuple& t) { return icsthreat::score_overall(to_metrics(t)); };

    PropertyResult r;
    for (std::size_t n = 0; n < count; ++n) {
        ++r.tuples;
        const MetricTuple t = random_tuple();
        const auto s = score(t);
        const double expected = std::floor(reference_overall(t) * 10.0 + 0.5 + 1e-9) / 10.0;
        if (std::abs(s.value() - expected) > 1e-12) {
            ++r.oracle_mismatches;
        }
        if (s.tenths() < 0 || s.tenths() > 100 || std::abs(s.value() * 10 - s.tenths()) > 1e-9) {
            ++r.range_failures;
        }
        if (s.tenths() == 100 && icsthreat::overall_raw(to_metrics(t).base, to_metrics(t).temporal,
                                                   to_metrics(t).environmental) > 10.0) {
            ++r.clamped_cases;
        }

        MetricTuple zero = t;
        switch (pick(3)) {
        case 0: zero.e_t = 0; break;
        case 1: zero.rl = 0; break;
        default: zero.rc = 0; break;
        }
        ++r.absorption_cases;
        if (score(zero).tenths() != 0) {
            ++r.absorption_failures;
        }

        MetricTuple up = t;
        int* fields[] = {&up.c, &up.i, &up.a, &up.e_t, &up.rl, &up.rc, &up.e_base};
        const int limits[] = {3, 3, 3, 5, 4, 3, 4};
        const int which = pick(7);
        if (*fields[which] + 1 < limits[which]) {
            ++*fields[which];
            if (score(up).tenths() < s.tenths()) {
                ++r.monotonicity_failures;
            }
        }
    }
    return r;
}

} // namespace scoringchecks
