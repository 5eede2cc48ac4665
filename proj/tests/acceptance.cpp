// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cli_support.hpp"
#include "icsthreat/attack_graph.hpp"
#include "icsthreat/report.hpp"
#include "icsthreat/scoring.hpp"
#include "icsthreat/stride.hpp"
#include "mock_nvd.hpp"
#include "path_oracle.hpp"
#include "scoring_checks.hpp"
#include "support.hpp"

using namespace icsthreat;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

using Check = std::function<Outcome()>;

std::string top_rows_text(const std::vector<TopRow>& rows)
{
    std::ostringstream s;
    for (const auto& r : rows) {
        s << (s.tellp() > 0 ? "; " : "") << camel_name(r.category) << "/" << r.interaction << "/"
          << Score::from_raw(r.score(), ScoreMethod::Cvss31Base).to_string();
    }
    return s.str();
}

Outcome top_five(const std::string& name, const std::vector<TopRow>& expected)
{
    auto dir = testsupport::scratch_dir("acceptance_top_" + name);
    const auto start = std::chrono::steady_clock::now();
    auto r = testsupport::run_cli(testsupport::case_report_args(name, dir.string()));
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (r.code != 0) {
        return {false, "report exited " + std::to_string(r.code) + ": " + r.err};
    }
    auto doc = parse_report_json(testsupport::slurp(dir / "report.json"));
    const bool rows_ok = doc.top == expected;
    char timing[64];
    std::snprintf(timing, sizeof timing, "%.3f s", seconds);
    return {rows_ok && seconds < 1.0, top_rows_text(doc.top) + " (" + timing + ", limit 1 s)"};
}

Outcome category_summary_iom()
{
    auto ts = enumerate_threats(testsupport::case_model("iom"), testsupport::case_rules("iom"));
    std::map<StrideCategory, std::size_t> got;
    std::size_t total = 0;
    for (const auto& row : summarize_by_category(ts)) {
        got[row.category] = row.count;
        total += row.count;
    }
    std::size_t asset_total = 0;
    for (const auto& [asset, n] : summarize_by_asset(ts)) {
        asset_total += n;
    }
    using C = StrideCategory;
    const std::map<C, std::size_t> expected = {{C::DenialOfService, 10},      {C::ElevationOfPrivilege, 32},
                                               {C::InformationDisclosure, 9}, {C::Repudiation, 9},
                                               {C::Spoofing, 11},             {C::Tampering, 39}};
    std::ostringstream s;
    for (const auto& [c, n] : got) {
        s << camel_name(c) << " " << n << ", ";
    }
    s << "total " << total << ", per-asset total " << asset_total;
    return {got == expected && total == 110 && asset_total == 110, s.str()};
}

Outcome iop_discrepancy()
{
    auto ts = enumerate_threats(testsupport::case_model("iop"), testsupport::case_rules("iop"));
    std::size_t total = 0;
    for (const auto& row : summarize_by_category(ts)) {
        total += row.count;
    }
    std::size_t asset_total = 0;
    for (const auto& [asset, n] : summarize_by_asset(ts)) {
        asset_total += n;
    }
    auto dir = testsupport::scratch_dir("acceptance_iop_golden");
    auto r = testsupport::run_cli(testsupport::case_report_args("iop", dir.string()));
    const std::string produced = r.code == 0 ? testsupport::slurp(dir / "report.md") : "";
    const std::string golden = testsupport::slurp(testsupport::source_dir() / "tests/golden/iop_report.md");
    const bool note = golden.find("Per-asset table total: engine 172, reference 168.") != std::string::npos;
    const bool same = produced == golden;
    std::ostringstream s;
    s << "category total " << total << ", per-asset total " << asset_total << ", golden report "
      << (same ? "byte-identical" : "DIFFERS") << ", 168 note " << (note ? "present" : "missing");
    return {total == 172 && asset_total == 172 && same && note, s.str()};
}

Outcome overall_scorer()
{
    const auto start = std::chrono::steady_clock::now();
    OverallMetrics worked;
    worked.base.confidentiality = worked.base.integrity = worked.base.availability = ImpactLevel::Complete;
    worked.base.exploitability = Exploitability::Functional;
    worked.base.impact = ImpactRating::High;
    worked.temporal = {ExploitCodeMaturity::Functional, RemediationLevel::OfficialFix, ReportConfidence::Confirmed};
    worked.environmental.collateral_damage = CollateralDamage::Low;
    const auto worked_score = score_overall(worked);
    auto props = scoringchecks::run_overall_properties(10000, 20240101);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "worked selection %s; %zu tuples, %zu failures (%zu clamped cases); %.3f s, limit 1 s",
                  worked_score.to_string().c_str(), props.tuples, props.failures(), props.clamped_cases, seconds);
    return {worked_score.tenths() == 0 && props.tuples == 10000 && props.failures() == 0 && props.clamped_cases > 0 &&
                seconds < 1.0,
            buf};
}

Outcome cvss_golden()
{
    auto golden = scoringchecks::load_golden(testsupport::source_dir() / "tests/golden/cvss31_vectors.txt");
    std::size_t matched = 0;
    bool has_top = false;
    bool has_zero = false;
    std::string first_miss;
    for (const auto& g : golden) {
        const auto got = score_cvss31_base(parse_vector(g.vector)).to_string();
        if (got == g.score) {
            ++matched;
        } else if (first_miss.empty()) {
            first_miss = "; first miss " + g.vector + " got " + got + " want " + g.score;
        }
        has_top |= g.vector == "CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H" && g.score == "9.8";
        has_zero |= g.score == "0.0" && g.vector.find("C:N/I:N/A:N") != std::string::npos;
    }
    return {golden.size() == 20 && matched == 20 && has_top && has_zero,
            std::to_string(matched) + " of " + std::to_string(golden.size()) + " vectors exact" + first_miss};
}

Outcome path_oracle()
{
    const auto start = std::chrono::steady_clock::now();
    auto r = pathoracle::run_trials(1000, 20240601);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char buf[256];
    std::snprintf(buf, sizeof buf, "%zu graphs, %zu ranked paths compared, %zu mismatches; %.3f s, limit 10 s",
                  r.trials, r.paths_compared, r.mismatches, seconds);
    return {r.trials == 1000 && r.mismatches == 0 && seconds < 10.0, buf + (r.first_failure.empty() ? "" : "; " + r.first_failure)};
}

Outcome matrix_integrity()
{
    auto m = testsupport::bundled_matrix();
    const std::size_t expected[] = {12, 9, 6, 2, 6, 5, 7, 11, 3, 14, 5, 12};
    bool ok = m.tactics().size() == 12;
    std::ostringstream s;
    for (std::size_t i = 0; i < m.tactics().size(); ++i) {
        const auto n = m.technique_count(m.tactics()[i].name);
        ok = ok && i < 12 && m.tactics()[i].name == kTacticNames[i] && n == expected[i];
        s << (i ? ", " : "") << n;
    }
    return {ok, std::to_string(m.tactics().size()) + " tactics, counts (" + s.str() + ")"};
}

Outcome determinism()
{
    std::vector<std::string> differing;
    std::size_t compared = 0;
    auto compare = [&](const fs::path& a, const fs::path& b) {
        ++compared;
        if (!fs::exists(a) || !fs::exists(b) || testsupport::slurp(a) != testsupport::slurp(b)) {
            differing.push_back(a.filename().string());
        }
    };

    for (const char* name : {"iom", "iop"}) {
        auto a = testsupport::scratch_dir(std::string("acceptance_det_a_") + name);
        auto b = testsupport::scratch_dir(std::string("acceptance_det_b_") + name);
        testsupport::run_cli(testsupport::case_report_args(name, a.string()));
        testsupport::run_cli(testsupport::case_report_args(name, b.string()));
        for (const char* f : {"report.md", "report.json", "dfd.dot", "paths.dot"}) {
            compare(a / f, b / f);
        }
        const std::string model = testsupport::data(std::string("cases/") + name + "/model.json").string();
        const std::string rules = testsupport::data(std::string("cases/") + name + "/rules.json").string();
        testsupport::run_cli({"paths", model, "--rules", rules, "--dot", (a / "cli_paths.dot").string()});
        testsupport::run_cli({"paths", model, "--rules", rules, "--dot", (b / "cli_paths.dot").string()});
        compare(a / "cli_paths.dot", b / "cli_paths.dot");
    }

    // The download command, served from loopback only.
    mocknvd::Server server(mocknvd::schneider_pair());
    auto dir = testsupport::scratch_dir("acceptance_det_fetch");
    for (const char* f : {"a.json", "b.json"}) {
        testsupport::run_cli({"fetch-nvd", "--endpoint", server.endpoint(), "--keyword", "schneider", "--out",
                              (dir / f).string()});
    }
    compare(dir / "a.json", dir / "b.json");

    std::string detail = std::to_string(compared) + " output pairs compared";
    for (const auto& d : differing) {
        detail += "; differs: " + d;
    }
    detail += "; only 127.0.0.1 is contacted";
    return {differing.empty() && compared == 11, detail};
}

} // namespace

int main()
{
    using C = StrideCategory;
    const std::vector<std::pair<std::string, Check>> criteria = {
        {"Top-5 reproduction, IoM",
         [] {
             return top_five("iom", {{C::Spoofing, "sensor_to_plc", 98},
                                     {C::Tampering, "plc_to_sensor", 98},
                                     {C::Spoofing, "actuator_to_plc", 75},
                                     {C::InformationDisclosure, "plc_to_hmi", 75},
                                     {C::Spoofing, "plc_to_hmi", 48}});
         }},
        {"Top-5 reproduction, IoP",
         [] {
             return top_five("iop", {{C::ElevationOfPrivilege, "plc_to_rtu", 98},
                                     {C::Spoofing, "human_to_plc", 91},
                                     {C::Spoofing, "human_to_scada", 81},
                                     {C::Tampering, "human_to_scada", 75},
                                     {C::DenialOfService, "rtu_to_plc", 75}});
         }},
        {"Category summary, IoM", category_summary_iom},
        {"IoP per-asset discrepancy documented", iop_discrepancy},
        {"Overall-score formula", overall_scorer},
        {"CVSS v3.1 golden vectors", cvss_golden},
        {"Path enumeration vs brute force", path_oracle},
        {"ATT&CK for ICS matrix integrity", matrix_integrity},
        {"Deterministic outputs", determinism},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": " << o.detail
                  << "\n";
    }
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << "\n";
    return failures == 0 ? 0 : 1;
}
