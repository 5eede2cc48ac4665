#include "icsthreat/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>
#include <tuple>

#include <openssl/evp.h>

#include "icsthreat/error.hpp"
#include "json_util.hpp"
#include "text_util.hpp"

namespace icsthreat {

using detail::Json;
using detail::OrderedJson;

std::vector<TopRow> top_n(const ScoredThreatSet& threats, std::size_t n)
{
    if (n == 0) {
        throw Error(ErrorCode::BadBounds, "top-N needs n >= 1");
    }
    std::map<std::pair<StrideCategory, std::string>, int> best;
    for (const auto& t : threats.threats) {
        if (!t.score) {
            continue;
        }
        auto [it, inserted] = best.try_emplace({t.threat.category, t.threat.interaction}, t.score->tenths());
        if (!inserted) {
            it->second = std::max(it->second, t.score->tenths());
        }
    }
    std::vector<TopRow> rows;
    for (const auto& [key, tenths] : best) {
        rows.push_back({key.first, key.second, tenths});
    }
    std::sort(rows.begin(), rows.end(), [](const TopRow& a, const TopRow& b) {
        if (a.score_tenths != b.score_tenths) {
            return a.score_tenths > b.score_tenths;
        }
        return std::tie(a.category, a.interaction) < std::tie(b.category, b.interaction);
    });
    if (rows.size() > n) {
        rows.resize(n);
    }
    return rows;
}

ReportDocument build_report(const ScoredThreatSet& threats, std::size_t top, const std::vector<AttackPath>& paths,
                            std::string digest)
{
    ReportDocument doc;
    doc.model = threats.model_name;
    doc.digest = std::move(digest);

    ThreatSet plain;
    for (const auto& t : threats.threats) {
        plain.threats.push_back(t.threat);
    }
    for (const auto& row : summarize_by_category(plain)) {
        doc.by_category.push_back({row.category, row.count});
    }
    for (const auto& [asset, count] : summarize_by_asset(plain)) {
        doc.by_asset.push_back({asset, count});
    }
    doc.top = top_n(threats, top);
    for (const auto& p : paths) {
        ReportPath rp;
        rp.goal = p.goal;
        rp.score = std::round(p.path_score * 1e4) / 1e4;
        for (const auto& s : p.steps) {
            rp.steps.push_back({s.element, s.technique.name, s.technique.tactic});
        }
        doc.paths.push_back(std::move(rp));
    }
    return doc;
}

std::string input_digest(const std::vector<std::string>& inputs)
{
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorCode::IoError, "SHA-256 unavailable");
    }
    for (const auto& input : inputs) {
        const std::string prefix = std::to_string(input.size()) + ":";
        EVP_DigestUpdate(ctx.get(), prefix.data(), prefix.size());
        EVP_DigestUpdate(ctx.get(), input.data(), input.size());
    }
    unsigned char hash[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    EVP_DigestFinal_ex(ctx.get(), hash, &length);
    std::string out = "sha256:";
    char hex[3];
    for (unsigned int i = 0; i < length; ++i) {
        std::snprintf(hex, sizeof hex, "%02x", hash[i]);
        out += hex;
    }
    return out;
}

namespace {

std::string format_path_score(double score)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", score);
    return buf;
}

template <typename Row>
std::size_t total(const std::vector<Row>& rows)
{
    return std::accumulate(rows.begin(), rows.end(), std::size_t{0},
                           [](std::size_t sum, const Row& r) { return sum + r.count; });
}

} // namespace

std::string render_markdown(const ReportDocument& doc)
{
    std::ostringstream out;
    out << "# Threat report: " << doc.model << "\n\n";
    out << "Inputs digest: `" << doc.digest << "`\n\n";

    out << "## Threats by category\n\n";
    out << "| Category | Count |\n|---|---:|\n";
    for (const auto& row : doc.by_category) {
        out << "| " << display_name(row.category) << " | " << row.count << " |\n";
    }
    out << "| **Total** | **" << total(doc.by_category) << "** |\n\n";

    out << "## Threats by asset\n\n";
    out << "| Asset | Count |\n|---|---:|\n";
    for (const auto& row : doc.by_asset) {
        out << "| " << detail::md_cell(row.asset) << " | " << row.count << " |\n";
    }
    out << "| **Total** | **" << total(doc.by_asset) << "** |\n\n";

    out << "## Top threats\n\n";
    if (doc.top.empty()) {
        out << "No scored threats.\n\n";
    } else {
        out << "| # | Category | Interaction | CVSS Score |\n|---:|---|---|---:|\n";
        for (std::size_t i = 0; i < doc.top.size(); ++i) {
            const TopRow& row = doc.top[i];
            out << "| " << i + 1 << " | " << display_name(row.category) << " | " << detail::md_cell(row.interaction)
                << " | " << detail::format_tenths(row.score()) << " |\n";
        }
        out << "\n";
    }

    out << "## Attack paths\n\n";
    if (doc.paths.empty()) {
        out << "No attack paths.\n\n";
    } else {
        out << "| # | Goal | Score | Steps |\n|---:|---|---:|---|\n";
        for (std::size_t i = 0; i < doc.paths.size(); ++i) {
            const ReportPath& p = doc.paths[i];
            std::string steps;
            for (const auto& s : p.steps) {
                steps += (steps.empty() ? "" : " -> ") + s.element + ": " + s.technique + " (" + s.tactic + ")";
            }
            out << "| " << i + 1 << " | " << detail::md_cell(p.goal) << " | " << format_path_score(p.score) << " | "
                << detail::md_cell(steps) << " |\n";
        }
        out << "\n";
    }

    if (!doc.notes.empty()) {
        out << "## Notes\n\n";
        for (const auto& note : doc.notes) {
            out << "- " << note << "\n";
        }
        out << "\n";
    }
    std::string text = out.str();
    text.pop_back(); // single trailing newline
    return text;
}

std::string render_json(const ReportDocument& doc)
{
    OrderedJson root;
    root["model"] = doc.model;
    root["digest"] = doc.digest;
    OrderedJson categories = OrderedJson::array();
    for (const auto& row : doc.by_category) {
        categories.push_back({{"category", camel_name(row.category)}, {"count", row.count}});
    }
    root["summary_by_category"] = std::move(categories);
    OrderedJson assets = OrderedJson::array();
    for (const auto& row : doc.by_asset) {
        assets.push_back({{"asset", row.asset}, {"count", row.count}});
    }
    root["summary_by_asset"] = std::move(assets);
    OrderedJson top = OrderedJson::array();
    for (const auto& row : doc.top) {
        top.push_back({{"category", camel_name(row.category)}, {"interaction", row.interaction}, {"score", row.score()}});
    }
    root["top_threats"] = std::move(top);
    OrderedJson paths = OrderedJson::array();
    for (const auto& p : doc.paths) {
        OrderedJson steps = OrderedJson::array();
        for (const auto& s : p.steps) {
            steps.push_back({{"element", s.element}, {"technique", s.technique}, {"tactic", s.tactic}});
        }
        OrderedJson entry;
        entry["goal"] = p.goal;
        entry["score"] = p.score;
        entry["steps"] = std::move(steps);
        paths.push_back(std::move(entry));
    }
    root["paths"] = std::move(paths);
    return detail::dump_canonical(root);
}

namespace {

StrideCategory require_category(const Json& object, const std::string& path)
{
    const std::string name = detail::require_string(object, "category", path);
    auto category = parse_category(name);
    if (!category) {
        detail::schema_error(path + ".category", "unknown STRIDE category '" + name + "'");
    }
    return *category;
}

std::size_t require_count(const Json& value, const std::string& path)
{
    if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<long long>() >= 0)) {
        detail::schema_error(path, "expected a non-negative integer");
    }
    return value.get<std::size_t>();
}

double require_number(const Json& object, const char* key, const std::string& path)
{
    auto value = detail::optional_number(object, key, path);
    if (!value) {
        detail::schema_error(path, std::string("missing field '") + key + "'");
    }
    return *value;
}

TopRow parse_top_row(const Json& entry, const std::string& path)
{
    detail::require_object(entry, path);
    detail::check_keys(entry, {"category", "interaction", "score"}, path);
    TopRow row;
    row.category = require_category(entry, path);
    row.interaction = detail::require_string(entry, "interaction", path);
    row.score_tenths = Score::from_raw(require_number(entry, "score", path), ScoreMethod::Cvss31Base).tenths();
    return row;
}

} // namespace

ReportDocument parse_report_json(std::string_view text)
{
    Json root = detail::parse_json(text, "report");
    detail::require_object(root, "");
    detail::check_keys(root, {"model", "digest", "summary_by_category", "summary_by_asset", "top_threats", "paths"},
                       "");
    ReportDocument doc;
    doc.model = detail::require_string(root, "model", "");
    doc.digest = detail::require_string(root, "digest", "");

    const Json& categories = detail::require_array(root, "summary_by_category", "");
    for (std::size_t i = 0; i < categories.size(); ++i) {
        const std::string path = detail::index_path("summary_by_category", i);
        detail::require_object(categories[i], path);
        detail::check_keys(categories[i], {"category", "count"}, path);
        doc.by_category.push_back(
            {require_category(categories[i], path), require_count(detail::require(categories[i], "count", path), path)});
    }
    const Json& assets = detail::require_array(root, "summary_by_asset", "");
    for (std::size_t i = 0; i < assets.size(); ++i) {
        const std::string path = detail::index_path("summary_by_asset", i);
        detail::require_object(assets[i], path);
        detail::check_keys(assets[i], {"asset", "count"}, path);
        doc.by_asset.push_back({detail::require_string(assets[i], "asset", path),
                                require_count(detail::require(assets[i], "count", path), path)});
    }
    const Json& top = detail::require_array(root, "top_threats", "");
    for (std::size_t i = 0; i < top.size(); ++i) {
        doc.top.push_back(parse_top_row(top[i], detail::index_path("top_threats", i)));
    }
    const Json& paths = detail::require_array(root, "paths", "");
    for (std::size_t i = 0; i < paths.size(); ++i) {
        const std::string path = detail::index_path("paths", i);
        detail::require_object(paths[i], path);
        detail::check_keys(paths[i], {"goal", "score", "steps"}, path);
        ReportPath p;
        p.goal = detail::require_string(paths[i], "goal", path);
        p.score = require_number(paths[i], "score", path);
        const Json& steps = detail::require_array(paths[i], "steps", path);
        for (std::size_t s = 0; s < steps.size(); ++s) {
            const std::string step_path = detail::index_path(path + ".steps", s);
            detail::require_object(steps[s], step_path);
            detail::check_keys(steps[s], {"element", "technique", "tactic"}, step_path);
            p.steps.push_back({detail::require_string(steps[s], "element", step_path),
                               detail::require_string(steps[s], "technique", step_path),
                               detail::require_string(steps[s], "tactic", step_path)});
        }
        doc.paths.push_back(std::move(p));
    }
    return doc;
}

// ---------------------------------------------------------------------------

ReferenceTables load_reference(std::string_view text)
{
    Json root = detail::parse_json(text, "reference");
    detail::require_object(root, "");
    detail::check_keys(root, {"summary_by_category", "summary_by_asset", "top_threats"}, "");
    ReferenceTables ref;
    if (auto it = root.find("summary_by_category"); it != root.end()) {
        detail::require_object(*it, "summary_by_category");
        for (auto entry = it->begin(); entry != it->end(); ++entry) {
            const std::string path = "summary_by_category." + entry.key();
            auto category = parse_category(entry.key());
            if (!category) {
                detail::schema_error(path, "unknown STRIDE category");
            }
            ref.by_category[*category] = require_count(entry.value(), path);
        }
    }
    if (auto it = root.find("summary_by_asset"); it != root.end()) {
        detail::require_object(*it, "summary_by_asset");
        for (auto entry = it->begin(); entry != it->end(); ++entry) {
            ref.by_asset[entry.key()] = require_count(entry.value(), "summary_by_asset." + entry.key());
        }
    }
    if (auto it = root.find("top_threats"); it != root.end()) {
        if (!it->is_array()) {
            detail::schema_error("top_threats", "expected an array");
        }
        for (std::size_t i = 0; i < it->size(); ++i) {
            ref.top.push_back(parse_top_row((*it)[i], detail::index_path("top_threats", i)));
        }
    }
    return ref;
}

namespace {

std::string count_note(const std::string& table, std::size_t engine, std::size_t reference)
{
    std::string note = table + " total: engine " + std::to_string(engine) + ", reference " + std::to_string(reference);
    return note + (engine == reference ? " (match)." : ".");
}

} // namespace

std::vector<std::string> compare_with_reference(const ReportDocument& doc, const ReferenceTables& reference)
{
    std::vector<std::string> notes;

    if (!reference.by_category.empty()) {
        std::size_t ref_total = 0;
        for (const auto& [category, count] : reference.by_category) {
            ref_total += count;
        }
        std::string note = count_note("Category table", total(doc.by_category), ref_total);
        for (const auto& row : doc.by_category) {
            auto it = reference.by_category.find(row.category);
            std::size_t expected = it == reference.by_category.end() ? 0 : it->second;
            if (expected != row.count) {
                note += " " + std::string(display_name(row.category)) + ": engine " + std::to_string(row.count) +
                        ", reference " + std::to_string(expected) + ".";
            }
        }
        notes.push_back(std::move(note));
    }

    if (!reference.by_asset.empty()) {
        std::size_t ref_total = 0;
        for (const auto& [asset, count] : reference.by_asset) {
            ref_total += count;
        }
        std::string note = count_note("Per-asset table", total(doc.by_asset), ref_total);
        std::string absent;
        std::map<std::string, std::size_t> engine;
        for (const auto& row : doc.by_asset) {
            engine[row.asset] = row.count;
            auto it = reference.by_asset.find(row.asset);
            if (it == reference.by_asset.end()) {
                absent += (absent.empty() ? "" : ", ") + row.asset + " (" + std::to_string(row.count) + ")";
            } else if (it->second != row.count) {
                note += " " + row.asset + ": engine " + std::to_string(row.count) + ", reference " +
                        std::to_string(it->second) + ".";
            }
        }
        for (const auto& [asset, count] : reference.by_asset) {
            if (!engine.contains(asset)) {
                note += " " + asset + ": engine 0, reference " + std::to_string(count) + ".";
            }
        }
        if (!absent.empty()) {
            note += " Not listed in the reference table: " + absent + ".";
        }
        if (total(doc.by_asset) != total(doc.by_category)) {
            note += " Engine per-asset and category totals differ.";
        } else if (ref_total != total(doc.by_asset)) {
            note += " The engine attributes every threat to exactly one asset, so its per-asset total equals the "
                    "category total.";
        }
        notes.push_back(std::move(note));
    }

    if (!reference.top.empty()) {
        std::size_t matched = 0;
        for (std::size_t i = 0; i < reference.top.size() && i < doc.top.size(); ++i) {
            matched += reference.top[i] == doc.top[i] ? 1 : 0;
        }
        std::string note = "Top threats: " + std::to_string(matched) + " of " + std::to_string(reference.top.size()) +
                           " reference rows reproduced in order";
        note += matched == reference.top.size() && doc.top.size() == reference.top.size() ? " (match)." : ".";
        notes.push_back(std::move(note));
    }
    return notes;
}

} // namespace icsthreat
