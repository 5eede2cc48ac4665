#include "icsthreat/nvd.hpp"

#include <algorithm>
#include <map>
#include <regex>
#include <set>
#include <tuple>
#include <utility>

#include "icsthreat/error.hpp"
#include "json_util.hpp"
#include "text_util.hpp"

namespace icsthreat {

using detail::Json;
using detail::OrderedJson;

bool is_cve_id(std::string_view text)
{
    static const std::regex pattern(R"(CVE-\d{4}-\d{4,})");
    return std::regex_match(text.begin(), text.end(), pattern);
}

std::optional<Score> CveRecord::score() const
{
    if (base_score) {
        return Score::from_raw(*base_score, ScoreMethod::Cvss31Base);
    }
    if (vector_string && vector_string->rfind("CVSS:3.1/", 0) == 0) {
        return score_cvss31_base(parse_vector(*vector_string));
    }
    return std::nullopt;
}

CveCatalog::CveCatalog(std::vector<CveRecord> records, std::string source, std::string retrieved)
    : records_(std::move(records)), source_(std::move(source)), retrieved_(std::move(retrieved))
{
    std::sort(records_.begin(), records_.end(),
              [](const CveRecord& a, const CveRecord& b) { return a.cve_id < b.cve_id; });
    auto dup = std::adjacent_find(records_.begin(), records_.end(),
                                  [](const CveRecord& a, const CveRecord& b) { return a.cve_id == b.cve_id; });
    if (dup != records_.end()) {
        throw Error(ErrorCode::DupCve, "CVE '" + dup->cve_id + "' appears more than once");
    }
}

const CveRecord* CveCatalog::find(std::string_view cve_id) const
{
    auto it = std::lower_bound(records_.begin(), records_.end(), cve_id,
                               [](const CveRecord& r, std::string_view id) { return r.cve_id < id; });
    return it != records_.end() && it->cve_id == cve_id ? &*it : nullptr;
}

CveCatalog load_feed(std::string_view text)
{
    Json root = detail::parse_json(text, "feed");
    detail::require_object(root, "");
    detail::check_keys(root, {"source", "retrieved", "records"}, "");
    std::string source = detail::optional_string(root, "source", "");
    std::string retrieved = detail::optional_string(root, "retrieved", "");
    static const std::regex iso_date(R"(\d{4}-\d{2}-\d{2}([T ].*)?)");
    if (!retrieved.empty() && !std::regex_match(retrieved, iso_date)) {
        detail::schema_error("retrieved", "expected an ISO-8601 date, got '" + retrieved + "'");
    }

    std::vector<CveRecord> records;
    const Json& list = detail::require_array(root, "records", "");
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string path = detail::index_path("records", i);
        const Json& entry = list[i];
        detail::require_object(entry, path);
        detail::check_keys(entry, {"cve_id", "description", "vendor_tags", "base_score", "vector_string"}, path);
        CveRecord r;
        r.cve_id = detail::require_string(entry, "cve_id", path);
        if (!is_cve_id(r.cve_id)) {
            detail::schema_error(path + ".cve_id", "'" + r.cve_id + "' is not a CVE id");
        }
        r.description = detail::optional_string(entry, "description", path);
        if (entry.contains("vendor_tags")) {
            r.vendor_tags = detail::require_string_array(entry, "vendor_tags", path);
        }
        r.base_score = detail::optional_number(entry, "base_score", path);
        if (r.base_score && !(*r.base_score >= 0.0 && *r.base_score <= 10.0)) {
            detail::schema_error(path + ".base_score", "must lie in [0, 10]");
        }
        std::string vector = detail::optional_string(entry, "vector_string", path);
        if (!vector.empty()) {
            r.vector_string = vector;
            if (vector.rfind("CVSS:3.1/", 0) == 0) {
                try {
                    parse_vector(vector);
                } catch (const Error& e) {
                    detail::schema_error(path + ".vector_string", e.what());
                }
            }
        }
        records.push_back(std::move(r));
    }
    return CveCatalog(std::move(records), std::move(source), std::move(retrieved));
}

std::string write_feed(const CveCatalog& catalog)
{
    OrderedJson records = OrderedJson::array();
    for (const auto& r : catalog.records()) {
        OrderedJson entry;
        entry["cve_id"] = r.cve_id;
        entry["description"] = r.description;
        entry["vendor_tags"] = r.vendor_tags;
        if (r.base_score) {
            entry["base_score"] = *r.base_score;
        }
        if (r.vector_string) {
            entry["vector_string"] = *r.vector_string;
        }
        records.push_back(std::move(entry));
    }
    OrderedJson root;
    root["source"] = catalog.source();
    root["retrieved"] = catalog.retrieved();
    root["records"] = std::move(records);
    return detail::dump_canonical(root);
}

std::vector<CveRecord> query_by_keyword(const CveCatalog& catalog, std::string_view keyword)
{
    const std::string needle = detail::to_lower(keyword);
    std::vector<CveRecord> out;
    for (const auto& r : catalog.records()) {
        bool hit = detail::to_lower(r.description).find(needle) != std::string::npos;
        for (const auto& tag : r.vendor_tags) {
            hit = hit || detail::to_lower(tag).find(needle) != std::string::npos;
        }
        if (hit) {
            out.push_back(r);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

std::vector<ScoreBinding> load_bindings(std::string_view text)
{
    Json root = detail::parse_json(text, "bindings");
    if (!root.is_array()) {
        detail::schema_error("", "expected an array of bindings");
    }
    std::vector<ScoreBinding> out;
    std::set<std::pair<std::string, StrideCategory>> seen;
    for (std::size_t i = 0; i < root.size(); ++i) {
        const std::string path = detail::index_path("", i);
        const Json& entry = root[i];
        detail::require_object(entry, path);
        detail::check_keys(entry, {"interaction", "category", "cve_id", "score"}, path);
        ScoreBinding b;
        b.interaction = detail::require_string(entry, "interaction", path);
        const std::string category = detail::require_string(entry, "category", path);
        auto parsed = parse_category(category);
        if (!parsed) {
            detail::schema_error(path + ".category", "unknown STRIDE category '" + category + "'");
        }
        b.category = *parsed;
        std::string cve = detail::optional_string(entry, "cve_id", path);
        if (!cve.empty()) {
            if (!is_cve_id(cve)) {
                detail::schema_error(path + ".cve_id", "'" + cve + "' is not a CVE id");
            }
            b.cve_id = cve;
        }
        b.score = detail::optional_number(entry, "score", path);
        if (b.cve_id.has_value() == b.score.has_value()) {
            detail::schema_error(path, "give exactly one of 'cve_id' and 'score'");
        }
        if (b.score && !(*b.score >= 0.0 && *b.score <= 10.0)) {
            detail::schema_error(path + ".score", "must lie in [0, 10]");
        }
        if (!seen.emplace(b.interaction, b.category).second) {
            throw Error(ErrorCode::UnknownBinding, path + ": (" + b.interaction + ", " +
                                                       std::string(token(b.category)) + ") is already bound");
        }
        out.push_back(std::move(b));
    }
    return out;
}

bool scored_less(const ScoredThreat& a, const ScoredThreat& b)
{
    if (a.score.has_value() != b.score.has_value()) {
        return a.score.has_value();
    }
    if (!a.score) {
        return canonical_less(a.threat, b.threat);
    }
    if (a.score->tenths() != b.score->tenths()) {
        return a.score->tenths() > b.score->tenths();
    }
    return std::tie(a.threat.category, a.threat.interaction, a.threat.rule_id) <
           std::tie(b.threat.category, b.threat.interaction, b.threat.rule_id);
}

ScoredThreatSet attach_scores(const ThreatSet& threats, const CveCatalog& catalog,
                              const std::vector<ScoreBinding>& bindings, const std::optional<OverallMetrics>& fallback)
{
    struct Resolved {
        std::optional<Score> score;
        std::optional<std::string> cve_id;
        bool used = false;
    };
    std::map<std::pair<std::string, StrideCategory>, Resolved> by_pair;
    for (const auto& b : bindings) {
        Resolved r;
        if (b.cve_id) {
            const CveRecord* record = catalog.find(*b.cve_id);
            if (record == nullptr) {
                throw Error(ErrorCode::UnknownBinding, "binding for " + b.interaction + " names '" + *b.cve_id +
                                                           "', which is not in the feed");
            }
            r.score = record->score();
            r.cve_id = b.cve_id;
        } else {
            r.score = Score::from_raw(*b.score, ScoreMethod::Cvss31Base);
        }
        if (!by_pair.emplace(std::make_pair(b.interaction, b.category), std::move(r)).second) {
            throw Error(ErrorCode::UnknownBinding, "(" + b.interaction + ", " + std::string(token(b.category)) +
                                                       ") is bound twice");
        }
    }

    std::optional<Score> fallback_score;
    if (fallback) {
        fallback_score = score_overall(*fallback);
    }

    ScoredThreatSet out;
    out.model_name = threats.model_name;
    for (const auto& t : threats.threats) {
        ScoredThreat s{t, std::nullopt, std::nullopt};
        auto it = by_pair.find({t.interaction, t.category});
        if (it != by_pair.end()) {
            it->second.used = true;
            s.score = it->second.score;
            if (s.score) {
                s.cve_id = it->second.cve_id;
            }
        }
        if (!s.score) {
            s.score = fallback_score;
        }
        out.threats.push_back(std::move(s));
    }
    for (const auto& [pair, r] : by_pair) {
        if (!r.used) {
            throw Error(ErrorCode::UnknownBinding, "no " + std::string(token(pair.second)) + " threat on '" +
                                                       pair.first + "'");
        }
    }
    std::stable_sort(out.threats.begin(), out.threats.end(), scored_less);
    return out;
}

} // namespace icsthreat
