#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "icsthreat/scoring.hpp"
#include "icsthreat/stride.hpp"

namespace icsthreat {

struct CveRecord {
    std::string cve_id;
    std::string description;
    std::vector<std::string> vendor_tags;
    std::optional<double> base_score;
    std::optional<std::string> vector_string;

    /// base_score when present, else the v3.1 base score of vector_string.
    std::optional<Score> score() const;

    friend bool operator==(const CveRecord&, const CveRecord&) = default;
};

/// "CVE-YYYY-NNNN" with four or more sequence digits.
bool is_cve_id(std::string_view text);

/// Immutable once built; records are kept sorted by cve_id.
class CveCatalog {
public:
    CveCatalog() = default;
    /// DUP_CVE on a repeated id.
    CveCatalog(std::vector<CveRecord> records, std::string source = {}, std::string retrieved = {});

    const std::vector<CveRecord>& records() const { return records_; }
    const std::string& source() const { return source_; }
    const std::string& retrieved() const { return retrieved_; }
    std::size_t size() const { return records_.size(); }

    const CveRecord* find(std::string_view cve_id) const;

    friend bool operator==(const CveCatalog&, const CveCatalog&) = default;

private:
    std::vector<CveRecord> records_;
    std::string source_;
    std::string retrieved_;
};

/// {source, retrieved, records: [{cve_id, description, vendor_tags, base_score?, vector_string?}]}.
/// PARSE_ERROR, DUP_CVE.
CveCatalog load_feed(std::string_view text);
std::string write_feed(const CveCatalog& catalog);

/// Case-insensitive substring match over vendor tags and description, by cve_id.
std::vector<CveRecord> query_by_keyword(const CveCatalog& catalog, std::string_view keyword);

struct ScoreBinding {
    std::string interaction;
    StrideCategory category = StrideCategory::Spoofing;
    std::optional<std::string> cve_id;
    std::optional<double> score; // manual score when no CVE is named

    friend bool operator==(const ScoreBinding&, const ScoreBinding&) = default;
};

/// JSON array of {interaction, category, cve_id?, score?}; exactly one of
/// cve_id and score. A second binding for the same (interaction, category)
/// is UNKNOWN_BINDING.
std::vector<ScoreBinding> load_bindings(std::string_view text);

struct ScoredThreat {
    Threat threat;
    std::optional<Score> score;
    std::optional<std::string> cve_id; // source of the score, if a CVE
};

struct ScoredThreatSet {
    std::string model_name;
    std::vector<ScoredThreat> threats;

    std::size_t size() const { return threats.size(); }
};

/// Scored threats first by descending score, then STRIDE order, interaction
/// and rule id; unscored threats after them in canonical order.
bool scored_less(const ScoredThreat& a, const ScoredThreat& b);

/// A binding scores every threat with its (interaction, category). Threats
/// left without a score take the fallback when one is given. UNKNOWN_BINDING
/// when a binding matches no threat, names a CVE missing from the catalog, or
/// repeats a pair.
ScoredThreatSet attach_scores(const ThreatSet& threats, const CveCatalog& catalog,
                              const std::vector<ScoreBinding>& bindings,
                              const std::optional<OverallMetrics>& fallback = std::nullopt);

struct FetchOptions {
    std::string endpoint; // e.g. https://services.nvd.nist.gov/rest/json/cves/2.0
    std::string keyword;
    std::string output_path;
    std::string api_key; // sent as the apiKey header when non-empty
    std::size_t page_size = 2000;
    int timeout_seconds = 30;
};

/// Pages through the CVE API 2.0 keyword search and writes a feed file.
/// The file is written only after every page arrived. Returns the record
/// count. NETWORK_ERROR, RATE_LIMITED (HTTP 403/429), BAD_RESPONSE, IO_ERROR.
std::size_t fetch_remote(const FetchOptions& options);

struct ApiPage {
    std::vector<CveRecord> records;
    std::size_t total_results = 0;
    std::string timestamp; // server timestamp, empty when absent
};

/// One API 2.0 response page. Vendor tags are the keyword plus the vendors
/// named in CPE criteria. BAD_RESPONSE on shape errors.
ApiPage parse_api_page(std::string_view body, std::string_view keyword);

} // namespace icsthreat
