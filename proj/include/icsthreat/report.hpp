#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "icsthreat/attack_graph.hpp"
#include "icsthreat/nvd.hpp"
#include "icsthreat/scoring.hpp"
#include "icsthreat/stride.hpp"

namespace icsthreat {

struct CategoryRow {
    StrideCategory category = StrideCategory::Spoofing;
    std::size_t count = 0;

    friend bool operator==(const CategoryRow&, const CategoryRow&) = default;
};

struct AssetRow {
    std::string asset;
    std::size_t count = 0;

    friend bool operator==(const AssetRow&, const AssetRow&) = default;
};

struct TopRow {
    StrideCategory category = StrideCategory::Spoofing;
    std::string interaction;
    int score_tenths = 0;

    double score() const { return score_tenths / 10.0; }

    friend bool operator==(const TopRow&, const TopRow&) = default;
};

struct ReportStep {
    std::string element;
    std::string technique;
    std::string tactic;

    friend bool operator==(const ReportStep&, const ReportStep&) = default;
};

struct ReportPath {
    std::string goal;
    double score = 0.0; // rounded to four decimals
    std::vector<ReportStep> steps;

    friend bool operator==(const ReportPath&, const ReportPath&) = default;
};

struct ReportDocument {
    std::string model;
    std::string digest;
    std::vector<CategoryRow> by_category; // six rows, alphabetical by display name
    std::vector<AssetRow> by_asset;       // sorted by asset id
    std::vector<TopRow> top;
    std::vector<ReportPath> paths;
    std::vector<std::string> notes; // Markdown only

    friend bool operator==(const ReportDocument&, const ReportDocument&) = default;
};

/// Rows by descending score, then STRIDE order, then interaction. Threats
/// sharing (category, interaction) collapse into one row carrying the highest
/// score. Unscored threats are left out. BAD_BOUNDS when n is 0.
std::vector<TopRow> top_n(const ScoredThreatSet& threats, std::size_t n);

ReportDocument build_report(const ScoredThreatSet& threats, std::size_t top, const std::vector<AttackPath>& paths,
                            std::string digest);

/// "sha256:<hex>" over the given inputs, each length-prefixed.
std::string input_digest(const std::vector<std::string>& inputs);

std::string render_markdown(const ReportDocument& doc);

/// {model, digest, summary_by_category, summary_by_asset, top_threats, paths}.
std::string render_json(const ReportDocument& doc);
/// Inverse of render_json (notes are not part of the JSON). PARSE_ERROR.
ReportDocument parse_report_json(std::string_view text);

/// Published tables to compare a report against.
struct ReferenceTables {
    std::map<StrideCategory, std::size_t> by_category;
    std::map<std::string, std::size_t> by_asset;
    std::vector<TopRow> top;
};

/// {summary_by_category: {category: count}, summary_by_asset: {asset: count},
///  top_threats: [{category, interaction, score}]}; every section optional.
ReferenceTables load_reference(std::string_view text);

/// One note per compared table stating totals and any differing rows.
std::vector<std::string> compare_with_reference(const ReportDocument& doc, const ReferenceTables& reference);

} // namespace icsthreat
