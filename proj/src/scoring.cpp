#include "icsthreat/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <utility>

#include "icsthreat/error.hpp"
#include "text_util.hpp"

namespace icsthreat {

std::string_view to_string(ScoreMethod method)
{
    return method == ScoreMethod::Overall ? "overall" : "cvss31";
}

Score Score::from_raw(double raw, ScoreMethod method)
{
    if (std::isnan(raw)) {
        raw = 0.0;
    }
    double clamped = std::clamp(raw, 0.0, 10.0);
    // The epsilon keeps values such as 7.35 (stored as 7.34999...) rounding up.
    int tenths = static_cast<int>(std::floor(clamped * 10.0 + 0.5 + 1e-9));
    return Score(std::min(tenths, 100), method);
}

std::string Score::to_string() const
{
    return std::to_string(tenths_ / 10) + "." + std::to_string(tenths_ % 10);
}

std::string_view to_string(SeverityRating rating)
{
    switch (rating) {
    case SeverityRating::None: return "None";
    case SeverityRating::Low: return "Low";
    case SeverityRating::Medium: return "Medium";
    case SeverityRating::High: return "High";
    case SeverityRating::Critical: return "Critical";
    }
    return "None";
}

SeverityRating severity_bucket(const Score& score)
{
    const int t = score.tenths();
    if (t == 0) return SeverityRating::None;
    if (t < 40) return SeverityRating::Low;
    if (t < 70) return SeverityRating::Medium;
    if (t < 90) return SeverityRating::High;
    return SeverityRating::Critical;
}

// ---------------------------------------------------------------------------

double weight(ImpactLevel level)
{
    switch (level) {
    case ImpactLevel::None: return 0.0;
    case ImpactLevel::Partial: return 0.5;
    case ImpactLevel::Complete: return 1.0;
    }
    return 0.0;
}

double weight(Exploitability level)
{
    switch (level) {
    case Exploitability::Unproven: return 0.85;
    case Exploitability::ProofOfConcept: return 0.9;
    case Exploitability::Functional: return 0.95;
    case Exploitability::High: return 1.0;
    }
    return 0.0;
}

double weight(ImpactRating level)
{
    switch (level) {
    case ImpactRating::None: return 0.0;
    case ImpactRating::Low: return 0.22;
    case ImpactRating::Medium: return 0.56;
    case ImpactRating::High: return 0.7;
    case ImpactRating::Critical: return 0.85;
    }
    return 0.0;
}

double weight(ExploitCodeMaturity level)
{
    switch (level) {
    case ExploitCodeMaturity::NotDefined: return 0.0;
    case ExploitCodeMaturity::Unproven: return 0.9;
    case ExploitCodeMaturity::ProofOfConcept: return 0.95;
    case ExploitCodeMaturity::Functional: return 1.0;
    case ExploitCodeMaturity::High: return 1.0;
    }
    return 0.0;
}

double weight(RemediationLevel level)
{
    switch (level) {
    case RemediationLevel::OfficialFix: return 0.0;
    case RemediationLevel::TemporaryFix: return 0.25;
    case RemediationLevel::Workaround: return 0.75;
    case RemediationLevel::Unavailable: return 1.0;
    }
    return 0.0;
}

double weight(ReportConfidence level)
{
    switch (level) {
    case ReportConfidence::Unconfirmed: return 0.0;
    case ReportConfidence::Uncorroborated: return 0.5;
    case ReportConfidence::Confirmed: return 1.0;
    }
    return 0.0;
}

double weight(CollateralDamage level)
{
    switch (level) {
    case CollateralDamage::None: return 0.0;
    case CollateralDamage::Low: return 0.1;
    case CollateralDamage::LowMedium: return 0.3;
    case CollateralDamage::MediumHigh: return 0.4;
    case CollateralDamage::High: return 0.5;
    }
    return 0.0;
}

double weight(TargetDistribution level)
{
    switch (level) {
    case TargetDistribution::None: return 0.0;
    case TargetDistribution::Low: return 0.25;
    case TargetDistribution::Medium: return 0.75;
    case TargetDistribution::High: return 1.0;
    }
    return 0.0;
}

double weight(Requirement level)
{
    switch (level) {
    case Requirement::NotDefined: return 0.0;
    case Requirement::Low: return 0.5;
    case Requirement::Medium: return 1.0;
    case Requirement::High: return 1.51;
    }
    return 0.0;
}

double overall_raw(const BaseMetrics& b, const TemporalMetrics& t, const EnvironmentalMetrics& e)
{
    const double c = weight(b.confidentiality);
    const double i = weight(b.integrity);
    const double a = weight(b.availability);
    const double cdp = weight(e.collateral_damage);

    const double numerator = (1.0 - (1.0 - c) * (1.0 - i) * (1.0 - a)) *
                             (weight(t.exploit_code_maturity) * weight(t.remediation_level) *
                              weight(t.report_confidence));
    const double denominator = (0.6 * (1.0 - c) + 0.4 * (1.0 - cdp)) * weight(b.impact) + 0.6 * cdp;

    if (denominator == 0.0) {
        return numerator == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return numerator / denominator * weight(b.exploitability);
}

Score score_overall(const BaseMetrics& b, const TemporalMetrics& t, const EnvironmentalMetrics& e)
{
    return Score::from_raw(overall_raw(b, t, e), ScoreMethod::Overall);
}

// ---------------------------------------------------------------------------

namespace {

template <typename Enum>
using Labels = std::vector<std::pair<std::string_view, Enum>>;

template <typename Enum>
Enum parse_level(std::string_view metric, std::string_view text, const Labels<Enum>& labels)
{
    const std::string folded = detail::fold_label(text);
    for (const auto& [label, value] : labels) {
        if (detail::fold_label(label) == folded) {
            return value;
        }
    }
    std::string allowed;
    for (const auto& [label, value] : labels) {
        allowed += (allowed.empty() ? "" : ", ") + std::string(label);
    }
    throw Error(ErrorCode::ParseError,
                "invalid level '" + std::string(text) + "' for " + std::string(metric) + " (expected " + allowed + ")");
}

const Labels<ImpactLevel> kImpactLevels = {
    {"None", ImpactLevel::None}, {"Partial", ImpactLevel::Partial}, {"Complete", ImpactLevel::Complete}};

} // namespace

OverallMetrics parse_overall_metrics(const std::vector<std::string>& pairs)
{
    std::map<std::string, std::string> values;
    for (const auto& pair : pairs) {
        auto eq = pair.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == pair.size()) {
            throw Error(ErrorCode::ParseError, "expected NAME=Level, got '" + pair + "'");
        }
        std::string name = pair.substr(0, eq);
        if (!values.emplace(name, pair.substr(eq + 1)).second) {
            throw Error(ErrorCode::ParseError, "metric '" + name + "' given twice");
        }
    }

    static const std::set<std::string> kRequired = {"C", "I", "A", "E_base", "IMP", "E_t", "RL", "RC", "CDP"};
    static const std::set<std::string> kOptional = {"AV", "AC", "Au", "TD", "CR", "IR", "AR"};
    for (const auto& [name, value] : values) {
        if (!kRequired.contains(name) && !kOptional.contains(name)) {
            throw Error(ErrorCode::ParseError, "unknown metric '" + name + "'");
        }
    }
    std::string missing;
    for (const auto& name : kRequired) {
        if (!values.contains(name)) {
            missing += (missing.empty() ? "" : ", ") + name;
        }
    }
    if (!missing.empty()) {
        throw Error(ErrorCode::ParseError, "missing metric(s): " + missing);
    }

    OverallMetrics m;
    auto has = [&](const char* name) { return values.contains(name); };

    m.base.confidentiality = parse_level("C", values["C"], kImpactLevels);
    m.base.integrity = parse_level("I", values["I"], kImpactLevels);
    m.base.availability = parse_level("A", values["A"], kImpactLevels);
    m.base.exploitability = parse_level<Exploitability>(
        "E_base", values["E_base"],
        {{"Unproven", Exploitability::Unproven},
         {"ProofOfConcept", Exploitability::ProofOfConcept},
         {"Functional", Exploitability::Functional},
         {"High", Exploitability::High}});
    m.base.impact = parse_level<ImpactRating>("IMP", values["IMP"],
                                              {{"None", ImpactRating::None},
                                               {"Low", ImpactRating::Low},
                                               {"Medium", ImpactRating::Medium},
                                               {"High", ImpactRating::High},
                                               {"Critical", ImpactRating::Critical}});
    if (has("AV")) {
        m.base.access_vector = parse_level<AccessVector>("AV", values["AV"],
                                                         {{"Local", AccessVector::Local},
                                                          {"AdjacentNetwork", AccessVector::AdjacentNetwork},
                                                          {"Network", AccessVector::Network}});
    }
    if (has("AC")) {
        m.base.access_complexity = parse_level<AccessComplexity>(
            "AC", values["AC"],
            {{"Low", AccessComplexity::Low}, {"Medium", AccessComplexity::Medium}, {"High", AccessComplexity::High}});
    }
    if (has("Au")) {
        m.base.authentication = parse_level<Authentication>(
            "Au", values["Au"],
            {{"None", Authentication::None}, {"Single", Authentication::Single}, {"Multiple", Authentication::Multiple}});
    }

    m.temporal.exploit_code_maturity = parse_level<ExploitCodeMaturity>(
        "E_t", values["E_t"],
        {{"NotDefined", ExploitCodeMaturity::NotDefined},
         {"Unproven", ExploitCodeMaturity::Unproven},
         {"ProofOfConcept", ExploitCodeMaturity::ProofOfConcept},
         {"Functional", ExploitCodeMaturity::Functional},
         {"High", ExploitCodeMaturity::High}});
    m.temporal.remediation_level = parse_level<RemediationLevel>(
        "RL", values["RL"],
        {{"OfficialFix", RemediationLevel::OfficialFix},
         {"TemporaryFix", RemediationLevel::TemporaryFix},
         {"Workaround", RemediationLevel::Workaround},
         {"Unavailable", RemediationLevel::Unavailable}});
    m.temporal.report_confidence = parse_level<ReportConfidence>(
        "RC", values["RC"],
        {{"Unconfirmed", ReportConfidence::Unconfirmed},
         {"Uncorroborated", ReportConfidence::Uncorroborated},
         {"Confirmed", ReportConfidence::Confirmed}});

    m.environmental.collateral_damage = parse_level<CollateralDamage>(
        "CDP", values["CDP"],
        {{"None", CollateralDamage::None},
         {"Low", CollateralDamage::Low},
         {"LowMedium", CollateralDamage::LowMedium},
         {"MediumHigh", CollateralDamage::MediumHigh},
         {"High", CollateralDamage::High}});
    if (has("TD")) {
        m.environmental.target_distribution = parse_level<TargetDistribution>(
            "TD", values["TD"],
            {{"None", TargetDistribution::None},
             {"Low", TargetDistribution::Low},
             {"Medium", TargetDistribution::Medium},
             {"High", TargetDistribution::High}});
    }
    const Labels<Requirement> requirement = {{"NotDefined", Requirement::NotDefined},
                                             {"Low", Requirement::Low},
                                             {"Medium", Requirement::Medium},
                                             {"High", Requirement::High}};
    if (has("CR")) m.environmental.confidentiality_req = parse_level("CR", values["CR"], requirement);
    if (has("IR")) m.environmental.integrity_req = parse_level("IR", values["IR"], requirement);
    if (has("AR")) m.environmental.availability_req = parse_level("AR", values["AR"], requirement);
    return m;
}

} // namespace icsthreat
