#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace icsthreat {

enum class ScoreMethod { Overall, Cvss31Base };

std::string_view to_string(ScoreMethod method);

/// A 0.0-10.0 score with one decimal.
class Score {
public:
    /// Clamps to [0, 10] and rounds half-up to one decimal.
    static Score from_raw(double raw, ScoreMethod method);

    double value() const { return tenths_ / 10.0; }
    int tenths() const { return tenths_; }
    ScoreMethod method() const { return method_; }
    std::string to_string() const;

    friend bool operator==(const Score&, const Score&) = default;

private:
    Score(int tenths, ScoreMethod method) : tenths_(tenths), method_(method) {}
    int tenths_;
    ScoreMethod method_;
};

enum class SeverityRating { None, Low, Medium, High, Critical };

std::string_view to_string(SeverityRating rating);

SeverityRating severity_bucket(const Score& score);

// ---------------------------------------------------------------------------
// Weighted metric groups used by the overall-score formula. AV, AC, Au, TD,
// CR, IR and AR are accepted and carried but do not enter the formula.

enum class AccessVector { Local, AdjacentNetwork, Network };
enum class AccessComplexity { Low, Medium, High };
enum class Authentication { None, Single, Multiple };
enum class ImpactLevel { None, Partial, Complete };
enum class Exploitability { Unproven, ProofOfConcept, Functional, High };
enum class ImpactRating { None, Low, Medium, High, Critical };
enum class ExploitCodeMaturity { NotDefined, Unproven, ProofOfConcept, Functional, High };
enum class RemediationLevel { OfficialFix, TemporaryFix, Workaround, Unavailable };
enum class ReportConfidence { Unconfirmed, Uncorroborated, Confirmed };
enum class CollateralDamage { None, Low, LowMedium, MediumHigh, High };
enum class TargetDistribution { None, Low, Medium, High };
enum class Requirement { NotDefined, Low, Medium, High };

double weight(ImpactLevel level);
double weight(Exploitability level);
double weight(ImpactRating level);
double weight(ExploitCodeMaturity level);
double weight(RemediationLevel level);
double weight(ReportConfidence level);
double weight(CollateralDamage level);
double weight(TargetDistribution level);
double weight(Requirement level);

struct BaseMetrics {
    AccessVector access_vector = AccessVector::Network;
    AccessComplexity access_complexity = AccessComplexity::Low;
    Authentication authentication = Authentication::None;
    ImpactLevel confidentiality = ImpactLevel::None;
    ImpactLevel integrity = ImpactLevel::None;
    ImpactLevel availability = ImpactLevel::None;
    Exploitability exploitability = Exploitability::Unproven;
    ImpactRating impact = ImpactRating::None;
};

struct TemporalMetrics {
    ExploitCodeMaturity exploit_code_maturity = ExploitCodeMaturity::NotDefined;
    RemediationLevel remediation_level = RemediationLevel::OfficialFix;
    ReportConfidence report_confidence = ReportConfidence::Unconfirmed;
};

struct EnvironmentalMetrics {
    CollateralDamage collateral_damage = CollateralDamage::None;
    TargetDistribution target_distribution = TargetDistribution::None;
    Requirement confidentiality_req = Requirement::NotDefined;
    Requirement integrity_req = Requirement::NotDefined;
    Requirement availability_req = Requirement::NotDefined;
};

struct OverallMetrics {
    BaseMetrics base;
    TemporalMetrics temporal;
    EnvironmentalMetrics environmental;
};

/// Unclamped value of the overall-score formula:
///
///   (1 - (1-C)(1-I)(1-A)) * (E_t * RL * RC)
///   ---------------------------------------------------- * E_base
///   (0.6(1-C) + 0.4(1-CDP)) * IMP + 0.6 * CDP
///
/// A zero denominator yields 0 when the numerator is 0 and +infinity otherwise.
double overall_raw(const BaseMetrics& b, const TemporalMetrics& t, const EnvironmentalMetrics& e);

/// overall_raw clamped to [0, 10] and rounded half-up to one decimal.
Score score_overall(const BaseMetrics& b, const TemporalMetrics& t, const EnvironmentalMetrics& e);
inline Score score_overall(const OverallMetrics& m) { return score_overall(m.base, m.temporal, m.environmental); }

/// Parses `NAME=Level` pairs. C, I, A, E_base, IMP, E_t, RL, RC and CDP are
/// required; AV, AC, Au, TD, CR, IR, AR are optional. Levels are matched
/// ignoring case, spaces, hyphens and underscores. PARSE_ERROR otherwise.
OverallMetrics parse_overall_metrics(const std::vector<std::string>& pairs);

// ---------------------------------------------------------------------------
// CVSS v3.1 base score

struct Cvss31Vector {
    enum class AttackVector { Network, Adjacent, Local, Physical };
    enum class AttackComplexity { Low, High };
    enum class Privileges { None, Low, High };
    enum class UserInteraction { None, Required };
    enum class Scope { Unchanged, Changed };
    enum class Impact { High, Low, None };

    AttackVector av = AttackVector::Network;
    AttackComplexity ac = AttackComplexity::Low;
    Privileges pr = Privileges::None;
    UserInteraction ui = UserInteraction::None;
    Scope s = Scope::Unchanged;
    Impact c = Impact::None;
    Impact i = Impact::None;
    Impact a = Impact::None;

    /// "CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H" in canonical metric order.
    std::string to_string() const;

    friend bool operator==(const Cvss31Vector&, const Cvss31Vector&) = default;
};

/// Accepts the official grammar: "CVSS:3.1/" prefix, metrics in any order,
/// all eight base metrics exactly once, optional temporal/environmental
/// metrics validated and ignored. PARSE_ERROR names the offending token.
Cvss31Vector parse_vector(std::string_view text);

Score score_cvss31_base(const Cvss31Vector& vector);

/// CVSS v3.1 Roundup: smallest one-decimal value >= x,
/// computed on integers to avoid floating-point drift.
double cvss31_roundup(double x);

} // namespace icsthreat
