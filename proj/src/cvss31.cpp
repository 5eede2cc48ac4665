#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>

#include "icsthreat/error.hpp"
#include "icsthreat/scoring.hpp"

namespace icsthreat {

namespace {

using V = Cvss31Vector;

// Allowed values of every metric in the v3.1 grammar.
const std::map<std::string, std::string>& metric_alphabet()
{
    static const std::map<std::string, std::string> table = {
        {"AV", "NALP"}, {"AC", "LH"},    {"PR", "NLH"},   {"UI", "NR"},    {"S", "UC"},
        {"C", "HLN"},   {"I", "HLN"},    {"A", "HLN"},    {"E", "XUPFH"},  {"RL", "XOTWU"},
        {"RC", "XURC"}, {"CR", "XLMH"},  {"IR", "XLMH"},  {"AR", "XLMH"},  {"MAV", "XNALP"},
        {"MAC", "XLH"}, {"MPR", "XNLH"}, {"MUI", "XNR"},  {"MS", "XUC"},   {"MC", "XNLH"},
        {"MI", "XNLH"}, {"MA", "XNLH"},
    };
    return table;
}

V::Impact impact_of(char c)
{
    return c == 'H' ? V::Impact::High : c == 'L' ? V::Impact::Low : V::Impact::None;
}

char impact_letter(V::Impact i)
{
    return i == V::Impact::High ? 'H' : i == V::Impact::Low ? 'L' : 'N';
}

double impact_weight(V::Impact i)
{
    return i == V::Impact::High ? 0.56 : i == V::Impact::Low ? 0.22 : 0.0;
}

} // namespace

Cvss31Vector parse_vector(std::string_view text)
{
    constexpr std::string_view kPrefix = "CVSS:3.1/";
    if (text.substr(0, kPrefix.size()) != kPrefix) {
        throw Error(ErrorCode::ParseError, "vector must start with 'CVSS:3.1/': '" + std::string(text) + "'");
    }
    std::string_view rest = text.substr(kPrefix.size());
    std::map<std::string, char> seen;
    while (true) {
        std::size_t slash = rest.find('/');
        std::string token(rest.substr(0, slash));
        std::size_t colon = token.find(':');
        if (colon == std::string::npos || colon == 0 || colon + 2 != token.size()) {
            throw Error(ErrorCode::ParseError, "malformed metric token '" + token + "'");
        }
        std::string name = token.substr(0, colon);
        char value = token[colon + 1];
        auto alphabet = metric_alphabet().find(name);
        if (alphabet == metric_alphabet().end()) {
            throw Error(ErrorCode::ParseError, "unknown metric '" + token + "'");
        }
        if (alphabet->second.find(value) == std::string::npos) {
            throw Error(ErrorCode::ParseError, "invalid value in '" + token + "'");
        }
        if (!seen.emplace(name, value).second) {
            throw Error(ErrorCode::ParseError, "duplicate metric '" + token + "'");
        }
        if (slash == std::string_view::npos) {
            break;
        }
        rest = rest.substr(slash + 1);
    }
    for (const char* required : {"AV", "AC", "PR", "UI", "S", "C", "I", "A"}) {
        if (!seen.contains(required)) {
            throw Error(ErrorCode::ParseError, std::string("missing base metric '") + required + ":'");
        }
    }

    V v;
    switch (seen["AV"]) {
    case 'N': v.av = V::AttackVector::Network; break;
    case 'A': v.av = V::AttackVector::Adjacent; break;
    case 'L': v.av = V::AttackVector::Local; break;
    default: v.av = V::AttackVector::Physical; break;
    }
    v.ac = seen["AC"] == 'L' ? V::AttackComplexity::Low : V::AttackComplexity::High;
    v.pr = seen["PR"] == 'N' ? V::Privileges::None : seen["PR"] == 'L' ? V::Privileges::Low : V::Privileges::High;
    v.ui = seen["UI"] == 'N' ? V::UserInteraction::None : V::UserInteraction::Required;
    v.s = seen["S"] == 'U' ? V::Scope::Unchanged : V::Scope::Changed;
    v.c = impact_of(seen["C"]);
    v.i = impact_of(seen["I"]);
    v.a = impact_of(seen["A"]);
    return v;
}

std::string Cvss31Vector::to_string() const
{
    static constexpr char kAv[] = {'N', 'A', 'L', 'P'};
    std::string out = "CVSS:3.1/AV:";
    out += kAv[static_cast<int>(av)];
    out += std::string("/AC:") + (ac == AttackComplexity::Low ? 'L' : 'H');
    out += std::string("/PR:") + (pr == Privileges::None ? 'N' : pr == Privileges::Low ? 'L' : 'H');
    out += std::string("/UI:") + (ui == UserInteraction::None ? 'N' : 'R');
    out += std::string("/S:") + (s == Scope::Unchanged ? 'U' : 'C');
    out += std::string("/C:") + impact_letter(c);
    out += std::string("/I:") + impact_letter(i);
    out += std::string("/A:") + impact_letter(a);
    return out;
}

double cvss31_roundup(double x)
{
    const auto scaled = static_cast<std::int64_t>(std::llround(x * 100000.0));
    if (scaled % 10000 == 0) {
        return static_cast<double>(scaled) / 100000.0;
    }
    return (std::floor(static_cast<double>(scaled) / 10000.0) + 1.0) / 10.0;
}

Score score_cvss31_base(const Cvss31Vector& v)
{
    const bool changed = v.s == V::Scope::Changed;

    const double iss = 1.0 - (1.0 - impact_weight(v.c)) * (1.0 - impact_weight(v.i)) * (1.0 - impact_weight(v.a));
    const double impact =
        changed ? 7.52 * (iss - 0.029) - 3.25 * std::pow(iss - 0.02, 15) : 6.42 * iss;

    double av = 0.2;
    switch (v.av) {
    case V::AttackVector::Network: av = 0.85; break;
    case V::AttackVector::Adjacent: av = 0.62; break;
    case V::AttackVector::Local: av = 0.55; break;
    case V::AttackVector::Physical: av = 0.2; break;
    }
    const double ac = v.ac == V::AttackComplexity::Low ? 0.77 : 0.44;
    double pr = 0.85;
    if (v.pr == V::Privileges::Low) {
        pr = changed ? 0.68 : 0.62;
    } else if (v.pr == V::Privileges::High) {
        pr = changed ? 0.5 : 0.27;
    }
    const double ui = v.ui == V::UserInteraction::None ? 0.85 : 0.62;
    const double exploitability = 8.22 * av * ac * pr * ui;

    if (impact <= 0.0) {
        return Score::from_raw(0.0, ScoreMethod::Cvss31Base);
    }
    const double sum = changed ? 1.08 * (impact + exploitability) : impact + exploitability;
    return Score::from_raw(cvss31_roundup(std::min(sum, 10.0)), ScoreMethod::Cvss31Base);
}

} // namespace icsthreat
