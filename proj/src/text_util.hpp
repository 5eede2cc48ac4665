#pragma once

#include <string>
#include <string_view>

namespace icsthreat::detail {

std::string to_lower(std::string_view text);

/// Lowercase with spaces, hyphens and underscores removed; used to compare
/// enumeration labels written in different styles ("Proof-of-Concept",
/// "proof_of_concept", "ProofOfConcept").
std::string fold_label(std::string_view text);

/// Lowercase ASCII slug: runs of non-alphanumerics become a single '-'.
std::string slugify(std::string_view text);

/// Quoted DOT identifier/label with backslash and quote escaped.
std::string dot_quote(std::string_view text);

/// Escapes '|' so the text can sit inside a Markdown table cell.
std::string md_cell(std::string_view text);

/// Fixed one-decimal rendering, e.g. 9.8 -> "9.8", 10 -> "10.0".
std::string format_tenths(double value);

} // namespace icsthreat::detail
