#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace proxyval {

// Compatibility-width folding + case folding for catalog vocabulary.
//
// Product names and ingredient tokens mix ASCII, fullwidth Latin and
// halfwidth katakana. Matching has to be invariant under letter case and
// Unicode width, so every string is pushed through the same folding before
// comparison:
//   - fullwidth ASCII U+FF01..U+FF5E -> U+0021..U+007E
//   - ideographic space U+3000 -> ' '
//   - halfwidth katakana U+FF61..U+FF9F -> fullwidth, composing voiced and
//     semi-voiced marks (e.g. the halfwidth KA + voiced mark pair becomes GA)
//   - ASCII A..Z -> a..z (after width folding, so fullwidth letters fold too)
// Invalid UTF-8 bytes pass through untouched.

std::vector<char32_t> utf8_decode(std::string_view s);
std::string utf8_encode(const std::vector<char32_t>& cps);

// Width folding + case folding, whitespace preserved.
std::string normalize_text(std::string_view s);

// normalize_text plus surrounding-whitespace trim; the canonical form for
// ingredient tokens, keywords and enum values.
std::string normalize_token(std::string_view s);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

}  // namespace proxyval
