#pragma once

#include <string>
#include <vector>

namespace signspot {

class Word;
class Vocabulary;

// Subtitle normalization: lowercase, strip punctuation (a trailing
// apostrophe-s collapses to the bare noun: "friend's" -> "friend"),
// spell out standalone integers 0..999 ("20" -> "twenty"), split on
// whitespace. Larger numbers pass through unchanged.
std::vector<std::string> normalize_tokens(const std::string& raw);

// Spelled-out form of n in [0, 999] as space-separated lowercase tokens.
std::string spell_number(int n);

// Fixed rule-table lemmatizer, applied to fixpoint so it is idempotent:
//   "es" after a sibilant (s, x, z, ch, sh) is stripped,
//   a plain trailing "s" (not "ss") is stripped when the word is long enough,
//   "ing"/"ed" are stripped with consonant-doubling undone ("running"->"run").
std::string lemmatize_token(const std::string& token);

}  // namespace signspot
