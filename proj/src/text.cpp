#include "signspot/text.hpp"

#include <array>
#include <cctype>

namespace signspot {

namespace {

bool is_alnum(unsigned char c) { return std::isalnum(c) != 0; }
bool is_digit_token(const std::string& t) {
  if (t.empty()) return false;
  for (unsigned char c : t)
    if (!std::isdigit(c)) return false;
  return true;
}

constexpr std::array<const char*, 20> kSmall = {
    "zero",    "one",     "two",       "three",    "four",
    "five",    "six",     "seven",     "eight",    "nine",
    "ten",     "eleven",  "twelve",    "thirteen", "fourteen",
    "fifteen", "sixteen", "seventeen", "eighteen", "nineteen"};
constexpr std::array<const char*, 10> kTens = {
    "",      "",      "twenty",  "thirty", "forty",
    "fifty", "sixty", "seventy", "eighty", "ninety"};

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

bool ends_with(const std::string& s, const char* suffix) {
  std::string suf(suffix);
  return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

// One rule application; returns the input unchanged when no rule fires.
std::string lemma_step(const std::string& w) {
  size_t n = w.size();
  if (n >= 6 && ends_with(w, "ing")) {
    std::string stem = w.substr(0, n - 3);
    size_t m = stem.size();
    if (m >= 3 && stem[m - 1] == stem[m - 2] && !is_vowel(stem[m - 1])) stem.pop_back();
    return stem;
  }
  if (n >= 5 && ends_with(w, "ed")) {
    std::string stem = w.substr(0, n - 2);
    size_t m = stem.size();
    if (m >= 3 && stem[m - 1] == stem[m - 2] && !is_vowel(stem[m - 1])) stem.pop_back();
    return stem;
  }
  if (n >= 5 && ends_with(w, "es")) {
    std::string stem = w.substr(0, n - 2);
    char last = stem.empty() ? '\0' : stem.back();
    bool sibilant = last == 's' || last == 'x' || last == 'z' ||
                    ends_with(stem, "ch") || ends_with(stem, "sh");
    if (sibilant) return stem;
  }
  if (n > 3 && w.back() == 's' && !ends_with(w, "ss")) return w.substr(0, n - 1);
  return w;
}

}  // namespace

std::string spell_number(int n) {
  if (n < 0 || n > 999) return std::to_string(n);
  if (n < 20) return kSmall[static_cast<size_t>(n)];
  std::string out;
  if (n >= 100) {
    out = std::string(kSmall[static_cast<size_t>(n / 100)]) + " hundred";
    n %= 100;
    if (n == 0) return out;
    out += ' ';
  }
  if (n < 20) return out + kSmall[static_cast<size_t>(n)];
  out += kTens[static_cast<size_t>(n / 10)];
  if (n % 10) out += std::string(" ") + kSmall[static_cast<size_t>(n % 10)];
  return out;
}

std::vector<std::string> normalize_tokens(const std::string& raw) {
  // Lowercase and resolve apostrophes first: "friend's" loses the possessive,
  // an apostrophe joining letters is dropped ("don't" -> "dont"). The UTF-8
  // right single quote is treated like '\''.
  std::string s;
  s.reserve(raw.size());
  for (size_t i = 0; i < raw.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(raw[i]);
    if (c == 0xE2 && i + 2 < raw.size() &&
        static_cast<unsigned char>(raw[i + 1]) == 0x80 &&
        static_cast<unsigned char>(raw[i + 2]) == 0x99) {
      s += '\'';
      i += 2;
      continue;
    }
    s += static_cast<char>(std::tolower(c));
  }

  std::string cleaned;
  cleaned.reserve(s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '\'') {
      bool prev_al = i > 0 && is_alnum(static_cast<unsigned char>(s[i - 1]));
      if (prev_al && i + 1 < s.size() && s[i + 1] == 's' &&
          (i + 2 >= s.size() || !is_alnum(static_cast<unsigned char>(s[i + 2])))) {
        ++i;  // drop "'s"
      } else if (prev_al && i + 1 < s.size() && is_alnum(static_cast<unsigned char>(s[i + 1]))) {
        // drop the joining apostrophe
      } else {
        cleaned += ' ';
      }
      continue;
    }
    cleaned += is_alnum(static_cast<unsigned char>(c)) ? c : ' ';
  }

  std::vector<std::string> tokens;
  size_t pos = 0;
  while (pos < cleaned.size()) {
    while (pos < cleaned.size() && cleaned[pos] == ' ') ++pos;
    size_t end = pos;
    while (end < cleaned.size() && cleaned[end] != ' ') ++end;
    if (end > pos) tokens.push_back(cleaned.substr(pos, end - pos));
    pos = end;
  }

  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (auto& t : tokens) {
    if (is_digit_token(t) && t.size() <= 3) {
      int value = std::stoi(t);
      std::string spelled = spell_number(value);
      size_t p = 0;
      while (p < spelled.size()) {
        size_t e = spelled.find(' ', p);
        if (e == std::string::npos) e = spelled.size();
        out.push_back(spelled.substr(p, e - p));
        p = e + 1;
      }
    } else {
      out.push_back(std::move(t));
    }
  }
  return out;
}

std::string lemmatize_token(const std::string& token) {
  std::string w = token;
  for (;;) {
    std::string next = lemma_step(w);
    if (next == w) return w;
    w = std::move(next);
  }
}

}  // namespace signspot
