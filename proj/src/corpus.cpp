#include "signspot/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "signspot/feature_io.hpp"
#include "signspot/text.hpp"

namespace signspot {

using nlohmann::json;
namespace fs = std::filesystem;

Word::Word(std::string text) : text_(std::move(text)) {
  if (text_.empty()) throw DataError("word must be non-empty");
  if (std::isspace(static_cast<unsigned char>(text_.front())) ||
      std::isspace(static_cast<unsigned char>(text_.back())))
    throw DataError("word has leading/trailing whitespace: '" + text_ + "'");
  for (unsigned char c : text_)
    if (std::isupper(c)) throw DataError("word must be lowercase: '" + text_ + "'");
}

Vocabulary::Vocabulary(std::vector<Word> words, std::vector<std::vector<Word>> synonym_groups,
                       std::vector<std::vector<Word>> sign_groups)
    : words_(std::move(words)),
      synonym_groups_(std::move(synonym_groups)),
      sign_groups_(std::move(sign_groups)) {
  for (size_t i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i].str(), static_cast<int>(i)).second)
      throw DataError("duplicate vocabulary word: '" + words_[i].str() + "'");
  }
  auto check_groups = [&](const std::vector<std::vector<Word>>& groups, const char* kind) {
    for (const auto& g : groups)
      for (const auto& w : g)
        if (!contains(w))
          throw DataError(std::string(kind) + " group member '" + w.str() +
                          "' is not in the vocabulary");
  };
  check_groups(synonym_groups_, "synonym");
  check_groups(sign_groups_, "sign");
}

int Vocabulary::index_of(const Word& w) const {
  auto it = index_.find(w.str());
  return it == index_.end() ? -1 : it->second;
}

const char* to_string(AnnotationSource s) {
  return s == AnnotationSource::mouthing ? "mouthing" : "dictionary";
}

AnnotationSource annotation_source_from_string(const std::string& s) {
  if (s == "mouthing") return AnnotationSource::mouthing;
  if (s == "dictionary") return AnnotationSource::dictionary;
  throw DataError("unknown annotation source: '" + s + "'");
}

const std::vector<int>* CorpusManifest::entries_for(const Word& w) const {
  auto it = word_entries_.find(w.str());
  return it == word_entries_.end() ? nullptr : &it->second;
}

const SubtitledSequence* CorpusManifest::sequence_by_id(const std::string& id) const {
  auto it = sequence_ids_.find(id);
  return it == sequence_ids_.end() ? nullptr : &continuous[static_cast<size_t>(it->second)];
}

void CorpusManifest::rebuild_indices() {
  word_entries_.clear();
  sequence_ids_.clear();
  for (size_t i = 0; i < dictionary.size(); ++i)
    word_entries_[dictionary[i].word.str()].push_back(static_cast<int>(i));
  for (auto& [word, entries] : word_entries_)
    std::sort(entries.begin(), entries.end(), [&](int a, int b) {
      return dictionary[static_cast<size_t>(a)].variant_index <
             dictionary[static_cast<size_t>(b)].variant_index;
    });
  for (size_t i = 0; i < continuous.size(); ++i)
    sequence_ids_[continuous[i].id] = static_cast<int>(i);
}

namespace {

std::vector<Word> parse_word_list(const json& arr) {
  std::vector<Word> out;
  for (const auto& w : arr) out.emplace_back(w.get<std::string>());
  return out;
}

template <typename Fn>
void guarded(ValidationMode mode, const std::string& what, Fn&& fn) {
  if (mode == ValidationMode::strict) {
    fn();
    return;
  }
  try {
    fn();
  } catch (const DataError& e) {
    std::cerr << "warning: skipping " << what << ": " << e.what() << "\n";
  }
}

}  // namespace

CorpusManifest load_manifest(const std::string& path, ValidationMode mode) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError("manifest parse error in " + path + ": " + e.what());
  }

  CorpusManifest m;
  fs::path base = fs::absolute(fs::path(path)).parent_path();
  auto resolve = [&](const std::string& rel) { return (base / rel).lexically_normal().string(); };

  try {
    const json& v = doc.at("vocabulary");
    std::vector<std::vector<Word>> syn, sign;
    if (v.contains("synonym_groups"))
      for (const auto& g : v.at("synonym_groups")) syn.push_back(parse_word_list(g));
    if (v.contains("sign_groups"))
      for (const auto& g : v.at("sign_groups")) sign.push_back(parse_word_list(g));
    m.vocabulary = Vocabulary(parse_word_list(v.at("words")), std::move(syn), std::move(sign));
  } catch (const json::exception& e) {
    throw DataError("manifest vocabulary section malformed: " + std::string(e.what()));
  }

  if (doc.contains("continuous")) {
    for (const auto& c : doc.at("continuous")) {
      std::string id = c.value("id", "<missing id>");
      guarded(mode, "continuous sequence '" + id + "'", [&] {
        SubtitledSequence seq;
        try {
          seq.id = c.at("id").get<std::string>();
          seq.feature_path = resolve(c.at("feature_path").get<std::string>());
          seq.num_frames = c.at("num_frames").get<int>();
          seq.fps = c.value("fps", 25.0);
          seq.subtitle_text = c.at("subtitle_text").get<std::string>();
          seq.subtitle_start_frame = c.at("subtitle_start_frame").get<int>();
          seq.subtitle_end_frame = c.at("subtitle_end_frame").get<int>();
          for (const auto& a : c.value("annotations", json::array())) {
            SparseAnnotation ann;
            ann.word = Word(a.at("word").get<std::string>());
            ann.frame = a.at("frame").get<int>();
            ann.confidence = a.at("confidence").get<double>();
            ann.source = annotation_source_from_string(a.at("source").get<std::string>());
            seq.annotations.push_back(std::move(ann));
          }
        } catch (const json::exception& e) {
          throw DataError("continuous sequence '" + id + "' malformed: " + e.what());
        }
        if (seq.num_frames < kWindowFrames)
          throw DataError("continuous sequence '" + seq.id + "' shorter than one window");
        if (seq.subtitle_start_frame < 0 || seq.subtitle_start_frame > seq.subtitle_end_frame ||
            seq.subtitle_end_frame > seq.num_frames)
          throw DataError("continuous sequence '" + seq.id + "' has invalid subtitle span");
        for (const auto& ann : seq.annotations) {
          if (ann.frame < 0 || ann.frame >= seq.num_frames)
            throw DataError("annotation frame out of range in sequence '" + seq.id + "'");
          if (ann.confidence < 0.5 || ann.confidence > 1.0)
            throw DataError("annotation confidence out of [0.5, 1] in sequence '" + seq.id + "'");
          if (!m.vocabulary.contains(ann.word))
            throw DataError("annotation word '" + ann.word.str() +
                            "' in sequence '" + seq.id + "' is not in the vocabulary");
        }
        check_feature_file(seq.feature_path);
        m.continuous.push_back(std::move(seq));
      });
    }
  }

  std::map<std::string, std::set<int>> seen_variants;
  if (doc.contains("dictionary")) {
    for (const auto& d : doc.at("dictionary")) {
      std::string id = d.value("id", "<missing id>");
      guarded(mode, "dictionary entry '" + id + "'", [&] {
        DictionaryEntry entry;
        try {
          entry.id = d.at("id").get<std::string>();
          entry.word = Word(d.at("word").get<std::string>());
          entry.variant_index = d.at("variant_index").get<int>();
          entry.feature_path = resolve(d.at("feature_path").get<std::string>());
          if (d.contains("signer_id")) entry.signer_id = d.at("signer_id").get<std::string>();
        } catch (const json::exception& e) {
          throw DataError("dictionary entry '" + id + "' malformed: " + e.what());
        }
        if (entry.variant_index < 0)
          throw DataError("dictionary entry '" + entry.id + "' has negative variant_index");
        if (!m.vocabulary.contains(entry.word))
          throw DataError("dictionary entry '" + entry.id + "' word '" + entry.word.str() +
                          "' is not in the vocabulary");
        if (!seen_variants[entry.word.str()].insert(entry.variant_index).second)
          throw DataError("dictionary entry '" + entry.id + "' duplicates variant " +
                          std::to_string(entry.variant_index) + " of word '" +
                          entry.word.str() + "'");
        check_feature_file(entry.feature_path);
        m.dictionary.push_back(std::move(entry));
      });
    }
  }

  m.rebuild_indices();
  return m;
}

std::vector<Word> normalize_text(const std::string& raw) {
  std::vector<Word> out;
  for (auto& t : normalize_tokens(raw)) out.emplace_back(std::move(t));
  return out;
}

Word lemmatize(const Word& w) { return Word(lemmatize_token(w.str())); }

std::vector<Word> tokenize(const std::string& subtitle, const Vocabulary& vocab) {
  std::vector<std::string> raw;
  {
    std::istringstream ss(subtitle);
    std::string tok;
    while (ss >> tok) raw.push_back(tok);
  }
  std::vector<std::string> norm = normalize_tokens(subtitle);
  std::vector<std::string> lemma;
  lemma.reserve(norm.size());
  for (const auto& t : norm) lemma.push_back(lemmatize_token(t));

  auto contains_run = [&](const std::vector<std::string>& hay,
                          const std::vector<std::string>& needle) {
    if (needle.empty() || hay.size() < needle.size()) return false;
    for (size_t i = 0; i + needle.size() <= hay.size(); ++i) {
      bool all = true;
      for (size_t j = 0; j < needle.size(); ++j)
        if (hay[i + j] != needle[j]) {
          all = false;
          break;
        }
      if (all) return true;
    }
    return false;
  };

  std::vector<Word> out;
  for (const auto& w : vocab.words()) {
    std::vector<std::string> w_norm = normalize_tokens(w.str());
    bool matched = false;
    if (w_norm.size() > 1) {
      matched = contains_run(norm, w_norm);
    } else {
      auto hits = [&](const std::string& form) {
        if (form == w.str()) return true;
        return w_norm.size() == 1 && form == w_norm[0];
      };
      for (const auto& t : raw)
        if (hits(t)) {
          matched = true;
          break;
        }
      if (!matched)
        for (const auto& t : norm)
          if (hits(t)) {
            matched = true;
            break;
          }
      if (!matched)
        for (const auto& t : lemma)
          if (hits(t)) {
            matched = true;
            break;
          }
    }
    if (matched) out.push_back(w);
  }
  return out;
}

CorpusManifest filter_by_confidence(const CorpusManifest& manifest, double threshold,
                                    std::optional<AnnotationSource> source) {
  if (threshold < 0.0) throw DataError("confidence threshold must be >= 0");
  CorpusManifest out;
  out.vocabulary = manifest.vocabulary;
  out.dictionary = manifest.dictionary;
  for (const auto& seq : manifest.continuous) {
    SubtitledSequence kept = seq;
    kept.annotations.clear();
    for (const auto& ann : seq.annotations) {
      bool applies = !source.has_value() || ann.source == *source;
      if (!applies || ann.confidence >= threshold) kept.annotations.push_back(ann);
    }
    if (!kept.annotations.empty()) out.continuous.push_back(std::move(kept));
  }
  out.rebuild_indices();
  return out;
}

}  // namespace signspot
