#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "signspot/errors.hpp"

namespace signspot {

// A lowercase token (or space-separated phrase) from the written vocabulary.
class Word {
 public:
  Word() = default;
  explicit Word(std::string text);
  const std::string& str() const { return text_; }
  bool operator==(const Word& o) const { return text_ == o.text_; }
  bool operator!=(const Word& o) const { return text_ != o.text_; }
  bool operator<(const Word& o) const { return text_ < o.text_; }

 private:
  std::string text_;
};

class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::vector<Word> words, std::vector<std::vector<Word>> synonym_groups = {},
             std::vector<std::vector<Word>> sign_groups = {});

  const std::vector<Word>& words() const { return words_; }
  const std::vector<std::vector<Word>>& synonym_groups() const { return synonym_groups_; }
  const std::vector<std::vector<Word>>& sign_groups() const { return sign_groups_; }
  bool contains(const Word& w) const { return index_.count(w.str()) > 0; }
  // Index in vocabulary order; -1 if absent.
  int index_of(const Word& w) const;
  size_t size() const { return words_.size(); }

 private:
  std::vector<Word> words_;
  std::vector<std::vector<Word>> synonym_groups_;
  std::vector<std::vector<Word>> sign_groups_;
  std::unordered_map<std::string, int> index_;
};

enum class AnnotationSource { mouthing, dictionary };

const char* to_string(AnnotationSource s);
AnnotationSource annotation_source_from_string(const std::string& s);

// A sparse word-level label on the 25 fps frame timeline.
struct SparseAnnotation {
  Word word;
  int frame = 0;
  double confidence = 1.0;
  AnnotationSource source = AnnotationSource::mouthing;
};

struct SubtitledSequence {
  std::string id;
  std::string feature_path;  // resolved absolute path
  int num_frames = 0;
  double fps = 25.0;
  std::string subtitle_text;
  int subtitle_start_frame = 0;
  int subtitle_end_frame = 0;
  std::vector<SparseAnnotation> annotations;
};

struct DictionaryEntry {
  std::string id;
  Word word;
  int variant_index = 0;
  std::string feature_path;  // resolved absolute path
  std::optional<std::string> signer_id;
};

// Per-window trunk features: row t is the embedding of the 16-frame window
// starting at frame t, so a video with F frames yields F - 15 rows.
struct FeatureSequence {
  using Matrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Matrix data;
  int rows() const { return static_cast<int>(data.rows()); }
  int dim() const { return static_cast<int>(data.cols()); }
  Eigen::VectorXd row(int t) const { return data.row(t).cast<double>().transpose(); }
};

constexpr int kWindowFrames = 16;

struct CorpusManifest {
  Vocabulary vocabulary;
  std::vector<SubtitledSequence> continuous;
  std::vector<DictionaryEntry> dictionary;

  // Dictionary entry indices per word, ordered by variant_index.
  const std::vector<int>* entries_for(const Word& w) const;
  const SubtitledSequence* sequence_by_id(const std::string& id) const;
  void rebuild_indices();

 private:
  std::map<std::string, std::vector<int>> word_entries_;
  std::map<std::string, int> sequence_ids_;
};

enum class ValidationMode { strict, warn_and_skip };

// Loads and validates a manifest JSON document. Feature payloads are not
// read; each referenced file's header is checked for existence and shape.
// strict mode throws DataError naming the offending record; warn_and_skip
// drops bad records with a note on stderr (used by statistics commands).
CorpusManifest load_manifest(const std::string& path,
                             ValidationMode mode = ValidationMode::strict);

// Text matching against the vocabulary: a vocab word matches when any of the
// raw / normalized / lemmatized forms of a subtitle token equals the word's
// raw or normalized form; multi-word vocab phrases match as contiguous runs
// of normalized subtitle tokens. Result is in vocabulary order.
std::vector<Word> tokenize(const std::string& subtitle, const Vocabulary& vocab);

std::vector<Word> normalize_text(const std::string& raw);
Word lemmatize(const Word& w);

// Drops annotations of the given source (all sources when unset) whose
// confidence is below threshold, then drops sequences left without any
// annotation from the training view.
CorpusManifest filter_by_confidence(const CorpusManifest& manifest, double threshold,
                                    std::optional<AnnotationSource> source = std::nullopt);

}  // namespace signspot
