#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "signspot/corpus.hpp"
#include "signspot/model.hpp"
#include "signspot/trainer.hpp"

namespace signspot {

// Continuous embeddings on a sliding-row grid: positions 0, stride, 2*stride, ...
struct EmbeddedSequence {
  int stride = 1;
  int rows = 0;  // underlying feature rows
  std::vector<Vec> embeddings;
  int row_at(size_t k) const { return static_cast<int>(k) * stride; }
};

EmbeddedSequence embed_continuous(const MlpParams& params, const FeatureSequence& features,
                                  int stride, int threads = 1);

struct DictVariant {
  int entry_index = -1;
  int variant_index = 0;
  Vec embedding;
};

// Per-word variant embeddings (mean of clips through the dictionary head),
// ordered by variant index.
std::map<std::string, std::vector<DictVariant>> embed_dictionary(const MlpParams& params,
                                                                 const CorpusManifest& manifest,
                                                                 const FeatureCache& cache,
                                                                 int threads = 1);

// Inclusive row range to search; rows outside the grid are skipped.
struct FrameRange {
  int start = 0;
  int end = 0;
};

struct SpotResult {
  std::string video_id;
  Word word;
  int frame = 0;  // best start row
  double score = -1.0;
  int variant_index = 0;
};

// Argmax of cosine similarity over (variant, grid position); ties break to
// the earliest frame, then the lowest variant index.
SpotResult spot(const Word& word, const std::vector<DictVariant>& variants,
                const EmbeddedSequence& continuous, std::optional<FrameRange> search_window,
                const std::string& video_id);

struct MinedAnnotation {
  std::string video_id;
  Word word;
  int center_frame = 0;  // peak row + half a window
  int window_start = 0;  // 32-frame span, clipped to video bounds
  int window_end = 0;    // exclusive
  double score = 0.0;
  int variant_index = 0;
  int search_start = 0;  // padded subtitle window used for the query (frames)
  int search_end = 0;
};

// Queries every vocabulary word matched into each subtitle inside the padded
// subtitle window and keeps peaks at or above the threshold.
std::vector<MinedAnnotation> mine_annotations(const MlpParams& params,
                                              const CorpusManifest& manifest,
                                              const FeatureCache& cache, double threshold = 0.7,
                                              double pad_seconds = 4.0, int stride = 1,
                                              int threads = 1);

struct YieldRow {
  double threshold = 0.0;
  int vocab_size = 0;
  int instance_count = 0;
  int duplicate_with_mouthing = 0;
};

// Per-threshold yield; a mined instance is a mouthing duplicate when a
// mouthing annotation of the same word falls inside the same search window.
std::vector<YieldRow> yield_statistics(const std::vector<MinedAnnotation>& mined,
                                       const CorpusManifest& manifest,
                                       const std::vector<double>& thresholds);

// One similarity series per variant over the grid positions.
std::vector<std::vector<double>> variant_traces(const Word& word,
                                                const std::vector<DictVariant>& variants,
                                                const EmbeddedSequence& continuous);

struct DictIndexEntry {
  std::string id;
  Word word;
  Vec embedding;
};

struct FauxAmiPair {
  std::string a_id;
  Word a_word;
  int rank = 0;  // 1-based
  std::string b_id;
  Word b_word;
  double score = 0.0;
  bool same_word = false;
};

// Top-k nearest neighbours of each entry of A among the entries of B.
std::vector<FauxAmiPair> faux_amis(const std::vector<DictIndexEntry>& dict_a,
                                   const std::vector<DictIndexEntry>& dict_b, int k);

struct WristFrame {
  std::optional<Eigen::Vector2d> left;
  std::optional<Eigen::Vector2d> right;
  std::optional<double> torso_scale;
};

// First/last frame whose smoothed inter-frame wrist displacement (max over
// wrists, 3-frame moving average) exceeds motion_threshold times the median
// torso scale; the whole clip when motion never exceeds the threshold.
std::pair<int, int> trim_dictionary(const std::vector<WristFrame>& wrists,
                                    double motion_threshold);

std::vector<WristFrame> read_keypoints_file(const std::string& path);

struct Detection {
  std::string video_id;
  int frame = 0;
  double score = 0.0;
  int variant_index = 0;
};

// All local maxima of the best-over-variants similarity series above the
// floor, with non-maximum suppression over a frame radius.
std::vector<Detection> extract_detections(const Word& word,
                                          const std::vector<DictVariant>& variants,
                                          const EmbeddedSequence& continuous,
                                          const std::string& video_id, double score_floor,
                                          int nms_frames = 16);

}  // namespace signspot
