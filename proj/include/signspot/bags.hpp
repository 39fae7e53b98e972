#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "signspot/corpus.hpp"
#include "signspot/rng.hpp"

namespace signspot {

enum class SegmentKind { foreground, background };

// A 16-frame window of a continuous video, addressed by its start row.
struct Segment {
  std::string video_id;
  int start_row = 0;
  SegmentKind kind = SegmentKind::foreground;
  std::optional<Word> word;  // foreground only
  int item = -1;
  int bg_index = -1;  // position within the item's background list
};

struct BatchItem {
  int seq_index = -1;
  Word fg_word;
  int fg_segment = -1;            // index into Batch::segments
  std::vector<int> bg_segments;   // indices into Batch::segments
  std::vector<Word> subtitle_words;  // tokenize(subtitle), vocabulary order
  std::vector<Word> bg_words;        // subtitle_words minus fg_word, with dictionary cover
  std::vector<int> dict_fg;          // manifest dictionary indices of fg_word
  std::vector<std::pair<Word, std::vector<int>>> dict_bg;  // per bg word, in bg_words order
};

struct Batch {
  std::vector<BatchItem> items;
  std::vector<Segment> segments;                // item 0 fg, item 0 bg..., item 1 fg, ...
  std::vector<std::pair<int, Word>> dict_pool;  // sorted unique dictionary indices with words

  bool subtitle_contains(int item, const Word& w) const;
  const Word* dict_word(int dict_index) const;
};

enum class AnchorKind { seg_fore, dict_fore, seg_back, dict_back };
const char* to_string(AnchorKind k);

// One anchor's positive and negative bags of (segment, dictionary) pairs.
// Pairs are sorted and unique. `flagged` lists negative pairs whose
// dictionary word appears in the segment's own subtitle; they are kept (the
// set definitions keep them) but surfaced for audit in the debug dump.
struct AnchorBags {
  AnchorKind kind = AnchorKind::seg_fore;
  int item = -1;
  int sub = -1;  // bg segment position (seg_back) or bg word position (dict_back)
  std::vector<std::pair<int, int>> positives;
  std::vector<std::pair<int, int>> negatives;
  std::vector<std::pair<int, int>> flagged;
};

struct BatchOptions {
  int bg_segments_per_item = 10;
  int fg_offset_before = 20;  // fg start row offset drawn from [-before, +after]
  int fg_offset_after = 5;
  int max_bg_dict_per_item = 0;  // 0 = uncapped
};

// One item per (sequence, annotation) instance; foreground start rows are
// jittered within the label window and background rows sampled outside it.
Batch build_batch_from_instances(const CorpusManifest& manifest,
                                 const std::vector<std::pair<int, int>>& instances,
                                 uint64_t rng_seed, const BatchOptions& opts = {});

// One item per word: picks an annotation instance of each word uniformly.
Batch build_batch(const CorpusManifest& manifest, const std::vector<Word>& word_sample,
                  uint64_t rng_seed, const BatchOptions& opts = {});

// Foreground-anchored bags only: labelled segments against the dictionary
// variants of their word, with cross-item negatives.
std::vector<AnchorBags> build_watch_lookup_bags(const Batch& batch);

// Adds the subtitle-driven bags: background segments and background-word
// dictionaries anchor their own positive and negative sets.
std::vector<AnchorBags> build_watch_read_lookup_bags(const Batch& batch);

enum class SynonymPolicy { keep_all, discard_english, discard_sign };
SynonymPolicy synonym_policy_from_string(const std::string& s);
const char* to_string(SynonymPolicy p);

// Removes negative pairs whose two words share a synonym (or same-sign)
// group without being identical. Pairs are never promoted to positive.
void apply_synonym_policy(std::vector<AnchorBags>& bags, const Batch& batch,
                          const Vocabulary& vocab, SynonymPolicy policy);

// Keeps one uniformly chosen positive pair per anchor (single-instance
// contrastive baseline).
void reduce_to_single_positive(std::vector<AnchorBags>& bags, Rng& rng);

// Drops anchors whose positive bag is empty (the loss is undefined there).
void drop_empty_positive_bags(std::vector<AnchorBags>& bags);

}  // namespace signspot
