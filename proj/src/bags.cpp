#include "signspot/bags.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace signspot {

namespace {

void sort_unique(std::vector<std::pair<int, int>>& pairs) {
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
}

bool same_word_fg_pair(const Batch& batch, int seg, int dict) {
  const Segment& s = batch.segments[static_cast<size_t>(seg)];
  if (s.kind != SegmentKind::foreground) return false;
  const Word* dw = batch.dict_word(dict);
  return dw && s.word && *s.word == *dw;
}

// Negative bags never join a segment and a dictionary entry of the same
// word; flagged pairs are negatives whose dictionary word occurs in the
// segment's subtitle (kept, surfaced for audit).
void add_negative(AnchorBags& bag, const Batch& batch, int seg, int dict) {
  if (same_word_fg_pair(batch, seg, dict)) return;
  bag.negatives.emplace_back(seg, dict);
  const Segment& s = batch.segments[static_cast<size_t>(seg)];
  const Word* dw = batch.dict_word(dict);
  if (dw && s.item >= 0 && batch.subtitle_contains(s.item, *dw))
    bag.flagged.emplace_back(seg, dict);
}

void finalize(AnchorBags& bag) {
  sort_unique(bag.positives);
  sort_unique(bag.negatives);
  sort_unique(bag.flagged);
}

}  // namespace

bool Batch::subtitle_contains(int item, const Word& w) const {
  const auto& words = items[static_cast<size_t>(item)].subtitle_words;
  return std::find(words.begin(), words.end(), w) != words.end();
}

const Word* Batch::dict_word(int dict_index) const {
  auto it = std::lower_bound(dict_pool.begin(), dict_pool.end(), dict_index,
                             [](const auto& p, int v) { return p.first < v; });
  if (it == dict_pool.end() || it->first != dict_index) return nullptr;
  return &it->second;
}

const char* to_string(AnchorKind k) {
  switch (k) {
    case AnchorKind::seg_fore: return "seg_fore";
    case AnchorKind::dict_fore: return "dict_fore";
    case AnchorKind::seg_back: return "seg_back";
    case AnchorKind::dict_back: return "dict_back";
  }
  return "?";
}

SynonymPolicy synonym_policy_from_string(const std::string& s) {
  if (s == "keep_all") return SynonymPolicy::keep_all;
  if (s == "discard_english") return SynonymPolicy::discard_english;
  if (s == "discard_sign") return SynonymPolicy::discard_sign;
  throw DataError("unknown synonym policy: '" + s + "'");
}

const char* to_string(SynonymPolicy p) {
  switch (p) {
    case SynonymPolicy::keep_all: return "keep_all";
    case SynonymPolicy::discard_english: return "discard_english";
    case SynonymPolicy::discard_sign: return "discard_sign";
  }
  return "?";
}

Batch build_batch_from_instances(const CorpusManifest& manifest,
                                 const std::vector<std::pair<int, int>>& instances,
                                 uint64_t rng_seed, const BatchOptions& opts) {
  Rng rng(derive_seed(rng_seed, 1));
  Batch batch;
  std::set<int> pool;

  for (size_t i = 0; i < instances.size(); ++i) {
    auto [seq_index, ann_index] = instances[i];
    const SubtitledSequence& seq = manifest.continuous.at(static_cast<size_t>(seq_index));
    const SparseAnnotation& ann = seq.annotations.at(static_cast<size_t>(ann_index));
    int rows = seq.num_frames - kWindowFrames + 1;
    if (rows < 1) throw DataError("sequence '" + seq.id + "' too short for a window");

    BatchItem item;
    item.seq_index = seq_index;
    item.fg_word = ann.word;

    const std::vector<int>* fg_entries = manifest.entries_for(ann.word);
    if (!fg_entries || fg_entries->empty())
      throw DataError("word '" + ann.word.str() + "' has no dictionary entry");
    item.dict_fg = *fg_entries;

    int lo = ann.frame - opts.fg_offset_before;
    int hi = ann.frame + opts.fg_offset_after;
    int fg_row = static_cast<int>(rng.range(lo, hi));
    fg_row = std::clamp(fg_row, 0, rows - 1);

    Segment fg;
    fg.video_id = seq.id;
    fg.start_row = fg_row;
    fg.kind = SegmentKind::foreground;
    fg.word = ann.word;
    fg.item = static_cast<int>(i);
    item.fg_segment = static_cast<int>(batch.segments.size());
    batch.segments.push_back(fg);

    // Background rows live outside the label window entirely.
    std::vector<int> candidates;
    candidates.reserve(static_cast<size_t>(rows));
    for (int r = 0; r < rows; ++r)
      if (r < lo || r > hi) candidates.push_back(r);
    rng.shuffle(candidates);
    int bg_count = std::min<int>(opts.bg_segments_per_item, static_cast<int>(candidates.size()));
    for (int b = 0; b < bg_count; ++b) {
      Segment bg;
      bg.video_id = seq.id;
      bg.start_row = candidates[static_cast<size_t>(b)];
      bg.kind = SegmentKind::background;
      bg.item = static_cast<int>(i);
      bg.bg_index = b;
      item.bg_segments.push_back(static_cast<int>(batch.segments.size()));
      batch.segments.push_back(bg);
    }

    item.subtitle_words = tokenize(seq.subtitle_text, manifest.vocabulary);
    for (const Word& w : item.subtitle_words) {
      if (w == item.fg_word) continue;
      const std::vector<int>* entries = manifest.entries_for(w);
      if (!entries || entries->empty()) continue;
      item.bg_words.push_back(w);
      item.dict_bg.emplace_back(w, *entries);
    }

    if (opts.max_bg_dict_per_item > 0) {
      size_t total = 0;
      for (const auto& [w, entries] : item.dict_bg) total += entries.size();
      if (total > static_cast<size_t>(opts.max_bg_dict_per_item)) {
        std::vector<std::pair<size_t, int>> flat;  // (bg word pos, entry)
        for (size_t wi = 0; wi < item.dict_bg.size(); ++wi)
          for (int e : item.dict_bg[wi].second) flat.emplace_back(wi, e);
        rng.shuffle(flat);
        flat.resize(static_cast<size_t>(opts.max_bg_dict_per_item));
        std::sort(flat.begin(), flat.end());
        std::vector<std::pair<Word, std::vector<int>>> capped;
        std::vector<Word> kept_words;
        for (size_t wi = 0; wi < item.dict_bg.size(); ++wi) {
          std::vector<int> kept;
          for (const auto& [pos, e] : flat)
            if (pos == wi) kept.push_back(e);
          if (!kept.empty()) {
            capped.emplace_back(item.dict_bg[wi].first, std::move(kept));
            kept_words.push_back(item.dict_bg[wi].first);
          }
        }
        item.dict_bg = std::move(capped);
        item.bg_words = std::move(kept_words);
      }
    }

    for (int e : item.dict_fg) pool.insert(e);
    for (const auto& [w, entries] : item.dict_bg)
      for (int e : entries) pool.insert(e);
    batch.items.push_back(std::move(item));
  }

  batch.dict_pool.reserve(pool.size());
  for (int e : pool)
    batch.dict_pool.emplace_back(e, manifest.dictionary.at(static_cast<size_t>(e)).word);
  return batch;
}

Batch build_batch(const CorpusManifest& manifest, const std::vector<Word>& word_sample,
                  uint64_t rng_seed, const BatchOptions& opts) {
  Rng pick(derive_seed(rng_seed, 0));
  std::vector<std::pair<int, int>> instances;
  for (const Word& w : word_sample) {
    std::vector<std::pair<int, int>> candidates;
    for (size_t s = 0; s < manifest.continuous.size(); ++s)
      for (size_t a = 0; a < manifest.continuous[s].annotations.size(); ++a)
        if (manifest.continuous[s].annotations[a].word == w)
          candidates.emplace_back(static_cast<int>(s), static_cast<int>(a));
    if (candidates.empty())
      throw DataError("word '" + w.str() + "' has no annotated segment");
    instances.push_back(candidates[pick.below(candidates.size())]);
  }
  return build_batch_from_instances(manifest, instances, rng_seed, opts);
}

std::vector<AnchorBags> build_watch_lookup_bags(const Batch& batch) {
  std::vector<AnchorBags> out;
  size_t count = batch.items.size();
  for (size_t i = 0; i < count; ++i) {
    const BatchItem& item = batch.items[i];

    AnchorBags seg_anchor;
    seg_anchor.kind = AnchorKind::seg_fore;
    seg_anchor.item = static_cast<int>(i);
    for (int d : item.dict_fg) seg_anchor.positives.emplace_back(item.fg_segment, d);
    for (size_t j = 0; j < count; ++j) {
      if (j == i) continue;
      for (int d : batch.items[j].dict_fg) add_negative(seg_anchor, batch, item.fg_segment, d);
    }
    finalize(seg_anchor);

    AnchorBags dict_anchor;
    dict_anchor.kind = AnchorKind::dict_fore;
    dict_anchor.item = static_cast<int>(i);
    dict_anchor.positives = seg_anchor.positives;
    for (size_t j = 0; j < count; ++j) {
      if (j == i) continue;
      for (int d : item.dict_fg) add_negative(dict_anchor, batch, batch.items[j].fg_segment, d);
    }
    finalize(dict_anchor);

    out.push_back(std::move(seg_anchor));
    out.push_back(std::move(dict_anchor));
  }
  drop_empty_positive_bags(out);
  return out;
}

std::vector<AnchorBags> build_watch_read_lookup_bags(const Batch& batch) {
  std::vector<AnchorBags> out;
  size_t count = batch.items.size();
  for (size_t i = 0; i < count; ++i) {
    const BatchItem& item = batch.items[i];

    AnchorBags seg_anchor;
    seg_anchor.kind = AnchorKind::seg_fore;
    seg_anchor.item = static_cast<int>(i);
    for (int d : item.dict_fg) seg_anchor.positives.emplace_back(item.fg_segment, d);
    for (const auto& [d, w] : batch.dict_pool)
      if (w != item.fg_word) add_negative(seg_anchor, batch, item.fg_segment, d);
    finalize(seg_anchor);
    out.push_back(std::move(seg_anchor));

    AnchorBags dict_anchor;
    dict_anchor.kind = AnchorKind::dict_fore;
    dict_anchor.item = static_cast<int>(i);
    for (int d : item.dict_fg) dict_anchor.positives.emplace_back(item.fg_segment, d);
    for (int d : item.dict_fg) {
      for (int s : item.bg_segments) add_negative(dict_anchor, batch, s, d);
      for (size_t j = 0; j < count; ++j) {
        if (j == i || batch.items[j].fg_word == item.fg_word) continue;
        add_negative(dict_anchor, batch, batch.items[j].fg_segment, d);
      }
    }
    finalize(dict_anchor);
    out.push_back(std::move(dict_anchor));

    for (size_t b = 0; b < item.bg_segments.size(); ++b) {
      AnchorBags bag;
      bag.kind = AnchorKind::seg_back;
      bag.item = static_cast<int>(i);
      bag.sub = static_cast<int>(b);
      int seg = item.bg_segments[b];
      for (const auto& [w, entries] : item.dict_bg)
        for (int d : entries) bag.positives.emplace_back(seg, d);
      for (const auto& [d, w] : batch.dict_pool)
        if (!batch.subtitle_contains(static_cast<int>(i), w)) add_negative(bag, batch, seg, d);
      finalize(bag);
      out.push_back(std::move(bag));
    }

    for (size_t wi = 0; wi < item.dict_bg.size(); ++wi) {
      const auto& [w, entries] = item.dict_bg[wi];
      AnchorBags bag;
      bag.kind = AnchorKind::dict_back;
      bag.item = static_cast<int>(i);
      bag.sub = static_cast<int>(wi);
      for (int d : entries)
        for (int s : item.bg_segments) bag.positives.emplace_back(s, d);
      for (int d : entries) {
        add_negative(bag, batch, item.fg_segment, d);
        for (size_t j = 0; j < count; ++j) {
          if (batch.subtitle_contains(static_cast<int>(j), w)) continue;
          add_negative(bag, batch, batch.items[j].fg_segment, d);
          for (int s : batch.items[j].bg_segments) add_negative(bag, batch, s, d);
        }
      }
      finalize(bag);
      out.push_back(std::move(bag));
    }
  }
  drop_empty_positive_bags(out);
  return out;
}

void apply_synonym_policy(std::vector<AnchorBags>& bags, const Batch& batch,
                          const Vocabulary& vocab, SynonymPolicy policy) {
  if (policy == SynonymPolicy::keep_all) return;
  const auto& groups = policy == SynonymPolicy::discard_english ? vocab.synonym_groups()
                                                                : vocab.sign_groups();
  if (groups.empty())
    throw DataError(std::string("synonym policy '") + to_string(policy) +
                    "' requires group metadata in the vocabulary");

  auto same_group = [&](const Word& a, const Word& b) {
    if (a == b) return false;
    for (const auto& g : groups) {
      bool has_a = std::find(g.begin(), g.end(), a) != g.end();
      bool has_b = std::find(g.begin(), g.end(), b) != g.end();
      if (has_a && has_b) return true;
    }
    return false;
  };

  for (AnchorBags& bag : bags) {
    auto grouped = [&](const std::pair<int, int>& pair) {
      const Segment& s = batch.segments[static_cast<size_t>(pair.first)];
      if (s.kind != SegmentKind::foreground || !s.word) return false;
      const Word* dw = batch.dict_word(pair.second);
      return dw && same_group(*s.word, *dw);
    };
    std::erase_if(bag.negatives, grouped);
    std::erase_if(bag.flagged, grouped);
  }
}

void reduce_to_single_positive(std::vector<AnchorBags>& bags, Rng& rng) {
  for (AnchorBags& bag : bags) {
    if (bag.positives.size() <= 1) continue;
    auto keep = bag.positives[rng.below(bag.positives.size())];
    bag.positives = {keep};
  }
}

void drop_empty_positive_bags(std::vector<AnchorBags>& bags) {
  std::erase_if(bags, [](const AnchorBags& b) { return b.positives.empty(); });
}

}  // namespace signspot
