#include "signspot/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "signspot/parallel.hpp"

namespace signspot {

using nlohmann::json;

namespace {

double class_average(const std::map<std::string, std::pair<double, int>>& sums) {
  if (sums.empty()) throw DataError("no classes to average over");
  double total = 0.0;
  for (const auto& [word, acc] : sums) total += acc.first / acc.second;
  return total / static_cast<double>(sums.size());
}

std::map<std::string, double> per_class_of(
    const std::map<std::string, std::pair<double, int>>& sums) {
  std::map<std::string, double> out;
  for (const auto& [word, acc] : sums) out[word] = acc.first / acc.second;
  return out;
}

bool case_hit_at_k(const RetrievalCase& c, int k) {
  int limit = std::min<int>(k, static_cast<int>(c.ranking.size()));
  for (int i = 0; i < limit; ++i)
    if (c.ranking[static_cast<size_t>(i)].word == c.word) return true;
  return false;
}

double case_ap(const RetrievalCase& c, FrameTolerance tol) {
  int hits = 0;
  double sum = 0.0;
  for (size_t i = 0; i < c.ranking.size(); ++i) {
    const RetrievalEntry& e = c.ranking[i];
    bool relevant = e.word == c.word && tol.contains(e.predicted_frame, e.gt_frame);
    if (relevant) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  return hits == 0 ? 0.0 : sum / hits;
}

std::map<std::string, std::pair<double, int>> recall_sums(
    const std::vector<RetrievalCase>& cases, int k) {
  if (k < 1) throw DataError("recall_at_k requires k >= 1");
  std::map<std::string, std::pair<double, int>> sums;
  for (const auto& c : cases) {
    auto& acc = sums[c.word.str()];
    acc.first += case_hit_at_k(c, k) ? 1.0 : 0.0;
    acc.second += 1;
  }
  return sums;
}

std::map<std::string, std::pair<double, int>> ap_sums(const std::vector<RetrievalCase>& cases,
                                                      FrameTolerance tol) {
  std::map<std::string, std::pair<double, int>> sums;
  for (const auto& c : cases) {
    auto& acc = sums[c.word.str()];
    acc.first += case_ap(c, tol);
    acc.second += 1;
  }
  return sums;
}

}  // namespace

double recall_at_k(const std::vector<RetrievalCase>& cases, int k) {
  return class_average(recall_sums(cases, k));
}

std::map<std::string, double> recall_at_k_per_class(const std::vector<RetrievalCase>& cases,
                                                    int k) {
  return per_class_of(recall_sums(cases, k));
}

double retrieval_map(const std::vector<RetrievalCase>& cases, FrameTolerance tol) {
  return class_average(ap_sums(cases, tol));
}

std::map<std::string, double> retrieval_map_per_class(const std::vector<RetrievalCase>& cases,
                                                      FrameTolerance tol) {
  return per_class_of(ap_sums(cases, tol));
}

double localization_accuracy(const std::vector<SpotResult>& spots,
                             const std::vector<GroundTruthInstance>& ground_truth,
                             FrameTolerance tol) {
  if (spots.empty()) throw DataError("no spots to score");
  int hit = 0;
  for (const SpotResult& s : spots) {
    bool found_gt = false;
    bool in_window = false;
    for (const GroundTruthInstance& g : ground_truth) {
      if (g.video_id != s.video_id || !(g.word == s.word)) continue;
      found_gt = true;
      if (tol.contains(s.frame, g.frame)) {
        in_window = true;
        break;
      }
    }
    if (!found_gt)
      throw DataError("spot without ground truth: " + s.video_id + "/" + s.word.str());
    if (in_window) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(spots.size());
}

double spotting_benchmark_map(
    const std::map<std::string, std::vector<Detection>>& detections_per_class,
    const std::map<std::string, std::vector<GroundTruthInstance>>& gt_per_class,
    FrameTolerance tol) {
  double total = 0.0;
  int classes = 0;
  for (const auto& [word, gt] : gt_per_class) {
    if (gt.empty()) continue;
    ++classes;
    auto it = detections_per_class.find(word);
    if (it == detections_per_class.end() || it->second.empty()) continue;

    std::vector<Detection> dets = it->second;
    std::sort(dets.begin(), dets.end(), [](const Detection& a, const Detection& b) {
      if (a.score != b.score) return a.score > b.score;
      if (a.video_id != b.video_id) return a.video_id < b.video_id;
      return a.frame < b.frame;
    });

    std::vector<bool> matched(gt.size(), false);
    int tp = 0;
    double ap_sum = 0.0;
    for (size_t rank = 0; rank < dets.size(); ++rank) {
      const Detection& det = dets[rank];
      int best_gt = -1;
      int best_dist = 0;
      for (size_t g = 0; g < gt.size(); ++g) {
        if (matched[g] || gt[g].video_id != det.video_id) continue;
        if (!tol.contains(det.frame, gt[g].frame)) continue;
        int dist = std::abs(det.frame - gt[g].frame);
        if (best_gt < 0 || dist < best_dist) {
          best_gt = static_cast<int>(g);
          best_dist = dist;
        }
      }
      if (best_gt >= 0) {
        matched[static_cast<size_t>(best_gt)] = true;
        ++tp;
        ap_sum += static_cast<double>(tp) / static_cast<double>(rank + 1);
      }
    }
    total += ap_sum / static_cast<double>(gt.size());
  }
  if (classes == 0) throw DataError("no classes with ground truth");
  return total / classes;
}

std::vector<GroundTruthInstance> ground_truth_from_manifest(const CorpusManifest& manifest) {
  std::vector<GroundTruthInstance> out;
  for (const auto& seq : manifest.continuous)
    for (const auto& ann : seq.annotations) out.push_back({seq.id, ann.word, ann.frame});
  return out;
}

std::vector<GroundTruthInstance> read_ground_truth_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open ground truth file: " + path);
  std::vector<GroundTruthInstance> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json doc = json::parse(line, nullptr, false);
    if (doc.is_discarded()) throw DataError("malformed ground truth line in " + path);
    out.push_back({doc.at("video_id").get<std::string>(),
                   Word(doc.at("word").get<std::string>()), doc.at("frame").get<int>()});
  }
  return out;
}

namespace {

std::vector<GroundTruthInstance> filtered(const std::vector<GroundTruthInstance>& gt,
                                          const std::vector<std::string>& words) {
  if (words.empty()) return gt;
  std::set<std::string> allow(words.begin(), words.end());
  std::vector<GroundTruthInstance> out;
  for (const auto& g : gt)
    if (allow.count(g.word.str())) out.push_back(g);
  return out;
}

FrameRange test_window(const SubtitledSequence& seq, double pad_seconds, int rows) {
  int pad = static_cast<int>(std::ceil(pad_seconds * seq.fps));
  FrameRange r;
  r.start = std::max(0, seq.subtitle_start_frame - pad);
  r.end = std::min(rows - 1, seq.subtitle_end_frame + pad);
  return r;
}

struct EmbeddedVideos {
  std::map<std::string, EmbeddedSequence> by_id;
};

EmbeddedVideos embed_needed_videos(const MlpParams& params, const CorpusManifest& manifest,
                                   const FeatureCache& cache,
                                   const std::vector<GroundTruthInstance>& gt,
                                   const EvalOptions& opts) {
  std::vector<std::string> ids;
  {
    std::set<std::string> seen;
    for (const auto& g : gt)
      if (seen.insert(g.video_id).second) ids.push_back(g.video_id);
  }
  std::vector<EmbeddedSequence> slots(ids.size());
  parallel_for(ids.size(), opts.threads, [&](size_t i) {
    const SubtitledSequence* seq = manifest.sequence_by_id(ids[i]);
    if (!seq) throw DataError("ground truth references unknown video '" + ids[i] + "'");
    slots[i] = embed_continuous(params, cache.get(seq->feature_path), opts.stride, 1);
  });
  EmbeddedVideos out;
  for (size_t i = 0; i < ids.size(); ++i) out.by_id.emplace(ids[i], std::move(slots[i]));
  return out;
}

}  // namespace

std::vector<RetrievalCase> build_retrieval_cases(const MlpParams& params,
                                                 const CorpusManifest& manifest,
                                                 const FeatureCache& cache,
                                                 const std::vector<GroundTruthInstance>& gt_in,
                                                 const EvalOptions& opts) {
  std::vector<GroundTruthInstance> gt = filtered(gt_in, opts.word_filter);
  if (gt.empty()) throw DataError("no ground truth instances to evaluate");
  auto dict = embed_dictionary(params, manifest, cache, opts.threads);
  EmbeddedVideos videos = embed_needed_videos(params, manifest, cache, gt, opts);

  // Per (clip, dictionary entry): the peak similarity inside the padded
  // subtitle window and the row where it occurs.
  struct ClipScores {
    std::vector<double> score;      // per dictionary entry
    std::vector<int> frame;
  };
  std::vector<ClipScores> scores(gt.size());
  parallel_for(gt.size(), opts.threads, [&](size_t i) {
    const GroundTruthInstance& g = gt[i];
    const SubtitledSequence* seq = manifest.sequence_by_id(g.video_id);
    const EmbeddedSequence& emb = videos.by_id.at(g.video_id);
    FrameRange window = test_window(*seq, opts.test_pad_seconds, emb.rows);
    ClipScores& cs = scores[i];
    cs.score.assign(manifest.dictionary.size(), -2.0);
    cs.frame.assign(manifest.dictionary.size(), 0);
    for (const auto& [word, variants] : dict)
      for (const DictVariant& v : variants) {
        double best = -2.0;
        int best_row = 0;
        for (size_t k = 0; k < emb.embeddings.size(); ++k) {
          int row = emb.row_at(k);
          if (row < window.start || row > window.end) continue;
          double s = cosine_similarity(emb.embeddings[k], v.embedding);
          if (s > best) {
            best = s;
            best_row = row;
          }
        }
        cs.score[static_cast<size_t>(v.entry_index)] = best;
        cs.frame[static_cast<size_t>(v.entry_index)] = best_row;
      }
  });

  std::vector<RetrievalCase> cases;
  if (opts.direction == RetrievalDirection::cont_to_dict) {
    for (size_t i = 0; i < gt.size(); ++i) {
      RetrievalCase c;
      c.video_id = gt[i].video_id;
      c.word = gt[i].word;
      c.annotation_frame = gt[i].frame;
      for (size_t d = 0; d < manifest.dictionary.size(); ++d) {
        const DictionaryEntry& entry = manifest.dictionary[d];
        c.ranking.push_back({entry.id, entry.word, scores[i].score[d], scores[i].frame[d],
                             gt[i].frame});
      }
      std::stable_sort(c.ranking.begin(), c.ranking.end(),
                       [](const RetrievalEntry& a, const RetrievalEntry& b) {
                         return a.score > b.score;
                       });
      cases.push_back(std::move(c));
    }
  } else {
    // Rank continuous clips per dictionary entry; each candidate clip keeps
    // its own annotated frame as the localization reference.
    for (size_t d = 0; d < manifest.dictionary.size(); ++d) {
      const DictionaryEntry& entry = manifest.dictionary[d];
      RetrievalCase c;
      c.video_id = entry.id;
      c.word = entry.word;
      c.annotation_frame = 0;
      for (size_t i = 0; i < gt.size(); ++i)
        c.ranking.push_back({gt[i].video_id, gt[i].word, scores[i].score[d],
                             scores[i].frame[d], gt[i].frame});
      std::stable_sort(c.ranking.begin(), c.ranking.end(),
                       [](const RetrievalEntry& a, const RetrievalEntry& b) {
                         return a.score > b.score;
                       });
      cases.push_back(std::move(c));
    }
  }
  return cases;
}

std::vector<SpotResult> spot_ground_truth(const MlpParams& params,
                                          const CorpusManifest& manifest,
                                          const FeatureCache& cache,
                                          const std::vector<GroundTruthInstance>& gt_in,
                                          const EvalOptions& opts) {
  std::vector<GroundTruthInstance> gt = filtered(gt_in, opts.word_filter);
  if (gt.empty()) throw DataError("no ground truth instances to evaluate");
  auto dict = embed_dictionary(params, manifest, cache, opts.threads);
  EmbeddedVideos videos = embed_needed_videos(params, manifest, cache, gt, opts);

  std::vector<SpotResult> spots(gt.size());
  parallel_for(gt.size(), opts.threads, [&](size_t i) {
    const GroundTruthInstance& g = gt[i];
    const SubtitledSequence* seq = manifest.sequence_by_id(g.video_id);
    auto it = dict.find(g.word.str());
    if (it == dict.end())
      throw DataError("ground truth word '" + g.word.str() + "' has no dictionary entry");
    const EmbeddedSequence& emb = videos.by_id.at(g.video_id);
    FrameRange window = test_window(*seq, opts.test_pad_seconds, emb.rows);
    spots[i] = spot(g.word, it->second, emb, window, g.video_id);
  });
  return spots;
}

}  // namespace signspot
