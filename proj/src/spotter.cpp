#include "signspot/spotter.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "signspot/parallel.hpp"

namespace signspot {

using nlohmann::json;

EmbeddedSequence embed_continuous(const MlpParams& params, const FeatureSequence& features,
                                  int stride, int threads) {
  if (stride < 1) throw DataError("stride must be >= 1");
  if (features.rows() < 1) throw DataError("empty feature sequence");
  EmbeddedSequence out;
  out.stride = stride;
  out.rows = features.rows();
  size_t count = (static_cast<size_t>(features.rows()) + static_cast<size_t>(stride) - 1) /
                 static_cast<size_t>(stride);
  out.embeddings.resize(count);
  parallel_for(count, threads, [&](size_t k) {
    out.embeddings[k] = mlp_forward(params.stack(Domain::continuous),
                                    features.row(static_cast<int>(k) * stride), nullptr);
  });
  return out;
}

std::map<std::string, std::vector<DictVariant>> embed_dictionary(const MlpParams& params,
                                                                 const CorpusManifest& manifest,
                                                                 const FeatureCache& cache,
                                                                 int threads) {
  std::vector<Vec> embeddings(manifest.dictionary.size());
  parallel_for(manifest.dictionary.size(), threads, [&](size_t i) {
    Vec feat = dictionary_feature(cache.get(manifest.dictionary[i].feature_path));
    embeddings[i] = mlp_forward(params.stack(Domain::dictionary), feat, nullptr);
  });
  std::map<std::string, std::vector<DictVariant>> out;
  for (size_t i = 0; i < manifest.dictionary.size(); ++i) {
    const DictionaryEntry& entry = manifest.dictionary[i];
    out[entry.word.str()].push_back(
        {static_cast<int>(i), entry.variant_index, std::move(embeddings[i])});
  }
  for (auto& [word, variants] : out)
    std::sort(variants.begin(), variants.end(),
              [](const DictVariant& a, const DictVariant& b) {
                return a.variant_index < b.variant_index;
              });
  return out;
}

SpotResult spot(const Word& word, const std::vector<DictVariant>& variants,
                const EmbeddedSequence& continuous, std::optional<FrameRange> search_window,
                const std::string& video_id) {
  if (variants.empty()) throw DataError("word '" + word.str() + "' has no variant embeddings");
  int lo = 0;
  int hi = continuous.rows - 1;
  if (search_window) {
    if (search_window->start > search_window->end || search_window->end < 0 ||
        search_window->start > continuous.rows - 1)
      throw DataError("search window outside video for '" + video_id + "'");
    lo = std::max(lo, search_window->start);
    hi = std::min(hi, search_window->end);
  }

  SpotResult best;
  best.video_id = video_id;
  best.word = word;
  best.score = -2.0;
  for (size_t k = 0; k < continuous.embeddings.size(); ++k) {
    int row = continuous.row_at(k);
    if (row < lo || row > hi) continue;
    for (const DictVariant& v : variants) {
      double score = cosine_similarity(continuous.embeddings[k], v.embedding);
      // Ties break to the earliest frame, then the lowest variant index.
      if (score > best.score) {
        best.score = score;
        best.frame = row;
        best.variant_index = v.variant_index;
      }
    }
  }
  if (best.score < -1.5)
    throw DataError("search window contains no grid positions for '" + video_id + "'");
  return best;
}

namespace {

FrameRange padded_subtitle_rows(const SubtitledSequence& seq, double pad_seconds, int rows) {
  int pad = static_cast<int>(std::ceil(pad_seconds * seq.fps));
  FrameRange r;
  r.start = std::max(0, seq.subtitle_start_frame - pad);
  r.end = std::min(rows - 1, seq.subtitle_end_frame + pad);
  return r;
}

}  // namespace

std::vector<MinedAnnotation> mine_annotations(const MlpParams& params,
                                              const CorpusManifest& manifest,
                                              const FeatureCache& cache, double threshold,
                                              double pad_seconds, int stride, int threads) {
  auto dict = embed_dictionary(params, manifest, cache, threads);
  std::vector<std::vector<MinedAnnotation>> per_video(manifest.continuous.size());

  parallel_for(manifest.continuous.size(), threads, [&](size_t v) {
    const SubtitledSequence& seq = manifest.continuous[v];
    const FeatureSequence& feats = cache.get(seq.feature_path);
    EmbeddedSequence emb = embed_continuous(params, feats, stride, 1);
    FrameRange window = padded_subtitle_rows(seq, pad_seconds, emb.rows);
    if (window.start > window.end) return;
    for (const Word& word : tokenize(seq.subtitle_text, manifest.vocabulary)) {
      auto it = dict.find(word.str());
      if (it == dict.end()) continue;
      SpotResult peak = spot(word, it->second, emb, window, seq.id);
      if (peak.score < threshold) continue;
      MinedAnnotation m;
      m.video_id = seq.id;
      m.word = word;
      m.center_frame = peak.frame + kWindowFrames / 2;
      m.window_start = std::max(0, m.center_frame - 16);
      m.window_end = std::min(seq.num_frames, m.center_frame + 16);
      m.score = peak.score;
      m.variant_index = peak.variant_index;
      m.search_start = window.start;
      m.search_end = window.end + kWindowFrames - 1;
      per_video[v].push_back(std::move(m));
    }
  });

  std::vector<MinedAnnotation> out;
  for (auto& v : per_video)
    for (auto& m : v) out.push_back(std::move(m));
  std::sort(out.begin(), out.end(), [](const MinedAnnotation& a, const MinedAnnotation& b) {
    if (a.video_id != b.video_id) return a.video_id < b.video_id;
    if (a.word != b.word) return a.word < b.word;
    return a.center_frame < b.center_frame;
  });
  return out;
}

std::vector<YieldRow> yield_statistics(const std::vector<MinedAnnotation>& mined,
                                       const CorpusManifest& manifest,
                                       const std::vector<double>& thresholds) {
  std::vector<YieldRow> out;
  for (double t : thresholds) {
    YieldRow row;
    row.threshold = t;
    std::set<std::string> vocab;
    for (const MinedAnnotation& m : mined) {
      if (m.score < t) continue;
      ++row.instance_count;
      vocab.insert(m.word.str());
      const SubtitledSequence* seq = manifest.sequence_by_id(m.video_id);
      if (!seq) continue;
      for (const SparseAnnotation& ann : seq->annotations) {
        if (ann.source != AnnotationSource::mouthing || ann.word != m.word) continue;
        if (ann.frame >= m.search_start && ann.frame <= m.search_end) {
          ++row.duplicate_with_mouthing;
          break;
        }
      }
    }
    row.vocab_size = static_cast<int>(vocab.size());
    out.push_back(row);
  }
  return out;
}

std::vector<std::vector<double>> variant_traces(const Word& word,
                                                const std::vector<DictVariant>& variants,
                                                const EmbeddedSequence& continuous) {
  if (variants.empty()) throw DataError("word '" + word.str() + "' has no variant embeddings");
  std::vector<std::vector<double>> out(variants.size());
  for (size_t v = 0; v < variants.size(); ++v) {
    out[v].reserve(continuous.embeddings.size());
    for (const Vec& e : continuous.embeddings)
      out[v].push_back(cosine_similarity(e, variants[v].embedding));
  }
  return out;
}

std::vector<FauxAmiPair> faux_amis(const std::vector<DictIndexEntry>& dict_a,
                                   const std::vector<DictIndexEntry>& dict_b, int k) {
  if (k < 1) throw DataError("faux amis requires k >= 1");
  if (dict_a.empty() || dict_b.empty()) throw DataError("faux amis requires non-empty sets");
  std::vector<FauxAmiPair> out;
  for (const DictIndexEntry& a : dict_a) {
    std::vector<std::pair<double, size_t>> scored;
    scored.reserve(dict_b.size());
    for (size_t j = 0; j < dict_b.size(); ++j)
      scored.emplace_back(cosine_similarity(a.embedding, dict_b[j].embedding), j);
    std::sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) {
      if (x.first != y.first) return x.first > y.first;
      return x.second < y.second;
    });
    int keep = std::min<int>(k, static_cast<int>(scored.size()));
    for (int r = 0; r < keep; ++r) {
      const DictIndexEntry& b = dict_b[scored[static_cast<size_t>(r)].second];
      out.push_back({a.id, a.word, r + 1, b.id, b.word,
                     scored[static_cast<size_t>(r)].first, a.word == b.word});
    }
  }
  return out;
}

std::pair<int, int> trim_dictionary(const std::vector<WristFrame>& wrists,
                                    double motion_threshold) {
  if (wrists.size() < 2) throw DataError("wrist trajectory needs at least two frames");
  bool any = false;
  for (const auto& f : wrists) any = any || f.left || f.right;
  if (!any) throw DataError("all wrist keypoints missing");

  std::vector<double> scales;
  for (const auto& f : wrists)
    if (f.torso_scale) scales.push_back(*f.torso_scale);
  double median_scale = 1.0;
  if (!scales.empty()) {
    std::sort(scales.begin(), scales.end());
    median_scale = scales[scales.size() / 2];
  }

  size_t n = wrists.size();
  std::vector<double> disp(n, 0.0);
  for (size_t t = 1; t < n; ++t) {
    double d = 0.0;
    if (wrists[t].left && wrists[t - 1].left)
      d = std::max(d, (*wrists[t].left - *wrists[t - 1].left).norm());
    if (wrists[t].right && wrists[t - 1].right)
      d = std::max(d, (*wrists[t].right - *wrists[t - 1].right).norm());
    disp[t] = d;
  }

  std::vector<double> smooth(n, 0.0);
  for (size_t t = 0; t < n; ++t) {
    double sum = disp[t];
    int cnt = 1;
    if (t > 0) {
      sum += disp[t - 1];
      ++cnt;
    }
    if (t + 1 < n) {
      sum += disp[t + 1];
      ++cnt;
    }
    smooth[t] = sum / cnt;
  }

  double bar = motion_threshold * median_scale;
  int first = -1, last = -1;
  for (size_t t = 0; t < n; ++t) {
    if (smooth[t] > bar) {
      if (first < 0) first = static_cast<int>(t);
      last = static_cast<int>(t);
    }
  }
  if (first < 0) return {0, static_cast<int>(n) - 1};
  // Displacement at t measures motion between frames t-1 and t.
  return {std::max(0, first - 1), last};
}

std::vector<WristFrame> read_keypoints_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open keypoints file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError("keypoints parse error in " + path + ": " + e.what());
  }
  std::vector<WristFrame> out;
  for (const auto& f : doc.at("frames")) {
    WristFrame frame;
    auto point = [&](const char* key) -> std::optional<Eigen::Vector2d> {
      if (!f.contains(key) || f.at(key).is_null()) return std::nullopt;
      const auto& p = f.at(key);
      return Eigen::Vector2d(p.at(0).get<double>(), p.at(1).get<double>());
    };
    frame.left = point("left_wrist");
    frame.right = point("right_wrist");
    if (f.contains("torso_scale") && !f.at("torso_scale").is_null())
      frame.torso_scale = f.at("torso_scale").get<double>();
    out.push_back(std::move(frame));
  }
  return out;
}

std::vector<Detection> extract_detections(const Word& word,
                                          const std::vector<DictVariant>& variants,
                                          const EmbeddedSequence& continuous,
                                          const std::string& video_id, double score_floor,
                                          int nms_frames) {
  if (variants.empty()) throw DataError("word '" + word.str() + "' has no variant embeddings");
  size_t count = continuous.embeddings.size();
  std::vector<double> best(count, -2.0);
  std::vector<int> best_variant(count, 0);
  for (size_t k = 0; k < count; ++k)
    for (const DictVariant& v : variants) {
      double s = cosine_similarity(continuous.embeddings[k], v.embedding);
      if (s > best[k]) {
        best[k] = s;
        best_variant[k] = v.variant_index;
      }
    }

  std::vector<size_t> maxima;
  for (size_t k = 0; k < count; ++k) {
    if (best[k] < score_floor) continue;
    bool left_ok = k == 0 || best[k] >= best[k - 1];
    bool right_ok = k + 1 == count || best[k] >= best[k + 1];
    if (left_ok && right_ok) maxima.push_back(k);
  }
  std::sort(maxima.begin(), maxima.end(), [&](size_t a, size_t b) {
    if (best[a] != best[b]) return best[a] > best[b];
    return a < b;
  });

  std::vector<Detection> out;
  std::vector<int> kept_frames;
  for (size_t k : maxima) {
    int frame = continuous.row_at(k);
    bool suppressed = false;
    for (int f : kept_frames)
      if (std::abs(f - frame) < nms_frames) {
        suppressed = true;
        break;
      }
    if (suppressed) continue;
    kept_frames.push_back(frame);
    out.push_back({video_id, frame, best[k], best_variant[k]});
  }
  return out;
}

}  // namespace signspot
