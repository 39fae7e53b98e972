#include "signspot/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include <Eigen/Dense>
#include <json.hpp>

#include "signspot/feature_io.hpp"
#include "signspot/model.hpp"

namespace signspot {

using nlohmann::json;
namespace fs = std::filesystem;

SynthConfig synth_config_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open synth config: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError("synth config parse error in " + path + ": " + e.what());
  }
  SynthConfig c;
  c.vocab_size = doc.value("vocab_size", c.vocab_size);
  c.variants_min = doc.value("variants_min", c.variants_min);
  c.variants_max = doc.value("variants_max", c.variants_max);
  c.variants_mean = doc.value("variants_mean", c.variants_mean);
  c.feature_dim = doc.value("feature_dim", c.feature_dim);
  c.clips_per_entry = doc.value("clips_per_entry", c.clips_per_entry);
  c.domain_shift_strength = doc.value("domain_shift_strength", c.domain_shift_strength);
  c.domain_bias = doc.value("domain_bias", c.domain_bias);
  c.noise_sigma = doc.value("noise_sigma", c.noise_sigma);
  c.background_sigma = doc.value("background_sigma", c.background_sigma);
  c.signal_scale = doc.value("signal_scale", c.signal_scale);
  c.amplitude_jitter = doc.value("amplitude_jitter", c.amplitude_jitter);
  c.label_offset = doc.value("label_offset", c.label_offset);
  c.signs_per_video = doc.value("signs_per_video", c.signs_per_video);
  c.video_frames = doc.value("video_frames", c.video_frames);
  c.num_videos = doc.value("num_videos", c.num_videos);
  c.num_test_videos = doc.value("num_test_videos", c.num_test_videos);
  c.subtitle_distractors = doc.value("subtitle_distractors", c.subtitle_distractors);
  c.held_out_count = doc.value("held_out_count", c.held_out_count);
  if (doc.contains("held_out_words"))
    c.held_out_words = doc.at("held_out_words").get<std::vector<std::string>>();
  c.seed = doc.value("seed", c.seed);
  return c;
}

namespace {

void validate(const SynthConfig& c) {
  if (c.vocab_size < 1 || c.feature_dim < 1 || c.clips_per_entry < 1 ||
      c.signs_per_video < 1 || c.num_videos < 1 || c.video_frames < kWindowFrames)
    throw DataError("synth config sizes must be positive (and videos at least one window)");
  if (c.variants_min < 1 || c.variants_max < c.variants_min)
    throw DataError("synth config variant range invalid");
  if (c.held_out_count < 0 || c.held_out_count >= c.vocab_size)
    throw DataError("synth config held_out_count must be in [0, vocab_size)");
  if (c.signs_per_video > c.vocab_size)
    throw DataError("synth config signs_per_video exceeds vocabulary");
}

std::string word_name(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "w%03d", i);
  return buf;
}

// Truncated geometric on [min, max] targeting the configured mean.
int sample_variant_count(Rng& rng, const SynthConfig& c) {
  if (c.variants_max == c.variants_min) return c.variants_min;
  double mean_above = std::max(0.05, c.variants_mean - c.variants_min);
  double q = 1.0 / (1.0 + mean_above);
  int k = c.variants_min;
  while (k < c.variants_max && rng.next_double() > q) ++k;
  return k;
}

Eigen::VectorXd unit_gaussian(Rng& rng, int dim) {
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v(i) = rng.normal();
  double n = v.norm();
  return n > 0 ? Eigen::VectorXd(v / n) : v;
}

Eigen::VectorXd gaussian(Rng& rng, int dim, double sigma) {
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v(i) = sigma * rng.normal();
  return v;
}

FeatureSequence to_features(const std::vector<Eigen::VectorXd>& rows) {
  FeatureSequence seq;
  seq.data.resize(static_cast<Eigen::Index>(rows.size()), rows.at(0).size());
  for (size_t r = 0; r < rows.size(); ++r) seq.data.row(static_cast<Eigen::Index>(r)) =
      rows[r].cast<float>().transpose();
  return seq;
}

const char* kFillers[] = {"the", "is", "a", "it", "so", "now"};

}  // namespace

SynthCorpus generate_corpus(const SynthConfig& config, const std::string& out_dir) {
  validate(config);
  fs::create_directories(fs::path(out_dir) / "features");
  Rng rng(config.seed);

  std::vector<std::string> words;
  for (int i = 0; i < config.vocab_size; ++i) words.push_back(word_name(i));

  std::set<std::string> held_out;
  if (!config.held_out_words.empty()) {
    for (const auto& w : config.held_out_words) {
      if (std::find(words.begin(), words.end(), w) == words.end())
        throw DataError("held-out word '" + w + "' is not in the synthetic vocabulary");
      held_out.insert(w);
    }
  } else {
    for (int i = config.vocab_size - config.held_out_count; i < config.vocab_size; ++i)
      held_out.insert(words[static_cast<size_t>(i)]);
  }

  // Continuous-domain prototypes per (word, variant).
  std::vector<int> variant_counts;
  std::vector<std::vector<Eigen::VectorXd>> prototypes(words.size());
  for (size_t w = 0; w < words.size(); ++w) {
    int k = sample_variant_count(rng, config);
    variant_counts.push_back(k);
    for (int v = 0; v < k; ++v) prototypes[w].push_back(unit_gaussian(rng, config.feature_dim));
  }

  // Fixed cross-domain map: orthogonal-ish rotation plus bias.
  Eigen::MatrixXd shift = Eigen::MatrixXd::Identity(config.feature_dim, config.feature_dim);
  Eigen::VectorXd bias = Eigen::VectorXd::Zero(config.feature_dim);
  if (config.domain_shift_strength != 0.0) {
    Eigen::MatrixXd g(config.feature_dim, config.feature_dim);
    for (int r = 0; r < config.feature_dim; ++r)
      for (int c = 0; c < config.feature_dim; ++c) g(r, c) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    shift += config.domain_shift_strength * (q - shift);
    bias = config.domain_bias * unit_gaussian(rng, config.feature_dim);
  }

  json manifest;
  manifest["vocabulary"]["words"] = words;
  manifest["vocabulary"]["synonym_groups"] = json::array();
  manifest["vocabulary"]["sign_groups"] = json::array();
  manifest["continuous"] = json::array();
  manifest["dictionary"] = json::array();

  for (size_t w = 0; w < words.size(); ++w) {
    for (int v = 0; v < variant_counts[w]; ++v) {
      Eigen::VectorXd proto = shift * prototypes[w][static_cast<size_t>(v)] + bias;
      std::vector<Eigen::VectorXd> clips;
      for (int c = 0; c < config.clips_per_entry; ++c)
        clips.push_back(proto + gaussian(rng, config.feature_dim, config.noise_sigma));
      std::string id = "dict_" + words[w] + "_v" + std::to_string(v);
      std::string rel = "features/" + id + ".feat";
      write_feature_file((fs::path(out_dir) / rel).string(), to_features(clips));
      manifest["dictionary"].push_back(
          {{"id", id}, {"word", words[w]}, {"variant_index", v}, {"feature_path", rel}});
    }
  }

  auto make_videos = [&](int count, const std::string& prefix, bool annotate_held_out,
                         std::vector<PlantRecord>& plants, json& target) {
    int rows = config.video_frames - kWindowFrames + 1;
    // Keep plant cores a full window footprint apart and off the edges.
    int span = std::max(33, (rows - 33) / config.signs_per_video);
    for (int vid = 0; vid < count; ++vid) {
      char idbuf[32];
      std::snprintf(idbuf, sizeof(idbuf), "%s%03d", prefix.c_str(), vid);
      std::string id = idbuf;

      std::vector<int> word_ids(words.size());
      for (size_t i = 0; i < words.size(); ++i) word_ids[i] = static_cast<int>(i);
      rng.shuffle(word_ids);
      std::vector<int> planted(word_ids.begin(), word_ids.begin() + config.signs_per_video);
      std::vector<int> distractors;
      for (size_t i = static_cast<size_t>(config.signs_per_video);
           i < word_ids.size() &&
           distractors.size() < static_cast<size_t>(config.subtitle_distractors);
           ++i)
        distractors.push_back(word_ids[i]);

      std::vector<Eigen::VectorXd> feature_rows;
      feature_rows.reserve(static_cast<size_t>(rows));
      for (int r = 0; r < rows; ++r)
        feature_rows.push_back(gaussian(rng, config.feature_dim, config.background_sigma));

      json annotations = json::array();
      std::vector<std::pair<int, int>> plant_slots;  // (frame, planted pos)
      for (size_t s = 0; s < planted.size(); ++s) {
        int lo = 16 + static_cast<int>(s) * span;
        int width = std::max(1, span - 32);
        int frame = lo + static_cast<int>(rng.below(static_cast<uint64_t>(width)));
        frame = std::min(frame, rows - 17);
        plant_slots.emplace_back(frame, static_cast<int>(s));
      }
      for (auto& [frame, s] : plant_slots) {
        int word_id = planted[static_cast<size_t>(s)];
        int variant =
            static_cast<int>(rng.below(static_cast<uint64_t>(variant_counts[static_cast<size_t>(word_id)])));
        double amplitude =
            config.signal_scale * (1.0 + config.amplitude_jitter * rng.uniform(-1.0, 1.0));
        const Eigen::VectorXd& proto =
            prototypes[static_cast<size_t>(word_id)][static_cast<size_t>(variant)];
        // The label trails the sign onset (mouthing-style); the sign occupies
        // frames [onset, onset+15] and touches every window row overlapping
        // it, weighted by overlap fraction (peak at the onset row).
        int onset = std::max(0, frame - config.label_offset);
        for (int r = std::max(0, onset - kWindowFrames + 1);
             r <= std::min(rows - 1, onset + kWindowFrames - 1); ++r) {
          int overlap = kWindowFrames - std::abs(r - onset);
          feature_rows[static_cast<size_t>(r)] +=
              (amplitude * overlap / kWindowFrames) * proto;
        }
        plants.push_back({id, words[static_cast<size_t>(word_id)], variant, frame});
        bool held = held_out.count(words[static_cast<size_t>(word_id)]) > 0;
        if (!held || annotate_held_out) {
          double conf = annotate_held_out ? rng.uniform(0.9, 1.0) : rng.uniform(0.5, 1.0);
          annotations.push_back({{"word", words[static_cast<size_t>(word_id)]},
                                 {"frame", frame},
                                 {"confidence", conf},
                                 {"source", "mouthing"}});
        }
      }

      std::vector<int> mention = planted;
      mention.insert(mention.end(), distractors.begin(), distractors.end());
      rng.shuffle(mention);
      std::string subtitle;
      for (size_t i = 0; i < mention.size(); ++i) {
        subtitle += kFillers[i % (sizeof(kFillers) / sizeof(kFillers[0]))];
        subtitle += ' ';
        subtitle += words[static_cast<size_t>(mention[i])];
        subtitle += ' ';
      }
      if (!subtitle.empty()) subtitle.pop_back();

      std::string rel = "features/" + id + ".feat";
      write_feature_file((fs::path(out_dir) / rel).string(), to_features(feature_rows));
      target.push_back({{"id", id},
                        {"feature_path", rel},
                        {"num_frames", config.video_frames},
                        {"fps", 25.0},
                        {"subtitle_text", subtitle},
                        {"subtitle_start_frame", 0},
                        {"subtitle_end_frame", config.video_frames},
                        {"annotations", annotations}});
    }
  };

  SynthCorpus corpus;
  corpus.held_out.assign(held_out.begin(), held_out.end());

  make_videos(config.num_videos, "train", false, corpus.plants, manifest["continuous"]);

  json test_manifest = manifest;
  test_manifest["continuous"] = json::array();
  make_videos(config.num_test_videos, "test", true, corpus.test_plants,
              test_manifest["continuous"]);

  auto write_json = [](const std::string& path, const json& doc) {
    std::ofstream out(path, std::ios::trunc);
    out << doc.dump(2) << "\n";
    if (!out) throw DataError("failed to write " + path);
  };
  auto write_plants = [](const std::string& path, const std::vector<PlantRecord>& plants) {
    std::ofstream out(path, std::ios::trunc);
    for (const auto& p : plants) {
      json line = {{"video_id", p.video_id},
                   {"word", p.word},
                   {"variant_index", p.variant_index},
                   {"frame", p.frame}};
      out << line.dump() << "\n";
    }
    if (!out) throw DataError("failed to write " + path);
  };

  corpus.manifest_path = (fs::path(out_dir) / "manifest.json").string();
  corpus.test_manifest_path = (fs::path(out_dir) / "manifest_test.json").string();
  corpus.plant_log_path = (fs::path(out_dir) / "plant_log.jsonl").string();
  corpus.test_plant_log_path = (fs::path(out_dir) / "plant_log_test.jsonl").string();
  write_json(corpus.manifest_path, manifest);
  write_json(corpus.test_manifest_path, test_manifest);
  write_plants(corpus.plant_log_path, corpus.plants);
  write_plants(corpus.test_plant_log_path, corpus.test_plants);
  return corpus;
}

std::vector<PlantRecord> read_plant_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open plant log: " + path);
  std::vector<PlantRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json doc = json::parse(line, nullptr, false);
    if (doc.is_discarded()) throw DataError("malformed plant log line in " + path);
    out.push_back({doc.at("video_id").get<std::string>(), doc.at("word").get<std::string>(),
                   doc.at("variant_index").get<int>(), doc.at("frame").get<int>()});
  }
  return out;
}

namespace {

const Word* seg_word(const Batch& batch, int seg) {
  const auto& s = batch.segments[static_cast<size_t>(seg)];
  return s.word ? &*s.word : nullptr;
}

bool negative_allowed(const Batch& batch, int seg, const Word& dict_word) {
  const Word* sw = seg_word(batch, seg);
  return !(sw && *sw == dict_word);
}

bool in_fg_dicts_of_other_items(const Batch& batch, size_t i, int d) {
  for (size_t j = 0; j < batch.items.size(); ++j) {
    if (j == i) continue;
    const auto& fg = batch.items[j].dict_fg;
    if (std::find(fg.begin(), fg.end(), d) != fg.end()) return true;
  }
  return false;
}

bool in_bg_dicts_of_item(const BatchItem& item, int d, const Word& w) {
  for (const auto& [word, entries] : item.dict_bg)
    if (word == w) return std::find(entries.begin(), entries.end(), d) != entries.end();
  return false;
}

}  // namespace

std::vector<AnchorBags> oracle_bags(const Batch& batch, BagFramework framework) {
  std::vector<AnchorBags> out;
  bool read = framework == BagFramework::watch_read_lookup;
  size_t count = batch.items.size();
  std::vector<int> all_segments(batch.segments.size());
  for (size_t s = 0; s < all_segments.size(); ++s) all_segments[s] = static_cast<int>(s);

  for (size_t i = 0; i < count; ++i) {
    const BatchItem& item = batch.items[i];

    {
      AnchorBags bag;
      bag.kind = AnchorKind::seg_fore;
      bag.item = static_cast<int>(i);
      for (int s : all_segments)
        for (const auto& [d, dw] : batch.dict_pool) {
          if (s != item.fg_segment) continue;
          if (dw == item.fg_word) {
            bag.positives.emplace_back(s, d);
          } else {
            bool eligible = read ? true : in_fg_dicts_of_other_items(batch, i, d);
            if (eligible && negative_allowed(batch, s, dw)) bag.negatives.emplace_back(s, d);
          }
        }
      out.push_back(std::move(bag));
    }

    {
      AnchorBags bag;
      bag.kind = AnchorKind::dict_fore;
      bag.item = static_cast<int>(i);
      for (int s : all_segments)
        for (const auto& [d, dw] : batch.dict_pool) {
          if (dw != item.fg_word) continue;
          const auto& seg = batch.segments[static_cast<size_t>(s)];
          if (s == item.fg_segment) {
            bag.positives.emplace_back(s, d);
            continue;
          }
          bool eligible;
          if (read) {
            bool own_bg = seg.item == static_cast<int>(i) && seg.kind == SegmentKind::background;
            bool other_fg = seg.item != static_cast<int>(i) &&
                            seg.kind == SegmentKind::foreground &&
                            batch.items[static_cast<size_t>(seg.item)].fg_word != item.fg_word;
            eligible = own_bg || other_fg;
          } else {
            eligible = seg.item != static_cast<int>(i) &&
                       seg.kind == SegmentKind::foreground &&
                       batch.items[static_cast<size_t>(seg.item)].fg_word != item.fg_word;
          }
          if (eligible && negative_allowed(batch, s, dw)) bag.negatives.emplace_back(s, d);
        }
      out.push_back(std::move(bag));
    }

    if (!read) continue;

    for (size_t b = 0; b < item.bg_segments.size(); ++b) {
      AnchorBags bag;
      bag.kind = AnchorKind::seg_back;
      bag.item = static_cast<int>(i);
      bag.sub = static_cast<int>(b);
      int anchor_seg = item.bg_segments[b];
      for (int s : all_segments)
        for (const auto& [d, dw] : batch.dict_pool) {
          if (s != anchor_seg) continue;
          bool in_bg = false;
          for (const Word& w : item.bg_words)
            if (in_bg_dicts_of_item(item, d, w)) {
              in_bg = true;
              break;
            }
          if (in_bg) {
            bag.positives.emplace_back(s, d);
          } else if (!batch.subtitle_contains(static_cast<int>(i), dw) &&
                     negative_allowed(batch, s, dw)) {
            bag.negatives.emplace_back(s, d);
          }
        }
      out.push_back(std::move(bag));
    }

    for (size_t wi = 0; wi < item.bg_words.size(); ++wi) {
      const Word& w = item.bg_words[wi];
      AnchorBags bag;
      bag.kind = AnchorKind::dict_back;
      bag.item = static_cast<int>(i);
      bag.sub = static_cast<int>(wi);
      for (int s : all_segments)
        for (const auto& [d, dw] : batch.dict_pool) {
          if (!in_bg_dicts_of_item(item, d, w)) continue;
          const auto& seg = batch.segments[static_cast<size_t>(s)];
          bool own_bg = seg.item == static_cast<int>(i) && seg.kind == SegmentKind::background;
          if (own_bg) {
            bag.positives.emplace_back(s, d);
            continue;
          }
          bool own_fg = s == item.fg_segment;
          bool other_unsubtitled =
              seg.item != static_cast<int>(i) &&
              !batch.subtitle_contains(seg.item, w);
          if ((own_fg || other_unsubtitled) && negative_allowed(batch, s, dw))
            bag.negatives.emplace_back(s, d);
        }
      out.push_back(std::move(bag));
    }
  }

  for (auto& bag : out) {
    std::sort(bag.positives.begin(), bag.positives.end());
    std::sort(bag.negatives.begin(), bag.negatives.end());
  }
  std::erase_if(out, [](const AnchorBags& b) { return b.positives.empty(); });
  return out;
}

double oracle_loss(std::span<const AnchorLossInput> anchors) {
  if (anchors.empty()) return 0.0;
  long double total = 0.0L;
  for (const auto& a : anchors) {
    if (a.pos_sims.empty()) throw DataError("anchor has an empty positive bag");
    if (!(a.tau > 0.0)) throw DataError("temperature must be > 0");
    if (a.neg_sims.empty()) continue;
    long double sum_pos = 0.0L, sum_neg = 0.0L;
    for (double s : a.pos_sims) sum_pos += expl(static_cast<long double>(s) / a.tau);
    for (double s : a.neg_sims) sum_neg += expl(static_cast<long double>(s) / a.tau);
    total += -logl(sum_pos / (sum_pos + sum_neg));
  }
  return static_cast<double>(total / static_cast<long double>(anchors.size()));
}

double oracle_ap(const std::vector<int>& ranked_relevance) {
  int hits = 0;
  double sum = 0.0;
  for (size_t k = 0; k < ranked_relevance.size(); ++k) {
    if (ranked_relevance[k]) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(k + 1);
    }
  }
  return hits == 0 ? 0.0 : sum / hits;
}

}  // namespace signspot
