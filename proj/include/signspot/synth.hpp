#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "signspot/bags.hpp"
#include "signspot/corpus.hpp"
#include "signspot/mil_nce.hpp"

namespace signspot {

// Synthetic corpus: per (word, variant) a continuous-domain prototype vector;
// dictionary entries are the prototypes pushed through a fixed orthogonal-ish
// linear map plus bias (the isolated/co-articulated gap), continuous videos
// are noise with prototypes planted at known frames, subtitles mention the
// planted words plus distractors. Held-out words are planted and subtitled
// but never annotated in the training manifest.
struct SynthConfig {
  int vocab_size = 30;
  int variants_min = 1;
  int variants_max = 10;
  double variants_mean = 3.0;
  int feature_dim = 64;
  int clips_per_entry = 3;
  double domain_shift_strength = 0.3;  // 0 keeps dictionary prototypes in-domain
  double domain_bias = 1.75;
  double noise_sigma = 0.1;
  double background_sigma = 0.2;
  double signal_scale = 3.0;
  double amplitude_jitter = 0.5;
  int label_offset = 6;  // annotated frame sits this many frames after sign onset
  int signs_per_video = 4;
  int video_frames = 240;
  int num_videos = 90;
  int num_test_videos = 20;
  int subtitle_distractors = 2;
  int held_out_count = 6;
  std::vector<std::string> held_out_words;  // overrides held_out_count when set
  uint64_t seed = 1;
};

SynthConfig synth_config_from_json_file(const std::string& path);

struct PlantRecord {
  std::string video_id;
  std::string word;
  int variant_index = 0;
  int frame = 0;
};

struct SynthCorpus {
  std::string manifest_path;       // training view (held-out words unannotated)
  std::string test_manifest_path;  // fresh videos, all plants annotated
  std::string plant_log_path;
  std::string test_plant_log_path;
  std::vector<PlantRecord> plants;
  std::vector<PlantRecord> test_plants;
  std::vector<std::string> held_out;
};

SynthCorpus generate_corpus(const SynthConfig& config, const std::string& out_dir);

std::vector<PlantRecord> read_plant_log(const std::string& path);

enum class BagFramework { watch_lookup, watch_read_lookup };

// Naive set-builder enumeration of the bag definitions: every anchor scans
// all (segment, dictionary) combinations and keeps those passing the
// membership predicates. Test oracle only; quadratic on purpose.
std::vector<AnchorBags> oracle_bags(const Batch& batch, BagFramework framework);

// Direct extended-precision evaluation of the contrastive objective,
// without log-sum-exp shifting.
double oracle_loss(std::span<const AnchorLossInput> anchors);

// Textbook average precision over a binary relevance ranking:
// mean of precision-at-hit over hits; 0 when there are no hits.
double oracle_ap(const std::vector<int>& ranked_relevance);

}  // namespace signspot
