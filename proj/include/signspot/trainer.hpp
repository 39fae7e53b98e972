#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "signspot/bags.hpp"
#include "signspot/corpus.hpp"
#include "signspot/model.hpp"

namespace signspot {

enum class Framework { watch_lookup, watch_read_lookup, infonce, classification_baseline };
Framework framework_from_string(const std::string& s);
const char* to_string(Framework f);

struct TrainConfig {
  Framework framework = Framework::watch_read_lookup;
  int batch_size = 128;
  int epochs = 50;
  double lr = 0.01;
  std::vector<int> lr_decay_epochs = {40, 45};
  double lr_decay_factor = 10.0;
  double tau = 0.07;
  double confidence_threshold = 0.5;
  SynonymPolicy synonym_policy = SynonymPolicy::keep_all;
  bool class_balanced = true;
  uint64_t seed = 0;
  bool share_domains = true;
  int d_hidden = 512;
  int d_out = 256;
  BatchOptions batch_options;
  int threads = 1;

  void validate() const;
};

TrainConfig train_config_from_json_file(const std::string& path);
std::string train_config_to_json(const TrainConfig& config);

struct EpochStats {
  double mean_loss = 0.0;
  double lr = 0.0;
  double wall_time_s = 0.0;  // informational; excluded from determinism checks
};

struct TrainHistory {
  std::vector<EpochStats> epochs;
};

struct TrainResult {
  MlpParams params;
  TrainHistory history;
  // Final accuracy over the training samples (classification baseline only).
  std::optional<double> classification_accuracy;
};

// Loads every feature file referenced by a manifest once; immutable after
// preload and safe to read from worker threads.
class FeatureCache {
 public:
  void preload(const CorpusManifest& manifest);
  const FeatureSequence& get(const std::string& path) const;
  int feature_dim() const { return dim_; }

 private:
  std::map<std::string, FeatureSequence> by_path_;
  int dim_ = 0;
};

Vec softmax(const Vec& logits);

// Epochs of plain SGD over class-balanced minibatches. Each epoch is one
// pass over the eligible annotated segments in a seeded random order;
// segments whose word collides with the batch under construction are
// deferred to the front of the next epoch. Deterministic for a fixed seed
// at any thread count.
TrainResult train(const CorpusManifest& manifest, const TrainConfig& config,
                  const std::string& dump_bags_dir = "");

// Cross-entropy over MLP embeddings of labelled segments and their
// dictionary entries; the classifier head is discarded.
MlpParams train_classification_baseline(const CorpusManifest& manifest,
                                        const TrainConfig& config);

double learning_rate_for_epoch(const TrainConfig& config, int epoch /* 1-based */);

}  // namespace signspot
