#include "signspot/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "signspot/feature_io.hpp"
#include "signspot/mil_nce.hpp"
#include "signspot/parallel.hpp"

namespace signspot {

using nlohmann::json;

Framework framework_from_string(const std::string& s) {
  if (s == "watch_lookup") return Framework::watch_lookup;
  if (s == "watch_read_lookup") return Framework::watch_read_lookup;
  if (s == "infonce") return Framework::infonce;
  if (s == "classification_baseline") return Framework::classification_baseline;
  throw DataError("unknown framework: '" + s + "'");
}

const char* to_string(Framework f) {
  switch (f) {
    case Framework::watch_lookup: return "watch_lookup";
    case Framework::watch_read_lookup: return "watch_read_lookup";
    case Framework::infonce: return "infonce";
    case Framework::classification_baseline: return "classification_baseline";
  }
  return "?";
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw DataError("batch_size must be >= 1");
  if (epochs < 0) throw DataError("epochs must be >= 0");
  if (!(lr > 0.0)) throw DataError("lr must be > 0");
  if (!(tau > 0.0)) throw DataError("tau must be > 0");
  if (!(lr_decay_factor > 0.0)) throw DataError("lr_decay_factor must be > 0");
  if (confidence_threshold < 0.0) throw DataError("confidence_threshold must be >= 0");
  if (d_hidden < 1 || d_out < 1) throw DataError("MLP dims must be >= 1");
  if (threads < 1) throw DataError("threads must be >= 1");
  for (int d : lr_decay_epochs)
    if (epochs > 0 && d >= epochs)
      throw DataError("lr decay epoch " + std::to_string(d) + " must be < epochs");
}

TrainConfig train_config_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open train config: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError("train config parse error in " + path + ": " + e.what());
  }
  TrainConfig c;
  if (doc.contains("framework")) c.framework = framework_from_string(doc.at("framework"));
  c.batch_size = doc.value("batch_size", c.batch_size);
  c.epochs = doc.value("epochs", c.epochs);
  c.lr = doc.value("lr", c.lr);
  if (doc.contains("lr_decay_epochs"))
    c.lr_decay_epochs = doc.at("lr_decay_epochs").get<std::vector<int>>();
  c.lr_decay_factor = doc.value("lr_decay_factor", c.lr_decay_factor);
  c.tau = doc.value("tau", c.tau);
  c.confidence_threshold = doc.value("confidence_threshold", c.confidence_threshold);
  if (doc.contains("synonym_policy"))
    c.synonym_policy = synonym_policy_from_string(doc.at("synonym_policy"));
  c.class_balanced = doc.value("class_balanced", c.class_balanced);
  c.seed = doc.value("seed", c.seed);
  c.share_domains = doc.value("share_domains", c.share_domains);
  c.d_hidden = doc.value("d_hidden", c.d_hidden);
  c.d_out = doc.value("d_out", c.d_out);
  c.batch_options.bg_segments_per_item =
      doc.value("bg_segments_per_item", c.batch_options.bg_segments_per_item);
  c.batch_options.fg_offset_before =
      doc.value("fg_offset_before", c.batch_options.fg_offset_before);
  c.batch_options.fg_offset_after =
      doc.value("fg_offset_after", c.batch_options.fg_offset_after);
  c.batch_options.max_bg_dict_per_item =
      doc.value("max_bg_dict_per_item", c.batch_options.max_bg_dict_per_item);
  return c;
}

std::string train_config_to_json(const TrainConfig& c) {
  json doc = {{"framework", to_string(c.framework)},
              {"batch_size", c.batch_size},
              {"epochs", c.epochs},
              {"lr", c.lr},
              {"lr_decay_epochs", c.lr_decay_epochs},
              {"lr_decay_factor", c.lr_decay_factor},
              {"tau", c.tau},
              {"confidence_threshold", c.confidence_threshold},
              {"synonym_policy", to_string(c.synonym_policy)},
              {"class_balanced", c.class_balanced},
              {"seed", c.seed},
              {"share_domains", c.share_domains},
              {"d_hidden", c.d_hidden},
              {"d_out", c.d_out},
              {"bg_segments_per_item", c.batch_options.bg_segments_per_item},
              {"fg_offset_before", c.batch_options.fg_offset_before},
              {"fg_offset_after", c.batch_options.fg_offset_after},
              {"max_bg_dict_per_item", c.batch_options.max_bg_dict_per_item},
              {"threads", c.threads}};
  return doc.dump();
}

void FeatureCache::preload(const CorpusManifest& manifest) {
  auto load = [&](const std::string& path) {
    if (by_path_.count(path)) return;
    FeatureSequence seq = read_feature_file(path);
    if (dim_ == 0) dim_ = seq.dim();
    if (seq.dim() != dim_)
      throw DataError("feature dimension mismatch in " + path + ": got " +
                      std::to_string(seq.dim()) + ", expected " + std::to_string(dim_));
    by_path_.emplace(path, std::move(seq));
  };
  for (const auto& seq : manifest.continuous) load(seq.feature_path);
  for (const auto& entry : manifest.dictionary) load(entry.feature_path);
}

const FeatureSequence& FeatureCache::get(const std::string& path) const {
  auto it = by_path_.find(path);
  if (it == by_path_.end()) throw DataError("feature file not preloaded: " + path);
  return it->second;
}

Vec softmax(const Vec& logits) {
  double m = logits.maxCoeff();
  Vec e = (logits.array() - m).exp();
  return e / e.sum();
}

double learning_rate_for_epoch(const TrainConfig& config, int epoch) {
  double lr = config.lr;
  for (int d : config.lr_decay_epochs)
    if (epoch >= d) lr /= config.lr_decay_factor;
  return lr;
}

namespace {

struct Instance {
  int seq = 0;
  int ann = 0;
  bool operator<(const Instance& o) const { return seq < o.seq || (seq == o.seq && ann < o.ann); }
  bool operator==(const Instance& o) const { return seq == o.seq && ann == o.ann; }
};

std::vector<Instance> eligible_instances(const CorpusManifest& manifest) {
  std::vector<Instance> out;
  for (size_t s = 0; s < manifest.continuous.size(); ++s)
    for (size_t a = 0; a < manifest.continuous[s].annotations.size(); ++a) {
      const auto& ann = manifest.continuous[s].annotations[a];
      const auto* entries = manifest.entries_for(ann.word);
      if (entries && !entries->empty())
        out.push_back({static_cast<int>(s), static_cast<int>(a)});
    }
  return out;
}

const Word& instance_word(const CorpusManifest& manifest, const Instance& inst) {
  return manifest.continuous[static_cast<size_t>(inst.seq)]
      .annotations[static_cast<size_t>(inst.ann)]
      .word;
}

// One epoch's pass: carried-over segments first, then a fresh shuffle of the
// rest. Word collisions within the batch under construction are deferred.
std::vector<std::vector<Instance>> schedule_epoch(const CorpusManifest& manifest,
                                                  const std::vector<Instance>& eligible,
                                                  std::vector<Instance>& carry,
                                                  const TrainConfig& config, Rng& rng) {
  std::vector<Instance> pool = carry;
  {
    std::set<std::pair<int, int>> carried;
    for (const auto& c : carry) carried.insert({c.seq, c.ann});
    std::vector<Instance> fresh;
    for (const auto& inst : eligible)
      if (!carried.count({inst.seq, inst.ann})) fresh.push_back(inst);
    rng.shuffle(fresh);
    pool.insert(pool.end(), fresh.begin(), fresh.end());
  }
  carry.clear();

  std::vector<std::vector<Instance>> batches;
  if (!config.class_balanced) {
    for (size_t i = 0; i < pool.size(); i += static_cast<size_t>(config.batch_size))
      batches.emplace_back(pool.begin() + static_cast<long>(i),
                           pool.begin() + static_cast<long>(std::min(
                                              pool.size(), i + static_cast<size_t>(config.batch_size))));
    return batches;
  }

  std::vector<Instance> current;
  std::set<std::string> words_in_batch;
  for (const auto& inst : pool) {
    const Word& w = instance_word(manifest, inst);
    if (words_in_batch.count(w.str())) {
      carry.push_back(inst);
      continue;
    }
    current.push_back(inst);
    words_in_batch.insert(w.str());
    if (static_cast<int>(current.size()) == config.batch_size) {
      batches.push_back(std::move(current));
      current.clear();
      words_in_batch.clear();
    }
  }
  if (!current.empty()) batches.push_back(std::move(current));
  return batches;
}

void dump_bags(const std::string& dir, int epoch, int step, const Batch& batch,
               const std::vector<AnchorBags>& bags, const CorpusManifest& manifest) {
  std::filesystem::create_directories(dir);
  std::string path = dir + "/bags_epoch" + std::to_string(epoch) + "_step" +
                     std::to_string(step) + ".jsonl";
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write bag dump: " + path);
  auto seg_ref = [&](int s) {
    const Segment& seg = batch.segments[static_cast<size_t>(s)];
    return seg.video_id + "@" + std::to_string(seg.start_row);
  };
  auto dict_ref = [&](int d) { return manifest.dictionary[static_cast<size_t>(d)].id; };
  auto pair_list = [&](const std::vector<std::pair<int, int>>& pairs) {
    json arr = json::array();
    for (const auto& [s, d] : pairs) arr.push_back({seg_ref(s), dict_ref(d)});
    return arr;
  };
  for (const auto& bag : bags) {
    json line = {{"anchor_kind", to_string(bag.kind)},
                 {"item", bag.item},
                 {"sub", bag.sub},
                 {"positives", pair_list(bag.positives)},
                 {"negatives", pair_list(bag.negatives)},
                 {"flagged", pair_list(bag.flagged)}};
    out << line.dump() << "\n";
  }
}

struct EmbeddedInputs {
  std::vector<Vec> seg_embeddings;
  std::vector<ForwardTape> seg_tapes;
  std::vector<Vec> dict_embeddings;  // indexed by position in batch.dict_pool
  std::vector<ForwardTape> dict_tapes;
};

EmbeddedInputs embed_batch(const CorpusManifest& manifest, const FeatureCache& cache,
                           const Batch& batch, const MlpParams& params, int threads) {
  EmbeddedInputs e;
  e.seg_embeddings.resize(batch.segments.size());
  e.seg_tapes.resize(batch.segments.size());
  e.dict_embeddings.resize(batch.dict_pool.size());
  e.dict_tapes.resize(batch.dict_pool.size());

  parallel_for(batch.segments.size(), threads, [&](size_t s) {
    const Segment& seg = batch.segments[s];
    const SubtitledSequence* seq = manifest.sequence_by_id(seg.video_id);
    const FeatureSequence& feats = cache.get(seq->feature_path);
    e.seg_embeddings[s] =
        mlp_forward(params.stack(Domain::continuous), feats.row(seg.start_row), &e.seg_tapes[s]);
  });
  parallel_for(batch.dict_pool.size(), threads, [&](size_t d) {
    const DictionaryEntry& entry =
        manifest.dictionary[static_cast<size_t>(batch.dict_pool[d].first)];
    Vec feat = dictionary_feature(cache.get(entry.feature_path));
    e.dict_embeddings[d] =
        mlp_forward(params.stack(Domain::dictionary), feat, &e.dict_tapes[d]);
  });
  return e;
}

// MIL contrastive step: embeds the batch once, evaluates the bag loss, and
// accumulates exact gradients back to the MLP stacks in a fixed order.
double mil_step(const CorpusManifest& manifest, const FeatureCache& cache, const Batch& batch,
                const std::vector<AnchorBags>& bags, MlpParams& params,
                const TrainConfig& config, double lr) {
  EmbeddedInputs inputs = embed_batch(manifest, cache, batch, params, config.threads);

  std::map<int, size_t> dict_slot;
  for (size_t d = 0; d < batch.dict_pool.size(); ++d) dict_slot[batch.dict_pool[d].first] = d;

  std::vector<AnchorLossInput> anchor_inputs(bags.size());
  parallel_for(bags.size(), config.threads, [&](size_t a) {
    const AnchorBags& bag = bags[a];
    AnchorLossInput& in = anchor_inputs[a];
    in.tau = config.tau;
    in.pos_sims.reserve(bag.positives.size());
    in.neg_sims.reserve(bag.negatives.size());
    for (const auto& [s, d] : bag.positives)
      in.pos_sims.push_back(cosine_similarity(inputs.seg_embeddings[static_cast<size_t>(s)],
                                              inputs.dict_embeddings[dict_slot.at(d)]));
    for (const auto& [s, d] : bag.negatives)
      in.neg_sims.push_back(cosine_similarity(inputs.seg_embeddings[static_cast<size_t>(s)],
                                              inputs.dict_embeddings[dict_slot.at(d)]));
  });

  double loss = mil_nce_loss(anchor_inputs);
  if (!std::isfinite(loss)) throw NumericalError("non-finite training loss");
  std::vector<AnchorGrads> grads = mil_nce_grad(anchor_inputs);

  // Similarity gradients accumulate into embedding gradients by anchor then
  // pair index, keeping the reduction order fixed.
  std::vector<Vec> seg_grad(batch.segments.size());
  std::vector<Vec> dict_grad(batch.dict_pool.size());
  for (size_t s = 0; s < seg_grad.size(); ++s)
    seg_grad[s] = Vec::Zero(inputs.seg_embeddings[s].size());
  for (size_t d = 0; d < dict_grad.size(); ++d)
    dict_grad[d] = Vec::Zero(inputs.dict_embeddings[d].size());

  for (size_t a = 0; a < bags.size(); ++a) {
    const AnchorBags& bag = bags[a];
    for (size_t p = 0; p < bag.positives.size(); ++p) {
      auto [s, d] = bag.positives[p];
      cosine_backward(inputs.seg_embeddings[static_cast<size_t>(s)],
                      inputs.dict_embeddings[dict_slot.at(d)], grads[a].pos[p],
                      seg_grad[static_cast<size_t>(s)], dict_grad[dict_slot.at(d)]);
    }
    for (size_t n = 0; n < bag.negatives.size(); ++n) {
      auto [s, d] = bag.negatives[n];
      cosine_backward(inputs.seg_embeddings[static_cast<size_t>(s)],
                      inputs.dict_embeddings[dict_slot.at(d)], grads[a].neg[n],
                      seg_grad[static_cast<size_t>(s)], dict_grad[dict_slot.at(d)]);
    }
  }

  MlpDims dims = params.shared.dims();
  StackGrads shared_grads = StackGrads::zeros(dims);
  StackGrads dict_grads = StackGrads::zeros(dims);
  StackGrads& dict_target = params.share_domains() ? shared_grads : dict_grads;
  for (size_t s = 0; s < batch.segments.size(); ++s)
    mlp_backward(params.stack(Domain::continuous), inputs.seg_tapes[s], seg_grad[s],
                 shared_grads);
  for (size_t d = 0; d < batch.dict_pool.size(); ++d)
    mlp_backward(params.stack(Domain::dictionary), inputs.dict_tapes[d], dict_grad[d],
                 dict_target);

  params.shared.w1 -= lr * shared_grads.w1;
  params.shared.b1 -= lr * shared_grads.b1;
  params.shared.w2 -= lr * shared_grads.w2;
  params.shared.b2 -= lr * shared_grads.b2;
  params.shared.w3 -= lr * shared_grads.w3;
  params.shared.b3 -= lr * shared_grads.b3;
  if (!params.share_domains()) {
    params.dict_specific->w1 -= lr * dict_grads.w1;
    params.dict_specific->b1 -= lr * dict_grads.b1;
    params.dict_specific->w2 -= lr * dict_grads.w2;
    params.dict_specific->b2 -= lr * dict_grads.b2;
    params.dict_specific->w3 -= lr * dict_grads.w3;
    params.dict_specific->b3 -= lr * dict_grads.b3;
  }
  return loss;
}

struct Classifier {
  Mat w;  // num_labels x d_out
  Vec b;
};

// Cross-entropy step over the batch's labelled segments and their
// dictionary entries. Returns the mean loss.
double classification_step(const CorpusManifest& manifest, const FeatureCache& cache,
                           const Batch& batch, MlpParams& params, Classifier& cls,
                           const std::map<std::string, int>& label_of,
                           const TrainConfig& config, double lr) {
  struct Sample {
    Vec feature;
    int label;
    Domain domain;
  };
  std::vector<Sample> samples;
  for (const BatchItem& item : batch.items) {
    const Segment& fg = batch.segments[static_cast<size_t>(item.fg_segment)];
    const SubtitledSequence* seq = manifest.sequence_by_id(fg.video_id);
    int label = label_of.at(item.fg_word.str());
    samples.push_back({cache.get(seq->feature_path).row(fg.start_row), label,
                       Domain::continuous});
    for (int d : item.dict_fg) {
      const DictionaryEntry& entry = manifest.dictionary[static_cast<size_t>(d)];
      samples.push_back({dictionary_feature(cache.get(entry.feature_path)), label,
                         Domain::dictionary});
    }
  }
  if (samples.empty()) return 0.0;

  std::vector<Vec> embeddings(samples.size());
  std::vector<ForwardTape> tapes(samples.size());
  parallel_for(samples.size(), config.threads, [&](size_t i) {
    embeddings[i] =
        mlp_forward(params.stack(samples[i].domain), samples[i].feature, &tapes[i]);
  });

  MlpDims dims = params.shared.dims();
  StackGrads shared_grads = StackGrads::zeros(dims);
  StackGrads dict_grads = StackGrads::zeros(dims);
  Mat cls_w_grad = Mat::Zero(cls.w.rows(), cls.w.cols());
  Vec cls_b_grad = Vec::Zero(cls.b.size());
  double inv = 1.0 / static_cast<double>(samples.size());

  double loss = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    Vec logits = cls.w * embeddings[i] + cls.b;
    Vec probs = softmax(logits);
    loss -= std::log(std::max(probs(samples[i].label), 1e-300));
    Vec dlogits = probs;
    dlogits(samples[i].label) -= 1.0;
    dlogits *= inv;
    cls_w_grad.noalias() += dlogits * embeddings[i].transpose();
    cls_b_grad += dlogits;
    Vec de = cls.w.transpose() * dlogits;
    bool dict_domain = samples[i].domain == Domain::dictionary;
    mlp_backward(params.stack(samples[i].domain), tapes[i], de,
                 (dict_domain && !params.share_domains()) ? dict_grads : shared_grads);
  }
  loss *= inv;
  if (!std::isfinite(loss)) throw NumericalError("non-finite training loss");

  params.shared.w1 -= lr * shared_grads.w1;
  params.shared.b1 -= lr * shared_grads.b1;
  params.shared.w2 -= lr * shared_grads.w2;
  params.shared.b2 -= lr * shared_grads.b2;
  params.shared.w3 -= lr * shared_grads.w3;
  params.shared.b3 -= lr * shared_grads.b3;
  if (!params.share_domains()) {
    params.dict_specific->w1 -= lr * dict_grads.w1;
    params.dict_specific->b1 -= lr * dict_grads.b1;
    params.dict_specific->w2 -= lr * dict_grads.w2;
    params.dict_specific->b2 -= lr * dict_grads.b2;
    params.dict_specific->w3 -= lr * dict_grads.w3;
    params.dict_specific->b3 -= lr * dict_grads.b3;
  }
  cls.w -= lr * cls_w_grad;
  cls.b -= lr * cls_b_grad;
  return loss;
}

double classification_accuracy(const CorpusManifest& manifest, const FeatureCache& cache,
                               const std::vector<Instance>& eligible, const MlpParams& params,
                               const Classifier& cls, const std::map<std::string, int>& label_of) {
  int correct = 0, total = 0;
  for (const Instance& inst : eligible) {
    const auto& seq = manifest.continuous[static_cast<size_t>(inst.seq)];
    const auto& ann = seq.annotations[static_cast<size_t>(inst.ann)];
    int rows = seq.num_frames - kWindowFrames + 1;
    int row = std::clamp(ann.frame, 0, rows - 1);
    Vec e = mlp_forward(params.stack(Domain::continuous),
                        cache.get(seq.feature_path).row(row), nullptr);
    Vec logits = cls.w * e + cls.b;
    int pred = 0;
    logits.maxCoeff(&pred);
    if (pred == label_of.at(ann.word.str())) ++correct;
    ++total;
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / total;
}

}  // namespace

TrainResult train(const CorpusManifest& manifest, const TrainConfig& config,
                  const std::string& dump_bags_dir) {
  config.validate();
  CorpusManifest view = filter_by_confidence(manifest, config.confidence_threshold);
  std::vector<Instance> eligible = eligible_instances(view);
  if (eligible.empty())
    throw DataError("degenerate corpus: no annotated word has a dictionary entry");

  FeatureCache cache;
  cache.preload(view);
  MlpDims dims{cache.feature_dim(), config.d_hidden, config.d_out};
  MlpParams params = init_params(config.seed, dims, config.share_domains);

  bool classify = config.framework == Framework::classification_baseline;
  Classifier cls;
  std::map<std::string, int> label_of;
  if (classify) {
    std::set<std::string> words;
    for (const Instance& inst : eligible) words.insert(instance_word(view, inst).str());
    int next = 0;
    for (const auto& w : words) label_of[w] = next++;
    Rng cls_rng(derive_seed(config.seed, 0xC1A));
    double bound = std::sqrt(6.0 / dims.d_out);
    cls.w.resize(static_cast<Eigen::Index>(label_of.size()), dims.d_out);
    for (Eigen::Index r = 0; r < cls.w.rows(); ++r)
      for (Eigen::Index c = 0; c < cls.w.cols(); ++c) cls.w(r, c) = cls_rng.uniform(-bound, bound);
    cls.b = Vec::Zero(static_cast<Eigen::Index>(label_of.size()));
  }

  TrainResult result;
  std::vector<Instance> carry;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    auto start = std::chrono::steady_clock::now();
    double lr = learning_rate_for_epoch(config, epoch);
    Rng epoch_rng(derive_seed(config.seed, 0xE0000 + static_cast<uint64_t>(epoch)));
    auto batches = schedule_epoch(view, eligible, carry, config, epoch_rng);

    double loss_sum = 0.0;
    int steps = 0;
    for (size_t step = 0; step < batches.size(); ++step) {
      std::vector<std::pair<int, int>> instances;
      for (const Instance& inst : batches[step]) instances.emplace_back(inst.seq, inst.ann);
      uint64_t batch_seed =
          derive_seed(config.seed, static_cast<uint64_t>(epoch), static_cast<uint64_t>(step));
      Batch batch = build_batch_from_instances(view, instances, batch_seed, config.batch_options);

      double loss;
      if (classify) {
        loss = classification_step(view, cache, batch, params, cls, label_of, config, lr);
      } else {
        std::vector<AnchorBags> bags = config.framework == Framework::watch_read_lookup
                                           ? build_watch_read_lookup_bags(batch)
                                           : build_watch_lookup_bags(batch);
        apply_synonym_policy(bags, batch, view.vocabulary, config.synonym_policy);
        if (config.framework == Framework::infonce) {
          Rng pick(derive_seed(batch_seed, 0x1F0));
          reduce_to_single_positive(bags, pick);
        }
        drop_empty_positive_bags(bags);
        if (!dump_bags_dir.empty()) dump_bags(dump_bags_dir, epoch, static_cast<int>(step),
                                              batch, bags, view);
        loss = mil_step(view, cache, batch, bags, params, config, lr);
      }
      loss_sum += loss;
      ++steps;
    }

    EpochStats stats;
    stats.mean_loss = steps > 0 ? loss_sum / steps : 0.0;
    stats.lr = lr;
    stats.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.history.epochs.push_back(stats);
  }

  if (classify)
    result.classification_accuracy =
        classification_accuracy(view, cache, eligible, params, cls, label_of);
  result.params = std::move(params);
  return result;
}

MlpParams train_classification_baseline(const CorpusManifest& manifest,
                                        const TrainConfig& config) {
  TrainConfig c = config;
  c.framework = Framework::classification_baseline;
  return train(manifest, c).params;
}

}  // namespace signspot
