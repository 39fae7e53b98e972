#include "signspot/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "signspot/eval.hpp"
#include "signspot/feature_io.hpp"
#include "signspot/synth.hpp"

namespace signspot {

using nlohmann::json;

namespace {

struct GlobalFlags {
  uint64_t seed = 0;
  bool seed_set = false;
  int threads = 1;
  std::string log_level = "info";
};

void announce(const std::string& command, const json& effective) {
  std::cerr << "[" << command << "] effective config: " << effective.dump() << "\n";
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open output file: " + path);
  return out;
}

// Payload goes to stdout unless an output path is given.
class PayloadSink {
 public:
  explicit PayloadSink(const std::string& path) {
    if (!path.empty()) {
      file_ = open_out(path);
      out_ = &file_;
    } else {
      out_ = &std::cout;
    }
  }
  std::ostream& stream() { return *out_; }

 private:
  std::ofstream file_;
  std::ostream* out_ = nullptr;
};

json metrics_to_json(const std::string& protocol, const json& map_v, const json& r5,
                     const json& loc, const json& per_class) {
  return json{{"protocol", protocol},
              {"map", map_v},
              {"r_at_5", r5},
              {"localization_accuracy", loc},
              {"per_class", per_class}};
}

std::vector<std::string> split_words(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

int cmd_synth(const std::string& config_path, const std::string& out_dir,
              const GlobalFlags& flags) {
  SynthConfig config =
      config_path.empty() ? SynthConfig{} : synth_config_from_json_file(config_path);
  if (flags.seed_set) config.seed = flags.seed;
  announce("synth", {{"out", out_dir}, {"seed", config.seed}, {"vocab_size", config.vocab_size},
                     {"feature_dim", config.feature_dim}, {"num_videos", config.num_videos}});
  SynthCorpus corpus = generate_corpus(config, out_dir);
  json summary = {{"manifest", corpus.manifest_path},
                  {"test_manifest", corpus.test_manifest_path},
                  {"plant_log", corpus.plant_log_path},
                  {"test_plant_log", corpus.test_plant_log_path},
                  {"plants", corpus.plants.size()},
                  {"test_plants", corpus.test_plants.size()},
                  {"held_out", corpus.held_out}};
  std::cout << summary.dump() << "\n";
  return 0;
}

int cmd_train(const std::string& manifest_path, const std::string& config_path,
              const std::string& out_path, const std::string& history_path,
              const std::string& dump_dir, const GlobalFlags& flags) {
  TrainConfig config =
      config_path.empty() ? TrainConfig{} : train_config_from_json_file(config_path);
  if (flags.seed_set) config.seed = flags.seed;
  config.threads = flags.threads;
  announce("train", json::parse(train_config_to_json(config)));

  CorpusManifest manifest = load_manifest(manifest_path);
  TrainResult result = train(manifest, config, dump_dir);
  save_params(out_path, result.params);
  if (!history_path.empty()) {
    json hist = json::array();
    for (size_t e = 0; e < result.history.epochs.size(); ++e) {
      const EpochStats& s = result.history.epochs[e];
      hist.push_back({{"epoch", e + 1},
                      {"mean_loss", s.mean_loss},
                      {"lr", s.lr},
                      {"wall_time_s", s.wall_time_s}});
    }
    open_out(history_path) << hist.dump(2) << "\n";
  }
  json summary = {{"params", out_path}, {"epochs", result.history.epochs.size()}};
  if (!result.history.epochs.empty())
    summary["final_mean_loss"] = result.history.epochs.back().mean_loss;
  if (result.classification_accuracy)
    summary["classification_accuracy"] = *result.classification_accuracy;
  std::cout << summary.dump() << "\n";
  return 0;
}

int cmd_spot(const std::string& params_path, const std::string& manifest_path,
             const std::string& word_text, const std::string& video_id, int stride,
             const std::string& out_path, const GlobalFlags& flags) {
  announce("spot", {{"params", params_path}, {"manifest", manifest_path}, {"word", word_text},
                    {"video", video_id}, {"stride", stride}});
  CorpusManifest manifest = load_manifest(manifest_path);
  Word word(word_text);
  if (!manifest.vocabulary.contains(word))
    throw DataError("word '" + word_text + "' is not in the vocabulary");
  MlpParams params = load_params(params_path);
  FeatureCache cache;
  cache.preload(manifest);
  auto dict = embed_dictionary(params, manifest, cache, flags.threads);
  auto it = dict.find(word.str());
  if (it == dict.end()) throw DataError("word '" + word_text + "' has no dictionary entries");

  PayloadSink sink(out_path);
  for (const auto& seq : manifest.continuous) {
    if (!video_id.empty() && seq.id != video_id) continue;
    EmbeddedSequence emb =
        embed_continuous(params, cache.get(seq.feature_path), stride, flags.threads);
    SpotResult r = spot(word, it->second, emb, std::nullopt, seq.id);
    json line = {{"video_id", r.video_id},
                 {"word", r.word.str()},
                 {"frame", r.frame},
                 {"score", r.score},
                 {"variant_index", r.variant_index}};
    sink.stream() << line.dump() << "\n";
  }
  return 0;
}

int cmd_mine(const std::string& params_path, const std::string& manifest_path, double threshold,
             double pad_seconds, int stride, const std::string& out_path,
             const GlobalFlags& flags) {
  announce("mine", {{"params", params_path}, {"manifest", manifest_path},
                    {"threshold", threshold}, {"pad_seconds", pad_seconds}, {"stride", stride}});
  CorpusManifest manifest = load_manifest(manifest_path);
  MlpParams params = load_params(params_path);
  FeatureCache cache;
  cache.preload(manifest);
  auto mined =
      mine_annotations(params, manifest, cache, threshold, pad_seconds, stride, flags.threads);
  PayloadSink sink(out_path);
  for (const auto& m : mined) {
    json line = {{"video_id", m.video_id},       {"word", m.word.str()},
                 {"center_frame", m.center_frame}, {"start_frame", m.window_start},
                 {"end_frame", m.window_end},     {"score", m.score},
                 {"variant_index", m.variant_index}};
    sink.stream() << line.dump() << "\n";
  }
  std::cerr << "[mine] " << mined.size() << " annotations at threshold " << threshold << "\n";
  return 0;
}

int cmd_traces(const std::string& params_path, const std::string& manifest_path,
               const std::string& word_text, const std::string& video_id, int stride,
               const std::string& out_path, const GlobalFlags& flags) {
  announce("traces", {{"params", params_path}, {"manifest", manifest_path}, {"word", word_text},
                      {"video", video_id}, {"stride", stride}});
  CorpusManifest manifest = load_manifest(manifest_path);
  Word word(word_text);
  const SubtitledSequence* seq = manifest.sequence_by_id(video_id);
  if (!seq) throw DataError("unknown video id '" + video_id + "'");
  MlpParams params = load_params(params_path);
  FeatureCache cache;
  cache.preload(manifest);
  auto dict = embed_dictionary(params, manifest, cache, flags.threads);
  auto it = dict.find(word.str());
  if (it == dict.end()) throw DataError("word '" + word_text + "' has no dictionary entries");

  EmbeddedSequence emb =
      embed_continuous(params, cache.get(seq->feature_path), stride, flags.threads);
  auto traces = variant_traces(word, it->second, emb);

  PayloadSink sink(out_path);
  sink.stream() << "frame";
  for (const auto& v : it->second) sink.stream() << ",variant_" << v.variant_index;
  sink.stream() << "\n";
  for (size_t k = 0; k < emb.embeddings.size(); ++k) {
    sink.stream() << emb.row_at(k);
    for (const auto& series : traces) sink.stream() << "," << series[k];
    sink.stream() << "\n";
  }
  return 0;
}

std::vector<DictIndexEntry> embed_whole_dictionary(const MlpParams& params,
                                                   const CorpusManifest& manifest,
                                                   int threads) {
  FeatureCache cache;
  cache.preload(manifest);
  auto by_word = embed_dictionary(params, manifest, cache, threads);
  std::vector<DictIndexEntry> out;
  for (const auto& entry : manifest.dictionary) {
    for (const auto& v : by_word.at(entry.word.str()))
      if (v.entry_index >= 0 &&
          manifest.dictionary[static_cast<size_t>(v.entry_index)].id == entry.id) {
        out.push_back({entry.id, entry.word, v.embedding});
        break;
      }
  }
  return out;
}

int cmd_fauxamis(const std::string& params_path, const std::string& dict_a_path,
                 const std::string& dict_b_path, int k, const std::string& out_path,
                 const GlobalFlags& flags) {
  announce("fauxamis", {{"params", params_path}, {"dict_a", dict_a_path},
                        {"dict_b", dict_b_path}, {"k", k}});
  MlpParams params = load_params(params_path);
  CorpusManifest a = load_manifest(dict_a_path);
  CorpusManifest b = load_manifest(dict_b_path);
  auto pairs = faux_amis(embed_whole_dictionary(params, a, flags.threads),
                         embed_whole_dictionary(params, b, flags.threads), k);
  PayloadSink sink(out_path);
  for (const auto& p : pairs) {
    json line = {{"a_id", p.a_id},   {"a_word", p.a_word.str()}, {"rank", p.rank},
                 {"b_id", p.b_id},   {"b_word", p.b_word.str()}, {"score", p.score},
                 {"same_word", p.same_word}};
    sink.stream() << line.dump() << "\n";
  }
  return 0;
}

int cmd_trim(const std::string& keypoints_path, double threshold,
             const std::string& out_path) {
  announce("trim", {{"keypoints", keypoints_path}, {"threshold", threshold}});
  auto wrists = read_keypoints_file(keypoints_path);
  auto [start, end] = trim_dictionary(wrists, threshold);
  PayloadSink sink(out_path);
  sink.stream() << json{{"start_frame", start}, {"end_frame", end}}.dump() << "\n";
  return 0;
}

int cmd_eval(const std::string& params_path, const std::string& manifest_path,
             const std::string& protocol, const std::string& gt_path,
             const std::string& words_csv, int stride, double pad_seconds,
             const std::string& direction, double min_score, const std::string& out_path,
             const GlobalFlags& flags) {
  announce("eval", {{"params", params_path}, {"manifest", manifest_path},
                    {"protocol", protocol}, {"ground_truth", gt_path}, {"stride", stride},
                    {"pad_seconds", pad_seconds}, {"direction", direction}});
  CorpusManifest manifest = load_manifest(manifest_path);
  MlpParams params = load_params(params_path);
  FeatureCache cache;
  cache.preload(manifest);

  std::vector<GroundTruthInstance> gt =
      gt_path.empty() ? ground_truth_from_manifest(manifest) : read_ground_truth_jsonl(gt_path);

  EvalOptions opts;
  opts.stride = stride;
  opts.test_pad_seconds = pad_seconds;
  opts.threads = flags.threads;
  opts.word_filter = split_words(words_csv);
  if (direction == "dict_to_cont")
    opts.direction = RetrievalDirection::dict_to_cont;
  else if (direction != "cont_to_dict")
    throw UsageError("unknown retrieval direction: '" + direction + "'");

  json metrics;
  if (protocol == "retrieval") {
    auto cases = build_retrieval_cases(params, manifest, cache, gt, opts);
    json per_class;
    for (const auto& [word, v] : retrieval_map_per_class(cases)) per_class[word]["ap"] = v;
    for (const auto& [word, v] : recall_at_k_per_class(cases, 5)) per_class[word]["r_at_5"] = v;
    metrics = metrics_to_json(protocol, retrieval_map(cases), recall_at_k(cases, 5), nullptr,
                              per_class);
  } else if (protocol == "localization") {
    auto spots = spot_ground_truth(params, manifest, cache, gt, opts);
    double acc = localization_accuracy(spots, gt);
    json per_class = json::object();
    metrics = metrics_to_json(protocol, nullptr, nullptr, acc, per_class);
  } else if (protocol == "spotting") {
    std::map<std::string, std::vector<Detection>> detections;
    std::map<std::string, std::vector<GroundTruthInstance>> gt_per_class;
    for (const auto& g : gt) gt_per_class[g.word.str()].push_back(g);
    auto dict = embed_dictionary(params, manifest, cache, flags.threads);
    for (const auto& [word, gts] : gt_per_class) {
      auto it = dict.find(word);
      if (it == dict.end()) continue;
      for (const auto& seq : manifest.continuous) {
        EmbeddedSequence emb =
            embed_continuous(params, cache.get(seq.feature_path), stride, flags.threads);
        auto dets = extract_detections(Word(word), it->second, emb, seq.id, min_score);
        auto& sink = detections[word];
        sink.insert(sink.end(), dets.begin(), dets.end());
      }
    }
    double map_value = spotting_benchmark_map(detections, gt_per_class);
    json per_class = json::object();
    metrics = metrics_to_json(protocol, map_value, nullptr, nullptr, per_class);
  } else {
    throw UsageError("unknown protocol: '" + protocol + "'");
  }

  PayloadSink sink(out_path);
  sink.stream() << metrics.dump(2) << "\n";
  return 0;
}

int cmd_stats(const std::string& manifest_path, const std::string& mined_path,
              const std::string& thresholds_csv, double pad_seconds,
              const std::string& out_path) {
  announce("stats", {{"manifest", manifest_path}, {"mined", mined_path},
                     {"thresholds", thresholds_csv}});
  CorpusManifest manifest = load_manifest(manifest_path, ValidationMode::warn_and_skip);

  json doc;
  doc["vocabulary_size"] = manifest.vocabulary.size();
  doc["continuous_sequences"] = manifest.continuous.size();
  doc["dictionary_entries"] = manifest.dictionary.size();
  int annotations = 0, mouthing = 0;
  for (const auto& seq : manifest.continuous)
    for (const auto& ann : seq.annotations) {
      ++annotations;
      if (ann.source == AnnotationSource::mouthing) ++mouthing;
    }
  doc["annotations"] = annotations;
  doc["mouthing_annotations"] = mouthing;

  if (!mined_path.empty()) {
    std::ifstream in(mined_path);
    if (!in) throw DataError("cannot open mined annotations: " + mined_path);
    std::vector<MinedAnnotation> mined;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      json rec = json::parse(line, nullptr, false);
      if (rec.is_discarded()) throw DataError("malformed mined line in " + mined_path);
      MinedAnnotation m;
      m.video_id = rec.at("video_id").get<std::string>();
      m.word = Word(rec.at("word").get<std::string>());
      m.center_frame = rec.at("center_frame").get<int>();
      m.window_start = rec.at("start_frame").get<int>();
      m.window_end = rec.at("end_frame").get<int>();
      m.score = rec.at("score").get<double>();
      m.variant_index = rec.at("variant_index").get<int>();
      const SubtitledSequence* seq = manifest.sequence_by_id(m.video_id);
      if (seq) {
        int rows = seq->num_frames - kWindowFrames + 1;
        int pad = static_cast<int>(std::ceil(pad_seconds * seq->fps));
        m.search_start = std::max(0, seq->subtitle_start_frame - pad);
        m.search_end = std::min(rows - 1, seq->subtitle_end_frame + pad) + kWindowFrames - 1;
      }
      mined.push_back(std::move(m));
    }
    std::vector<double> thresholds;
    for (const auto& t : split_words(thresholds_csv)) thresholds.push_back(std::stod(t));
    if (thresholds.empty()) thresholds = {0.7, 0.8, 0.9};
    json yield = json::array();
    for (const auto& row : yield_statistics(mined, manifest, thresholds))
      yield.push_back({{"threshold", row.threshold},
                       {"vocab_size", row.vocab_size},
                       {"instance_count", row.instance_count},
                       {"duplicate_with_mouthing", row.duplicate_with_mouthing}});
    doc["yield"] = yield;
  }

  PayloadSink sink(out_path);
  sink.stream() << doc.dump(2) << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"feature-level sign spotting toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags flags;
  app.add_option("--seed", flags.seed, "override the configured random seed")
      ->each([&](const std::string&) { flags.seed_set = true; });
  app.add_option("--threads", flags.threads, "worker threads (results are identical at any value)")
      ->check(CLI::PositiveNumber);
  app.add_option("--log-level", flags.log_level, "quiet|info|debug");

  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus with planted signs");
  std::string synth_config, synth_out;
  synth->add_option("--config", synth_config, "synth config JSON");
  synth->add_option("--out", synth_out, "output directory")->required();

  auto* train_cmd = app.add_subcommand("train", "train the projection head");
  std::string train_manifest, train_config, train_out, train_history, train_dump;
  train_cmd->add_option("--manifest", train_manifest, "corpus manifest")->required();
  train_cmd->add_option("--config", train_config, "train config JSON");
  train_cmd->add_option("--out", train_out, "output checkpoint path")->required();
  train_cmd->add_option("--history", train_history, "write per-epoch history JSON");
  train_cmd->add_option("--dump-bags", train_dump, "write per-step bag dumps to this directory");

  auto* spot_cmd = app.add_subcommand("spot", "localize a query word in continuous videos");
  std::string spot_params, spot_manifest, spot_word, spot_video, spot_out;
  int spot_stride = 1;
  spot_cmd->add_option("--params", spot_params, "checkpoint")->required();
  spot_cmd->add_option("--manifest", spot_manifest, "corpus manifest")->required();
  spot_cmd->add_option("--word", spot_word, "query word")->required();
  spot_cmd->add_option("--video", spot_video, "restrict to one video id");
  spot_cmd->add_option("--stride", spot_stride, "grid stride")->check(CLI::PositiveNumber);
  spot_cmd->add_option("--out", spot_out, "output JSONL (stdout when omitted)");

  auto* mine_cmd = app.add_subcommand("mine", "mine sign annotations from subtitles");
  std::string mine_params, mine_manifest, mine_out;
  double mine_threshold = 0.7, mine_pad = 4.0;
  int mine_stride = 1;
  mine_cmd->add_option("--params", mine_params, "checkpoint")->required();
  mine_cmd->add_option("--manifest", mine_manifest, "corpus manifest")->required();
  mine_cmd->add_option("--threshold", mine_threshold, "peak similarity threshold");
  mine_cmd->add_option("--pad-seconds", mine_pad, "search window padding");
  mine_cmd->add_option("--stride", mine_stride, "grid stride")->check(CLI::PositiveNumber);
  mine_cmd->add_option("--out", mine_out, "output JSONL (stdout when omitted)");

  auto* traces_cmd = app.add_subcommand("traces", "per-variant similarity series as CSV");
  std::string traces_params, traces_manifest, traces_word, traces_video, traces_out;
  int traces_stride = 1;
  traces_cmd->add_option("--params", traces_params, "checkpoint")->required();
  traces_cmd->add_option("--manifest", traces_manifest, "corpus manifest")->required();
  traces_cmd->add_option("--word", traces_word, "query word")->required();
  traces_cmd->add_option("--video", traces_video, "video id")->required();
  traces_cmd->add_option("--stride", traces_stride, "grid stride")->check(CLI::PositiveNumber);
  traces_cmd->add_option("--out", traces_out, "output CSV (stdout when omitted)");

  auto* faux_cmd = app.add_subcommand("fauxamis", "cross-dictionary nearest neighbours");
  std::string faux_params, faux_a, faux_b, faux_out;
  int faux_k = 5;
  faux_cmd->add_option("--params", faux_params, "checkpoint")->required();
  faux_cmd->add_option("--dict-a", faux_a, "manifest for dictionary A")->required();
  faux_cmd->add_option("--dict-b", faux_b, "manifest for dictionary B")->required();
  faux_cmd->add_option("-k,--top-k", faux_k, "neighbours per entry")->check(CLI::PositiveNumber);
  faux_cmd->add_option("--out", faux_out, "output JSONL (stdout when omitted)");

  auto* trim_cmd = app.add_subcommand("trim", "trim still frames via wrist motion");
  std::string trim_keypoints, trim_out;
  double trim_threshold = 0.02;
  trim_cmd->add_option("--keypoints", trim_keypoints, "keypoints JSON")->required();
  trim_cmd->add_option("--threshold", trim_threshold, "motion threshold (torso-scale units)");
  trim_cmd->add_option("--out", trim_out, "output JSON (stdout when omitted)");

  auto* eval_cmd = app.add_subcommand("eval", "retrieval / localization / spotting metrics");
  std::string eval_params, eval_manifest, eval_protocol = "retrieval", eval_gt, eval_words;
  std::string eval_direction = "cont_to_dict", eval_out;
  int eval_stride = 1;
  double eval_pad = 2.0, eval_min_score = 0.0;
  eval_cmd->add_option("--params", eval_params, "checkpoint")->required();
  eval_cmd->add_option("--manifest", eval_manifest, "corpus manifest")->required();
  eval_cmd->add_option("--protocol", eval_protocol, "retrieval|localization|spotting");
  eval_cmd->add_option("--ground-truth", eval_gt, "JSONL ground truth (manifest annotations when omitted)");
  eval_cmd->add_option("--words", eval_words, "comma-separated word filter");
  eval_cmd->add_option("--stride", eval_stride, "grid stride")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--pad-seconds", eval_pad, "test search window padding");
  eval_cmd->add_option("--direction", eval_direction, "cont_to_dict|dict_to_cont");
  eval_cmd->add_option("--min-score", eval_min_score, "detection score floor (spotting)");
  eval_cmd->add_option("--out", eval_out, "metrics JSON (stdout when omitted)");

  auto* stats_cmd = app.add_subcommand("stats", "corpus and mining yield statistics");
  std::string stats_manifest, stats_mined, stats_thresholds, stats_out;
  double stats_pad = 4.0;
  stats_cmd->add_option("--manifest", stats_manifest, "corpus manifest")->required();
  stats_cmd->add_option("--mined", stats_mined, "mined annotations JSONL");
  stats_cmd->add_option("--thresholds", stats_thresholds, "comma-separated thresholds");
  stats_cmd->add_option("--pad-seconds", stats_pad, "search window padding used when mining");
  stats_cmd->add_option("--out", stats_out, "output JSON (stdout when omitted)");

  std::vector<const char*> argv;
  argv.push_back("signspot");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (synth->parsed()) return cmd_synth(synth_config, synth_out, flags);
    if (train_cmd->parsed())
      return cmd_train(train_manifest, train_config, train_out, train_history, train_dump, flags);
    if (spot_cmd->parsed())
      return cmd_spot(spot_params, spot_manifest, spot_word, spot_video, spot_stride, spot_out,
                      flags);
    if (mine_cmd->parsed())
      return cmd_mine(mine_params, mine_manifest, mine_threshold, mine_pad, mine_stride,
                      mine_out, flags);
    if (traces_cmd->parsed())
      return cmd_traces(traces_params, traces_manifest, traces_word, traces_video, traces_stride,
                        traces_out, flags);
    if (faux_cmd->parsed())
      return cmd_fauxamis(faux_params, faux_a, faux_b, faux_k, faux_out, flags);
    if (trim_cmd->parsed()) return cmd_trim(trim_keypoints, trim_threshold, trim_out);
    if (eval_cmd->parsed())
      return cmd_eval(eval_params, eval_manifest, eval_protocol, eval_gt, eval_words,
                      eval_stride, eval_pad, eval_direction, eval_min_score, eval_out, flags);
    if (stats_cmd->parsed())
      return cmd_stats(stats_manifest, stats_mined, stats_thresholds, stats_pad, stats_out);
    std::cerr << "usage error: no subcommand\n";
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace signspot
