#pragma once

#include <map>
#include <string>
#include <vector>

#include "signspot/corpus.hpp"
#include "signspot/spotter.hpp"
#include "signspot/trainer.hpp"

namespace signspot {

// Accepted localization window around an annotated frame.
struct FrameTolerance {
  int before = 20;
  int after = 5;
  bool contains(int frame, int annotated) const {
    return frame >= annotated - before && frame <= annotated + after;
  }
};

struct RetrievalEntry {
  std::string id;
  Word word;
  double score = 0.0;
  int predicted_frame = 0;
  int gt_frame = 0;  // reference frame for the localization condition
};

// One query clip with its ranked candidate list (scores non-increasing).
struct RetrievalCase {
  std::string video_id;
  Word word;
  int annotation_frame = 0;
  std::vector<RetrievalEntry> ranking;
};

// Fraction of a class's cases with a correct-word candidate in the top k,
// averaged over classes.
double recall_at_k(const std::vector<RetrievalCase>& cases, int k = 5);
std::map<std::string, double> recall_at_k_per_class(const std::vector<RetrievalCase>& cases,
                                                    int k = 5);

// A ranked candidate is a true positive when its word matches and its
// predicted frame falls inside the tolerance window of the reference frame.
// AP per case, averaged within class, then over classes.
double retrieval_map(const std::vector<RetrievalCase>& cases, FrameTolerance tol = {});
std::map<std::string, double> retrieval_map_per_class(const std::vector<RetrievalCase>& cases,
                                                      FrameTolerance tol = {});

struct GroundTruthInstance {
  std::string video_id;
  Word word;
  int frame = 0;
};

// Fraction of spots whose frame lies inside the tolerance window of a
// ground-truth instance of the same (video, word).
double localization_accuracy(const std::vector<SpotResult>& spots,
                             const std::vector<GroundTruthInstance>& ground_truth,
                             FrameTolerance tol = {});

// Detection-style AP per class (greedy matching by score against unmatched
// ground-truth instances), averaged over classes with ground truth.
double spotting_benchmark_map(
    const std::map<std::string, std::vector<Detection>>& detections_per_class,
    const std::map<std::string, std::vector<GroundTruthInstance>>& gt_per_class,
    FrameTolerance tol = {});

enum class RetrievalDirection { cont_to_dict, dict_to_cont };

struct EvalOptions {
  int stride = 1;
  double test_pad_seconds = 2.0;  // search window padding around the subtitle
  RetrievalDirection direction = RetrievalDirection::cont_to_dict;
  int threads = 1;
  std::vector<std::string> word_filter;  // restrict to these words when non-empty
};

// Ground truth from manifest annotations (every annotation becomes a case).
std::vector<GroundTruthInstance> ground_truth_from_manifest(const CorpusManifest& manifest);
std::vector<GroundTruthInstance> read_ground_truth_jsonl(const std::string& path);

std::vector<RetrievalCase> build_retrieval_cases(const MlpParams& params,
                                                 const CorpusManifest& manifest,
                                                 const FeatureCache& cache,
                                                 const std::vector<GroundTruthInstance>& gt,
                                                 const EvalOptions& opts = {});

std::vector<SpotResult> spot_ground_truth(const MlpParams& params,
                                          const CorpusManifest& manifest,
                                          const FeatureCache& cache,
                                          const std::vector<GroundTruthInstance>& gt,
                                          const EvalOptions& opts = {});

}  // namespace signspot
