#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "signspot/corpus.hpp"
#include "signspot/rng.hpp"

namespace signspot {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Projection head: e = W3 * lrelu(W2 * lrelu(W1*x + b1 + x) + b2) + b3,
// with leaky-ReLU slope 0.2 and the skip connection on the input features.
struct MlpDims {
  int d_in = 1024;
  int d_hidden = 512;
  int d_out = 256;
};

struct MlpStack {
  Mat w1;  // d_in x d_in
  Vec b1;
  Mat w2;  // d_hidden x d_in
  Vec b2;
  Mat w3;  // d_out x d_hidden
  Vec b3;

  MlpDims dims() const {
    return MlpDims{static_cast<int>(w1.cols()), static_cast<int>(w2.rows()),
                   static_cast<int>(w3.rows())};
  }
};

enum class Domain { continuous, dictionary };

// A second stack is present only when domain-specific heads are requested;
// by default a single shared MLP serves both domains.
struct MlpParams {
  MlpStack shared;
  std::optional<MlpStack> dict_specific;

  bool share_domains() const { return !dict_specific.has_value(); }
  const MlpStack& stack(Domain d) const {
    return (d == Domain::dictionary && dict_specific) ? *dict_specific : shared;
  }
  MlpStack& stack(Domain d) {
    return (d == Domain::dictionary && dict_specific) ? *dict_specific : shared;
  }
};

struct ForwardTape {
  Vec x;
  Vec z1, h1;  // pre/post first activation (skip already added to z1)
  Vec z2, h2;
};

struct StackGrads {
  Mat w1;
  Vec b1;
  Mat w2;
  Vec b2;
  Mat w3;
  Vec b3;

  static StackGrads zeros(const MlpDims& dims);
  void add_scaled(const StackGrads& other, double scale);
};

// Weights ~ uniform(-sqrt(6/fan_in), +sqrt(6/fan_in)), biases zero.
MlpStack init_stack(Rng& rng, const MlpDims& dims);
MlpParams init_params(uint64_t seed, const MlpDims& dims, bool share_domains = true);

Vec mlp_forward(const MlpStack& stack, const Vec& x, ForwardTape* tape = nullptr);

// Exact gradients of the forward map; lrelu'(0) is taken as 1. Accumulates
// parameter gradients into grads and returns the gradient w.r.t. x.
Vec mlp_backward(const MlpStack& stack, const ForwardTape& tape, const Vec& grad_e,
                 StackGrads& grads);

double cosine_similarity(const Vec& a, const Vec& b);

// Accumulates d(sim)/da and d(sim)/db, scaled by grad_sim.
void cosine_backward(const Vec& a, const Vec& b, double grad_sim, Vec& grad_a, Vec& grad_b);

// Mean of per-clip trunk vectors; the result is fed through the MLP once.
Vec dictionary_feature(const FeatureSequence& clips);

// Checkpoint: magic "MLPW", u32 version=1, u32 d_in, then W1,b1,W2,b2,W3,b3
// each as u32 rows, u32 cols, float32 little-endian row-major. A second
// tensor group follows when domain-specific heads are in use.
void save_params(const std::string& path, const MlpParams& params);
MlpParams load_params(const std::string& path);

}  // namespace signspot
