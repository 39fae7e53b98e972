#pragma once

#include <span>
#include <vector>

#include "signspot/errors.hpp"

namespace signspot {

// One anchor's bag of pair similarities at temperature tau.
struct AnchorLossInput {
  std::vector<double> pos_sims;
  std::vector<double> neg_sims;
  double tau = 0.07;
};

struct AnchorGrads {
  std::vector<double> pos;
  std::vector<double> neg;
};

// Mean over anchors of -log( sum_P e^{s/tau} / (sum_P e^{s/tau} + sum_N e^{s/tau}) ),
// computed with max-shifted log-sum-exp. An anchor with no negatives
// contributes zero. Positive bags must be non-empty and tau > 0.
double mil_nce_loss(std::span<const AnchorLossInput> anchors);

// Exact per-pair derivative of the loss above (already divided by the anchor
// count). Positive-pair gradients are <= 0, negative-pair gradients >= 0.
std::vector<AnchorGrads> mil_nce_grad(std::span<const AnchorLossInput> anchors);

}  // namespace signspot
