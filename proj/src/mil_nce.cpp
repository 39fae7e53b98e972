#include "signspot/mil_nce.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace signspot {

namespace {

void validate(const AnchorLossInput& a) {
  if (a.pos_sims.empty()) throw DataError("anchor has an empty positive bag");
  if (!(a.tau > 0.0)) throw DataError("temperature must be > 0");
  for (double s : a.pos_sims)
    if (!std::isfinite(s)) throw NumericalError("non-finite positive similarity");
  for (double s : a.neg_sims)
    if (!std::isfinite(s)) throw NumericalError("non-finite negative similarity");
}

double max_logit(const AnchorLossInput& a) {
  double m = -std::numeric_limits<double>::infinity();
  for (double s : a.pos_sims) m = std::max(m, s / a.tau);
  for (double s : a.neg_sims) m = std::max(m, s / a.tau);
  return m;
}

}  // namespace

double mil_nce_loss(std::span<const AnchorLossInput> anchors) {
  if (anchors.empty()) return 0.0;
  double total = 0.0;
  for (const auto& a : anchors) {
    validate(a);
    if (a.neg_sims.empty()) continue;  // ratio is exactly 1
    double m = max_logit(a);
    double sum_pos = 0.0, sum_neg = 0.0;
    for (double s : a.pos_sims) sum_pos += std::exp(s / a.tau - m);
    for (double s : a.neg_sims) sum_neg += std::exp(s / a.tau - m);
    total += std::log(sum_pos + sum_neg) - std::log(sum_pos);
  }
  return total / static_cast<double>(anchors.size());
}

std::vector<AnchorGrads> mil_nce_grad(std::span<const AnchorLossInput> anchors) {
  std::vector<AnchorGrads> out(anchors.size());
  if (anchors.empty()) return out;
  double inv_count = 1.0 / static_cast<double>(anchors.size());
  for (size_t i = 0; i < anchors.size(); ++i) {
    const auto& a = anchors[i];
    validate(a);
    out[i].pos.assign(a.pos_sims.size(), 0.0);
    out[i].neg.assign(a.neg_sims.size(), 0.0);
    if (a.neg_sims.empty()) continue;  // constant-zero anchor loss
    double m = max_logit(a);
    double sum_pos = 0.0, sum_neg = 0.0;
    for (double s : a.pos_sims) sum_pos += std::exp(s / a.tau - m);
    for (double s : a.neg_sims) sum_neg += std::exp(s / a.tau - m);
    double sum_all = sum_pos + sum_neg;
    // d/ds of log(sum_all) - log(sum_pos), scaled by 1/(tau * #anchors).
    for (size_t p = 0; p < a.pos_sims.size(); ++p) {
      double e = std::exp(a.pos_sims[p] / a.tau - m);
      out[i].pos[p] = inv_count / a.tau * (e / sum_all - e / sum_pos);
    }
    for (size_t n = 0; n < a.neg_sims.size(); ++n) {
      double e = std::exp(a.neg_sims[n] / a.tau - m);
      out[i].neg[n] = inv_count / a.tau * (e / sum_all);
    }
  }
  return out;
}

}  // namespace signspot
