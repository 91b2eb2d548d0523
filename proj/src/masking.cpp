#include "fansmb/masking.hpp"

#include <algorithm>

#include "fansmb/error.hpp"

namespace fansmb {

SubsetOrder build_subset_order(const VarSet& subset, int d) {
  if (subset.empty()) throw UsageError("subset order of an empty set");
  SubsetOrder order;
  for (int v : subset) {
    if (v < 0 || v >= d) throw UsageError("subset index " + std::to_string(v) + " out of range");
    order.positions.push_back(v + 1);
  }
  return order;
}

namespace {

bool valid_scores(const std::vector<int>& s, int hidden_max, int last_max) {
  for (std::size_t j = 0; j < s.size(); ++j) {
    const int cap = j + 1 == s.size() ? last_max : hidden_max;
    if (s[j] < 1 || s[j] > cap) return false;
    if (j > 0 && s[j] <= s[j - 1]) return false;
  }
  return true;
}

void lift_pass(std::vector<int>& s, int hidden_max, int last_max) {
  for (std::size_t j = 1; j < s.size(); ++j) {
    const int cap = j + 1 == s.size() ? last_max : hidden_max;
    if (s[j] <= s[j - 1] && s[j - 1] + 1 <= cap) s[j] = s[j - 1] + 1;
  }
}

void lower_pass(std::vector<int>& s) {
  for (std::size_t j = s.size() - 1; j-- > 0;)
    if (s[j] >= s[j + 1]) s[j] = std::max(1, s[j + 1] - 1);
}

}  // namespace

std::vector<int> resolve_colliders(std::vector<int> scores, int hidden_max, int last_max) {
  if (scores.empty() || valid_scores(scores, hidden_max, last_max)) return scores;
  lift_pass(scores, hidden_max, hidden_max);
  lower_pass(scores);
  if (valid_scores(scores, hidden_max, last_max)) return scores;
  // Lowering hit the floor; let the final element use its wider range.
  lift_pass(scores, hidden_max, last_max);
  lower_pass(scores);
  if (!valid_scores(scores, hidden_max, last_max))
    throw UsageError("cannot fit " + std::to_string(scores.size()) + " positions into score range " +
                     std::to_string(hidden_max));
  return scores;
}

SubsetOrder compact_rescale(const SubsetOrder& order, int max_subset, int d) {
  const int n = static_cast<int>(order.size());
  if (n > max_subset)
    throw UsageError("subset of size " + std::to_string(n) + " exceeds M=" + std::to_string(max_subset));
  if (max_subset < 2 || d < 2 || max_subset > d) throw UsageError("compact rescaling needs 2 <= M <= d");
  std::vector<int> scaled;
  scaled.reserve(order.size());
  for (int i : order.positions) {
    // ceil((M-1) i / (d-1)) in integer arithmetic
    long long num = static_cast<long long>(max_subset - 1) * i;
    scaled.push_back(static_cast<int>((num + d - 2) / (d - 1)));
  }
  return {resolve_colliders(std::move(scaled), max_subset - 1, max_subset)};
}

NodeScores node_scores(const FansConfig& cfg) {
  NodeScores s;
  for (int v = 0; v < cfg.d; ++v) s.input.push_back(v + 1);
  const int range = std::max(1, cfg.score_range());
  for (int l = 0; l < cfg.hidden_layers; ++l) {
    std::vector<int> layer;
    layer.reserve(cfg.hidden_width());
    for (int b = 0; b < cfg.blocks_per_hidden; ++b)
      for (int k = 0; k < cfg.block_size(); ++k) layer.push_back(k % range + 1);
    s.hidden.push_back(std::move(layer));
  }
  for (int v = 0; v < cfg.d; ++v)
    for (int h = 0; h < cfg.heads_per_variable(); ++h) s.output.push_back(v + 1);
  return s;
}

std::size_t MaskSet::connection_count() const {
  std::size_t n = 0;
  for (const auto& m : layers) n += static_cast<std::size_t>(m.sum());
  return n;
}

MaskSet build_masks(const SubsetOrder& order, const FansConfig& cfg) {
  if (order.positions.empty()) throw UsageError("cannot build masks for an empty subset");
  for (std::size_t j = 0; j < order.size(); ++j) {
    if (order.positions[j] < 1 || order.positions[j] > cfg.d) throw UsageError("subset position out of range");
    if (j > 0 && order.positions[j] <= order.positions[j - 1]) throw UsageError("subset order not increasing");
  }
  MaskSet ms;
  ms.order = order;
  ms.effective_scores = cfg.compact ? compact_rescale(order, cfg.max_subset, cfg.d).positions : order.positions;
  ms.variable_selected.assign(cfg.d, 0);

  // Effective score of each variable (0 when outside the subset).
  std::vector<int> var_score(cfg.d, 0);
  for (std::size_t j = 0; j < order.size(); ++j) {
    var_score[order.positions[j] - 1] = ms.effective_scores[j];
    ms.variable_selected[order.positions[j] - 1] = 1;
  }
  const int top = std::max(1, cfg.score_range()) + 1;
  std::vector<unsigned char> hidden_selected(top + 1, 0);
  for (std::size_t j = 0; j + 1 < order.size(); ++j)
    if (ms.effective_scores[j] <= top) hidden_selected[ms.effective_scores[j]] = 1;

  const NodeScores scores = node_scores(cfg);
  auto hidden_on = [&](int s) { return s <= top && hidden_selected[s] != 0; };

  // input -> first hidden, hidden -> hidden: s_l <= s_h
  const std::vector<int>* prev = nullptr;
  for (int l = 0; l < cfg.hidden_layers; ++l) {
    const auto& cur = scores.hidden[l];
    const int fan_in = l == 0 ? cfg.d : static_cast<int>(prev->size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cur.size()), fan_in);
    for (std::size_t h = 0; h < cur.size(); ++h) {
      if (!hidden_on(cur[h])) continue;
      for (int i = 0; i < fan_in; ++i) {
        int s_low = 0;
        if (l == 0) {
          s_low = var_score[i];
        } else if (hidden_on((*prev)[i])) {
          s_low = (*prev)[i];
        }
        if (s_low >= 1 && s_low <= cur[h]) m(static_cast<Eigen::Index>(h), i) = 1.0;
      }
    }
    ms.layers.push_back(std::move(m));
    prev = &cur;
  }

  // last hidden -> output heads: strict s_l < s_h
  const auto& last = scores.hidden.back();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(cfg.output_width(), static_cast<Eigen::Index>(last.size()));
  for (int v = 0; v < cfg.d; ++v) {
    if (var_score[v] == 0) continue;
    for (int hd = 0; hd < cfg.heads_per_variable(); ++hd) {
      const Eigen::Index row = static_cast<Eigen::Index>(v) * cfg.heads_per_variable() + hd;
      for (std::size_t h = 0; h < last.size(); ++h)
        if (hidden_on(last[h]) && last[h] < var_score[v]) out(row, static_cast<Eigen::Index>(h)) = 1.0;
    }
  }
  ms.layers.push_back(std::move(out));
  return ms;
}

MaskSet build_masks(const VarSet& subset, const FansConfig& cfg) {
  return build_masks(build_subset_order(subset, cfg.d), cfg);
}

}  // namespace fansmb
