#pragma once

#include <cstdint>

namespace fansmb {

// Architecture of the any-subset masked autoregressive flow.
struct FansConfig {
  int d = 2;
  int max_subset = 2;         // M: largest subset the model is asked to score
  int hidden_layers = 1;
  int blocks_per_hidden = 6;  // alpha_B
  int hidden_block_size = 0;  // 0: d-1 nodes per block, or 2M in compact mode
  int output_blocks = 20;
  bool compact = false;
  int dsf_dim = 4;
  int flow_layers = 1;

  // Reference schedule: M = d-1 (d <= 20), 20 (d < 100), 30 (d >= 100);
  // compact iff d >= 100; 16 output blocks from d = 100 on.
  static FansConfig defaults_for(int d);

  void validate() const;

  // Hidden scores live in [1, score_range()].
  int score_range() const { return compact ? max_subset - 1 : d - 1; }
  int block_size() const;
  int hidden_width() const { return blocks_per_hidden * block_size(); }
  int heads_per_variable() const { return 3 * dsf_dim; }
  int output_width() const { return d * heads_per_variable(); }
};

struct TrainConfig {
  int epochs = 5000;
  int batch_size = 64;
  double learning_rate = 1e-3;
  int mask_group = 8;  // samples sharing one sampled leaf mask
  bool early_stop = true;
  int early_stop_window = 200;
  double early_stop_tolerance = 1e-4;
  std::uint64_t seed = 0;

  static TrainConfig defaults_for(int d);
};

}  // namespace fansmb
