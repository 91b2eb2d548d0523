#include "fansmb/fans_config.hpp"

#include <algorithm>
#include <string>

#include "fansmb/dsf.hpp"
#include "fansmb/error.hpp"

namespace fansmb {

FansConfig FansConfig::defaults_for(int d) {
  FansConfig c;
  c.d = d;
  if (d <= 20) {
    c.max_subset = std::min(d, std::max(2, d - 1));
  } else if (d < 100) {
    c.max_subset = std::min(d, 20);
  } else {
    c.max_subset = 30;
  }
  c.compact = d >= 100;
  c.output_blocks = d < 100 ? 20 : 16;
  return c;
}

int FansConfig::block_size() const {
  if (hidden_block_size > 0) return hidden_block_size;
  return compact ? 2 * max_subset : std::max(1, d - 1);
}

void FansConfig::validate() const {
  auto fail = [](const std::string& m) { throw UsageError("invalid FANS config: " + m); };
  if (d < 2) fail("d must be >= 2");
  if (max_subset < 2 || max_subset > d) fail("need 2 <= M <= d");
  if (hidden_layers < 1) fail("need at least one hidden layer");
  if (blocks_per_hidden < 1) fail("blocks per hidden layer must be >= 1");
  if (hidden_block_size < 0) fail("hidden block size must be >= 0");
  if (output_blocks < 1) fail("output blocks must be >= 1");
  if (dsf_dim < 1 || dsf_dim > static_cast<int>(kMaxDsfDim)) fail("dsf_dim must lie in [1, 32]");
  if (flow_layers < 1) fail("need at least one flow layer");
}

TrainConfig TrainConfig::defaults_for(int d) {
  TrainConfig t;
  t.batch_size = d < 100 ? 64 : 256;
  return t;
}

}  // namespace fansmb
