#include "fansmb/fans_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>
#include <json.hpp>

#include "fansmb/dsf.hpp"
#include "fansmb/error.hpp"
#include "text_util.hpp"

namespace fansmb {

namespace {

constexpr char kMagic[] = "FANSv1";
constexpr std::size_t kMagicLen = 6;

}  // namespace

FansModel::FansModel(FansConfig config) : config_(config) {
  config_.validate();
  std::size_t offset = 0;
  for (int f = 0; f < config_.flow_layers; ++f) {
    for (int l = 0; l <= config_.hidden_layers; ++l) {
      Slot s;
      s.weight = offset;
      offset += static_cast<std::size_t>(fan_out(l)) * fan_in(l);
      s.bias = offset;
      offset += static_cast<std::size_t>(fan_out(l));
      slots_.push_back(s);
    }
  }
  params_.assign(offset, 0.0);
}

int FansModel::fan_in(int layer) const {
  return layer == 0 ? config_.d : config_.hidden_width();
}

int FansModel::fan_out(int layer) const {
  return layer == config_.hidden_layers ? config_.output_width() : config_.hidden_width();
}

const FansModel::Slot& FansModel::slot(int flow, int layer) const {
  if (flow < 0 || flow >= config_.flow_layers || layer < 0 || layer > config_.hidden_layers)
    throw UsageError("parameter slot out of range");
  return slots_[static_cast<std::size_t>(flow) * (config_.hidden_layers + 1) + layer];
}

Eigen::Map<const Eigen::MatrixXd> FansModel::weight(int flow, int layer) const {
  return {params_.data() + slot(flow, layer).weight, fan_out(layer), fan_in(layer)};
}

Eigen::Map<const Eigen::VectorXd> FansModel::bias(int flow, int layer) const {
  return {params_.data() + slot(flow, layer).bias, fan_out(layer)};
}

std::vector<int> FansModel::layout_key() const {
  return {config_.d, config_.max_subset, config_.hidden_layers, config_.blocks_per_hidden,
          config_.hidden_block_size, config_.output_blocks, config_.compact ? 1 : 0,
          config_.dsf_dim, config_.flow_layers};
}

FansModel FansModel::initialized(FansConfig config, std::uint64_t seed) {
  FansModel m(config);
  Rng rng = make_rng(seed, "init");
  const int k = config.dsf_dim;
  const double a_init = softplus_inverse(1.0);
  for (int f = 0; f < config.flow_layers; ++f) {
    for (int l = 0; l <= config.hidden_layers; ++l) {
      const bool head = l == config.hidden_layers;
      const double limit = std::sqrt(3.0 / m.fan_in(l)) * (head ? 0.01 : 1.0);
      std::uniform_real_distribution<double> u(-limit, limit);
      const std::size_t nw = static_cast<std::size_t>(m.fan_out(l)) * m.fan_in(l);
      double* w = m.params_.data() + m.slot(f, l).weight;
      for (std::size_t i = 0; i < nw; ++i) w[i] = u(rng);
      double* b = m.params_.data() + m.slot(f, l).bias;
      if (!head) continue;
      std::uniform_real_distribution<double> small(-0.01, 0.01);
      for (int v = 0; v < config.d; ++v) {
        double* hb = b + static_cast<std::size_t>(v) * 3 * k;
        for (int j = 0; j < k; ++j) {
          hb[j] = small(rng);
          hb[k + j] = a_init;
          hb[2 * k + j] = 0.0;
        }
      }
    }
  }
  return m;
}

namespace {

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64(const std::string& in, std::size_t& pos) {
  if (pos + 8 > in.size()) throw IoError("truncated checkpoint");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  pos += 8;
  return v;
}

nlohmann::json config_json(const FansConfig& c) {
  return {{"format", "FANSv1"},
          {"d", c.d},
          {"max_subset", c.max_subset},
          {"hidden_layers", c.hidden_layers},
          {"blocks_per_hidden", c.blocks_per_hidden},
          {"hidden_block_size", c.hidden_block_size},
          {"output_blocks", c.output_blocks},
          {"compact", c.compact},
          {"dsf_dim", c.dsf_dim},
          {"flow_layers", c.flow_layers}};
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const FansModel& model) {
  const FansConfig& c = model.config();
  const std::vector<std::int64_t> fields = {c.d, c.max_subset, c.hidden_layers, c.blocks_per_hidden,
                                            c.hidden_block_size, c.output_blocks, c.compact ? 1 : 0,
                                            c.dsf_dim, c.flow_layers};
  std::string out(kMagic, kMagicLen);
  const std::uint32_t count = static_cast<std::uint32_t>(fields.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((count >> (8 * i)) & 0xff));
  for (auto f : fields) put_u64(out, static_cast<std::uint64_t>(f));
  put_u64(out, model.parameter_count());
  for (double p : model.parameters()) put_u64(out, std::bit_cast<std::uint64_t>(p));
  detail::write_file(path, out);
  detail::write_file(std::filesystem::path(path.string() + ".json"), config_json(c).dump(2) + "\n");
}

FansModel load_checkpoint(const std::filesystem::path& path) {
  const std::string in = detail::read_file(path);
  if (in.size() < kMagicLen + 4 || in.compare(0, kMagicLen, kMagic) != 0)
    throw IoError(path.string() + " is not a FANSv1 checkpoint");
  std::size_t pos = kMagicLen;
  std::uint32_t count = 0;
  for (int i = 0; i < 4; ++i) count |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  pos += 4;
  if (count != 9) throw IoError("unexpected config field count in " + path.string());
  std::vector<std::int64_t> f;
  for (std::uint32_t i = 0; i < count; ++i) f.push_back(static_cast<std::int64_t>(get_u64(in, pos)));
  FansConfig c;
  c.d = static_cast<int>(f[0]);
  c.max_subset = static_cast<int>(f[1]);
  c.hidden_layers = static_cast<int>(f[2]);
  c.blocks_per_hidden = static_cast<int>(f[3]);
  c.hidden_block_size = static_cast<int>(f[4]);
  c.output_blocks = static_cast<int>(f[5]);
  c.compact = f[6] != 0;
  c.dsf_dim = static_cast<int>(f[7]);
  c.flow_layers = static_cast<int>(f[8]);
  FansModel model = [&] {
    try {
      return FansModel(c);
    } catch (const UsageError& e) {
      throw IoError(path.string() + ": " + e.what());
    }
  }();
  const std::uint64_t n = get_u64(in, pos);
  if (n != model.parameter_count()) throw IoError("parameter count mismatch in " + path.string());
  auto params = model.parameters();
  for (std::uint64_t i = 0; i < n; ++i) params[i] = std::bit_cast<double>(get_u64(in, pos));
  if (pos != in.size()) throw IoError("trailing bytes in " + path.string());
  return model;
}

std::vector<unsigned char> sample_leaf_mask(int d, int max_subset, Rng& rng) {
  if (max_subset < 1 || max_subset > d) throw UsageError("leaf mask needs 1 <= M <= d");
  const int size = std::uniform_int_distribution<int>(1, max_subset)(rng);
  std::vector<int> idx(d);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < size; ++i) {
    int j = std::uniform_int_distribution<int>(i, d - 1)(rng);
    std::swap(idx[i], idx[j]);
  }
  std::vector<unsigned char> mask(d, 0);
  for (int i = 0; i < size; ++i) mask[idx[i]] = 1;
  return mask;
}

std::vector<unsigned char> sample_leaf_mask(int d, int max_subset, std::uint64_t seed) {
  Rng rng = make_rng(seed, "masksample");
  return sample_leaf_mask(d, max_subset, rng);
}

VarSet mask_to_set(const std::vector<unsigned char>& mask) {
  VarSet s;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) s.insert(static_cast<int>(i));
  return s;
}

}  // namespace fansmb
