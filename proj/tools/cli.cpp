#include "cli.hpp"

#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "fansmb/bounds.hpp"
#include "fansmb/ce_estimator.hpp"
#include "fansmb/dataset.hpp"
#include "fansmb/error.hpp"
#include "fansmb/fans_model.hpp"
#include "fansmb/gauss_entropy.hpp"
#include "fansmb/greedy_mb.hpp"
#include "fansmb/mb_io.hpp"
#include "fansmb/metrics.hpp"
#include "fansmb/oracle.hpp"
#include "fansmb/synth.hpp"
#include "fansmb/trainer.hpp"

namespace fansmb::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::string config;
  std::string out = "out";
  int workers = 0;
  bool verbose = false;
};

struct GenerateArgs {
  int d = 0;
  double degree = 1.0;
  std::string sem = "linear";
  std::string noise = "gaussian";
  int n = 1000;
};

struct TrainArgs {
  std::string data;
  std::string checkpoint;
  bool standardize = false;
  std::optional<int> epochs, batch_size, mask_group, max_subset, hidden_layers, blocks, dsf_dim, flow_layers;
  std::optional<double> lr;
  std::optional<bool> compact;
  bool early_stop = true;
};

struct DiscoverArgs {
  std::string data;
  std::string scorer = "gaussian";
  std::string checkpoint;
  std::string estimator = "logdet";
  std::string truth;
  bool standardize = false;
  bool dense = false;
  std::optional<double> eps_grow, eps_shrink;
  int patience = 15;
  int max_subset = 0;
  int samples = 1000;
  std::string symmetry = "union";
  bool bounds = false;
  double gamma = 1.0;
  double delta_e = 0.01;
  std::string eigen_mode = "exact";
};

struct EvaluateArgs {
  std::string mb;
  std::string truth;
};

struct OracleArgs {
  int d = 6;
  int trials = 50;
  double degree = 2.0;
  double eps_grow = 1e-6;
  double eps_shrink = 1e-6;
  int patience = 15;
};

struct MoralArgs {
  std::string mb;
};

struct BoundsArgs {
  std::string mb;
  std::string truth;
  std::string data;
  bool standardize = false;
  double gamma = 1.0;
  double delta_e = 0.01;
  std::optional<double> n;
  std::string eigen_mode = "exact";
};

class Log {
 public:
  Log(std::ostream& os, bool on) : os_(os), on_(on) {}
  template <class... T>
  void operator()(const T&... parts) const {
    if (!on_) return;
    (os_ << ... << parts);
    os_ << '\n';
  }

 private:
  std::ostream& os_;
  bool on_;
};

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  os << text;
  if (!os) throw IoError("write failed for '" + path.string() + "'");
}

json noise_json(const NoiseSpec& s) {
  return {{"family", to_string(s.family)}, {"loc", s.loc}, {"scale", s.scale}};
}

std::string sorted_list(const VarSet& s, const std::vector<std::string>& names) {
  std::string out;
  for (int v : s) out += (out.empty() ? "" : ",") + names.at(v);
  return out;
}

// --- generate ---------------------------------------------------------------

void cmd_generate(const Globals& g, const GenerateArgs& a, std::ostream& out, const Log& log) {
  if (a.d < 2) throw UsageError("--d must be >= 2");
  if (a.n < 1) throw UsageError("--n must be >= 1");
  if (!(a.degree > 0) || a.degree > a.d - 1)
    throw UsageError("--degree must lie in (0, d-1]");

  const Dag dag = sample_er_dag(a.d, a.degree, g.seed);
  std::vector<NoiseSpec> noise;
  if (a.noise == "mixed")
    noise = mixed_noise_specs(a.d, g.seed);
  else
    noise.assign(a.d, NoiseSpec::standard(parse_noise_family(a.noise)));

  Dataset data;
  Dag written = dag;
  if (a.sem == "linear") {
    if (a.noise == "mixed") throw UsageError("--noise mixed is only available with --sem gp");
    EdgeWeights w = sample_sem_weights(dag, g.seed);
    data = simulate_linear_sem(dag, w, a.n, noise.front(), g.seed);
    written = dag.with_weights(std::move(w));
  } else if (a.sem == "gp") {
    if (a.n < 2) throw UsageError("--sem gp needs --n >= 2");
    data = simulate_gp_sem(dag, a.n, noise, g.seed);
  } else {
    throw UsageError("unknown --sem '" + a.sem + "'");
  }

  const fs::path dir = g.out;
  write_dataset_csv(dir / "data.csv", data);
  write_dag_csv(dir / "dag.csv", written, data.names);

  json per_node = json::array();
  for (int v = 0; v < a.d; ++v) {
    json e = noise_json(noise[v]);
    e["variable"] = data.names[v];
    per_node.push_back(e);
  }
  json manifest = {{"command", "generate"}, {"d", a.d},        {"degree", a.degree},
                   {"sem", a.sem},          {"noise", a.noise}, {"n", a.n},
                   {"seed", g.seed},        {"edges", dag.edge_count()},
                   {"noise_per_node", per_node},
                   {"files", {{"data", "data.csv"}, {"dag", "dag.csv"}}}};
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  log("generated ", a.n, " x ", a.d, " ", a.sem, " dataset with ", dag.edge_count(), " edges");
  out << "wrote " << (dir / "data.csv").string() << ", " << (dir / "dag.csv").string() << ", "
      << (dir / "manifest.json").string() << '\n';
}

// --- train ------------------------------------------------------------------

Dataset load_data(const std::string& path, bool standardize_data) {
  Dataset ds = read_dataset_csv(path);
  return standardize_data ? standardize(ds) : ds;
}

fs::path train_manifest_path(const fs::path& checkpoint) { return checkpoint.string() + ".train.json"; }

void cmd_train(const Globals& g, const TrainArgs& a, std::ostream& out, std::ostream& err, const Log& log) {
  const Dataset ds = load_data(a.data, a.standardize);
  const int d = ds.dim();
  if (d < 2) throw UsageError("training needs at least 2 variables");

  FansConfig mc = FansConfig::defaults_for(d);
  if (a.max_subset) mc.max_subset = *a.max_subset;
  if (a.compact) mc.compact = *a.compact;
  if (a.hidden_layers) mc.hidden_layers = *a.hidden_layers;
  if (a.blocks) mc.blocks_per_hidden = *a.blocks;
  if (a.dsf_dim) mc.dsf_dim = *a.dsf_dim;
  if (a.flow_layers) mc.flow_layers = *a.flow_layers;
  mc.validate();

  TrainConfig tc = TrainConfig::defaults_for(d);
  if (a.epochs) tc.epochs = *a.epochs;
  if (a.batch_size) tc.batch_size = *a.batch_size;
  if (a.mask_group) tc.mask_group = *a.mask_group;
  if (a.lr) tc.learning_rate = *a.lr;
  tc.early_stop = a.early_stop;
  tc.seed = g.seed;

  FansModel model = FansModel::initialized(mc, g.seed);
  log("training FANS: d=", d, " M=", mc.max_subset, " compact=", mc.compact, " params=", model.parameter_count(),
      " epochs<=", tc.epochs, " batch=", tc.batch_size);
  TrainResult result;
  if (tc.epochs > 0) {
    result = train(model, ds, tc, [&](int epoch, double nll) {
      if ((epoch + 1) % 100 == 0) log("epoch ", epoch + 1, " nll ", nll);
    });
  }

  const fs::path dir = g.out;
  const fs::path ckpt = a.checkpoint.empty() ? dir / "model.fans" : fs::path(a.checkpoint);
  save_checkpoint(ckpt, model);

  std::ostringstream loss;
  loss << "epoch,nll\n";
  for (std::size_t i = 0; i < result.loss_trace.size(); ++i) {
    json v = result.loss_trace[i];
    loss << i + 1 << ',' << v.dump() << '\n';
  }
  write_text(dir / "loss.csv", loss.str());

  json manifest = {{"command", "train"},
                   {"data", a.data},
                   {"standardize", a.standardize},
                   {"seed", g.seed},
                   {"epochs", tc.epochs},
                   {"epochs_run", result.epochs_run},
                   {"early_stopped", result.early_stopped},
                   {"batch_size", tc.batch_size},
                   {"learning_rate", tc.learning_rate},
                   {"mask_group", tc.mask_group},
                   {"early_stop", tc.early_stop}};
  write_text(train_manifest_path(ckpt), manifest.dump(2) + "\n");
  (void)err;
  out << "wrote " << ckpt.string() << " after " << result.epochs_run << " epochs";
  if (!result.loss_trace.empty()) out << " (final mean NLL " << result.loss_trace.back() << ")";
  out << '\n';
}

// --- discover ---------------------------------------------------------------

SearchConfig search_config(const DiscoverArgs& a, std::uint64_t seed) {
  SearchConfig c = SearchConfig::defaults(a.dense);
  if (a.eps_grow) c.eps_grow = *a.eps_grow;
  if (a.eps_shrink) c.eps_shrink = *a.eps_shrink;
  c.patience = a.patience;
  c.max_subset = a.max_subset;
  c.samples = a.samples;
  c.symmetry = parse_symmetry_rule(a.symmetry);
  c.seed = seed;
  c.validate();
  return c;
}

std::vector<BoundReport> bound_reports(const Dataset& ds, const std::vector<VarSet>& reference,
                                       const std::map<int, VarSet>& grown, const BoundSettings& st) {
  const CovMatrix cov = sample_covariance(ds);
  std::vector<BoundReport> out;
  for (int t = 0; t < ds.dim(); ++t) {
    auto it = grown.find(t);
    if (it == grown.end()) throw UsageError("no grown set recorded for target '" + ds.names[t] + "'");
    out.push_back(build_bound_report(cov, t, reference[t], it->second, st));
  }
  return out;
}

std::vector<VarSet> truth_mbs(const std::string& truth_path, const std::vector<std::string>& names) {
  const NamedDag truth = read_dag_csv(truth_path);
  if (truth.dag.size() != static_cast<int>(names.size()))
    throw UsageError("truth DAG has " + std::to_string(truth.dag.size()) + " variables, dataset has " +
                     std::to_string(names.size()));
  // Join by name: the DAG file may list variables in another order.
  std::map<std::string, int> pos;
  for (int i = 0; i < truth.dag.size(); ++i) pos[truth.names[i]] = i;
  std::map<std::string, int> mine;
  for (int i = 0; i < static_cast<int>(names.size()); ++i) mine[names[i]] = i;
  std::vector<VarSet> out(names.size());
  for (int i = 0; i < static_cast<int>(names.size()); ++i) {
    auto it = pos.find(names[i]);
    if (it == pos.end()) throw UsageError("variable '" + names[i] + "' missing from the truth DAG");
    for (int v : markov_boundary_of(truth.dag, it->second)) {
      auto m = mine.find(truth.names[v]);
      if (m == mine.end()) throw UsageError("truth variable '" + truth.names[v] + "' missing from the dataset");
      out[i].insert(m->second);
    }
  }
  return out;
}

void cmd_discover(const Globals& g, const DiscoverArgs& a, std::ostream& out, const Log& log) {
  const SearchConfig cfg = search_config(a, g.seed);
  bool standardize_data = a.standardize;
  std::optional<FansModel> model;
  if (a.scorer == "fans") {
    if (a.checkpoint.empty()) throw UsageError("--scorer fans needs --checkpoint");
    model = load_checkpoint(a.checkpoint);
    const fs::path manifest = train_manifest_path(a.checkpoint);
    if (!standardize_data && fs::exists(manifest)) {
      const json m = json::parse(std::ifstream(manifest), nullptr, false);
      if (m.is_object() && m.value("standardize", false)) {
        standardize_data = true;
        log("standardizing the dataset as during training");
      }
    }
  } else if (a.scorer != "gaussian") {
    throw UsageError("unknown --scorer '" + a.scorer + "' (expected gaussian or fans)");
  }
  const Dataset ds = load_data(a.data, standardize_data);

  std::unique_ptr<Scorer> scorer;
  const EntropyForm form = parse_entropy_form(a.estimator);
  if (model) {
    if (model->dim() != ds.dim()) throw UsageError("checkpoint dimension does not match the dataset");
    scorer = std::make_unique<FansScorer>(*model, ds, cfg.samples, g.seed, form);
  } else {
    scorer = std::make_unique<GaussianScorer>(sample_covariance(ds));
  }
  log("discovering MBs for ", ds.dim(), " targets with the ", scorer->kind(), " scorer");
  const Discovery found = discover_all(*scorer, cfg, g.workers);

  json config = {{"eps_grow", cfg.eps_grow},
                 {"eps_shrink", cfg.eps_shrink},
                 {"patience", cfg.patience},
                 {"max_subset", cfg.max_subset},
                 {"symmetry", to_string(cfg.symmetry)},
                 {"standardize", standardize_data},
                 {"data", a.data}};
  MbFile file;
  file.mb = name_mb_map(found.mb, ds.names);
  file.metadata = {{"command", "discover"},
                   {"names", ds.names},
                   {"scorer", scorer->kind()},
                   {"seed", g.seed},
                   {"config", config},
                   {"traces", traces_json(found.per_target, ds.names)}};
  if (model) {
    file.metadata["config"]["samples"] = cfg.samples;
    file.metadata["config"]["checkpoint"] = a.checkpoint;
    file.metadata["estimator"] = to_string(form);
  }
  const fs::path dir = g.out;
  write_mb_json(dir / "mb.json", file);
  out << "wrote " << (dir / "mb.json").string() << '\n';

  if (a.bounds) {
    std::vector<VarSet> reference;
    if (!a.truth.empty()) {
      reference = truth_mbs(a.truth, ds.names);
    } else {
      for (const auto& r : found.per_target) reference.emplace_back(r.members.begin(), r.members.end());
    }
    std::map<int, VarSet> grown;
    for (const auto& r : found.per_target) grown[r.target] = VarSet(r.grown.begin(), r.grown.end());
    const BoundSettings st{static_cast<double>(ds.rows()), a.gamma, a.delta_e, parse_eigen_mode(a.eigen_mode)};
    const auto reports = bound_reports(ds, reference, grown, st);
    write_bounds_json(dir / "bounds.json", reports, ds.names);
    int pass = 0;
    for (const auto& r : reports) pass += verify_bounds(r).pass;
    out << "wrote " << (dir / "bounds.json").string() << " (" << pass << "/" << reports.size()
        << " targets satisfy every clause; reference MB: " << (a.truth.empty() ? "discovered" : "truth") << ")\n";
  }
}

// --- evaluate ---------------------------------------------------------------

void cmd_evaluate(const Globals& g, const EvaluateArgs& a, std::ostream& out) {
  const MbFile file = read_mb_json(a.mb);
  const NamedDag truth = read_dag_csv(a.truth);
  const MbMap mbs = resolve_mb_map(file.mb, truth.names);
  const MetricReport rep = evaluate_run(mbs, truth.dag);
  const fs::path dir = g.out;
  write_metrics_csv(dir / "metrics.csv", rep, truth.names);
  print_metrics_table(out, rep, truth.names);
  out << "wrote " << (dir / "metrics.csv").string() << '\n';
}

// --- oracle-check -----------------------------------------------------------

void cmd_oracle(const Globals& g, const OracleArgs& a, std::ostream& out) {
  if (a.d > kMaxOracleDim)
    throw UsageError("oracle-check enumerates all 2^(d-1) conditioning sets per target and is limited to d <= " +
                     std::to_string(kMaxOracleDim) + "; got --d " + std::to_string(a.d));
  OracleCheckConfig c = OracleCheckConfig::defaults();
  c.d = a.d;
  c.trials = a.trials;
  c.avg_degree = a.degree;
  c.seed = g.seed;
  c.search.eps_grow = a.eps_grow;
  c.search.eps_shrink = a.eps_shrink;
  c.search.patience = a.patience;
  const OracleCheckResult r = run_oracle_check(c, g.workers);
  char rate[32];
  std::snprintf(rate, sizeof rate, "%.1f%%", 100.0 * r.recovery_rate());
  out << "exact recovery: " << r.exact << "/" << r.instances << " (" << rate << ")\n";
  out << "enumeration oracle agrees with the true MB: " << r.brute_force_agrees << "/" << r.instances << '\n';
  for (const auto& m : r.mismatches) out << "  " << m << '\n';
  out << (r.exact == r.instances ? "PASS" : "FAIL") << '\n';
}

// --- moral ------------------------------------------------------------------

std::vector<std::string> names_of(const MbFile& file) {
  if (file.metadata.contains("names")) return file.metadata.at("names").get<std::vector<std::string>>();
  std::vector<std::string> names;
  for (const auto& [k, _] : file.mb) names.push_back(k);
  return names;
}

void cmd_moral(const Globals& g, const MoralArgs& a, std::ostream& out) {
  const MbFile file = read_mb_json(a.mb);
  const auto names = names_of(file);
  const MbMap mbs = resolve_mb_map(file.mb, names);
  std::map<int, VarSet> sets;
  for (const auto& [t, list] : mbs) sets[t] = VarSet(list.begin(), list.end());
  const MoralGraph moral = moral_from_mbs(sets, static_cast<int>(names.size()));
  const fs::path dir = g.out;
  write_moral_csv(dir / "moral.csv", moral);
  out << "wrote " << (dir / "moral.csv").string() << " (" << moral.edge_count() << " undirected edges)\n";
}

// --- bounds -----------------------------------------------------------------

void cmd_bounds(const Globals& g, const BoundsArgs& a, std::ostream& out) {
  const MbFile file = read_mb_json(a.mb);
  const Dataset ds = load_data(a.data, a.standardize);
  const auto grown = grown_sets_from_metadata(file.metadata, ds.names);
  const auto reference = truth_mbs(a.truth, ds.names);
  const BoundSettings st{a.n.value_or(static_cast<double>(ds.rows())), a.gamma, a.delta_e,
                         parse_eigen_mode(a.eigen_mode)};
  const auto reports = bound_reports(ds, reference, grown, st);
  const fs::path dir = g.out;
  write_bounds_json(dir / "bounds.json", reports, ds.names);
  int pass = 0;
  for (const auto& r : reports) {
    const BoundVerdict v = verify_bounds(r);
    pass += v.pass;
    if (!v.pass) {
      out << "  " << ds.names[r.target] << " (MB+ {" << sorted_list(grown.at(r.target), ds.names) << "}) fails:";
      for (const auto& c : v.failed) out << ' ' << c << ';';
      out << '\n';
    }
  }
  out << pass << "/" << reports.size() << " targets satisfy every clause\n";
  out << "wrote " << (dir / "bounds.json").string() << '\n';
}

// --- config expansion -------------------------------------------------------

std::string json_scalar(const json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number_float()) return v.dump();
  throw UsageError("config key '" + key + "' must be a string, number or boolean");
}

// Expands `--config file.json` into command-line tokens. Keys are flag names
// without the leading dashes. File values are inserted in front of the user's
// own tokens so that explicit flags win (options keep their last value).
std::vector<std::string> expand_config(const std::vector<std::string>& args, CLI::App& app) {
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;

  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw IoError("cannot parse config file '" + path + "': " + e.what());
  }
  if (!doc.is_object()) throw UsageError("config file must hold a JSON object");

  std::size_t sub_pos = 0;
  CLI::App* sub = nullptr;
  for (std::size_t i = 1; i < args.size() && !sub; ++i) {
    for (auto* s : app.get_subcommands({})) {
      if (s->get_name() == args[i]) {
        sub = s;
        sub_pos = i;
      }
    }
  }

  std::vector<std::string> global_tokens, sub_tokens;
  for (const auto& [key, value] : doc.items()) {
    if (key == "config") continue;
    const std::string flag = "--" + key;
    CLI::Option* opt = sub ? sub->get_option_no_throw(flag) : nullptr;
    std::vector<std::string>* dst = &sub_tokens;
    if (!opt) {
      opt = app.get_option_no_throw(flag);
      dst = &global_tokens;
    }
    if (!opt) {
      bool known = false;
      for (auto* s : app.get_subcommands({})) known = known || s->get_option_no_throw(flag) != nullptr;
      if (!known) throw UsageError("unknown config key '" + key + "'");
      continue;  // belongs to another command
    }
    if (value.is_boolean()) {
      if (opt->get_type_size_max() != 0) {
        dst->push_back(flag);
        dst->push_back(value.get<bool>() ? "true" : "false");
      } else if (value.get<bool>()) {
        dst->push_back(flag);
      }
      continue;
    }
    dst->push_back(flag);
    dst->push_back(json_scalar(value, key));
  }

  std::vector<std::string> out{args.front()};
  out.insert(out.end(), global_tokens.begin(), global_tokens.end());
  if (!sub) {
    out.insert(out.end(), args.begin() + 1, args.end());
    return out;
  }
  out.insert(out.end(), args.begin() + 1, args.begin() + static_cast<std::ptrdiff_t>(sub_pos) + 1);
  out.insert(out.end(), sub_tokens.begin(), sub_tokens.end());
  out.insert(out.end(), args.begin() + static_cast<std::ptrdiff_t>(sub_pos) + 1, args.end());
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Markov boundary discovery with any-subset masked autoregressive flows", "fansmb"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);

  Globals g;
  app.add_option("--seed", g.seed, "Run seed; every random stream derives from it");
  app.add_option("--config", g.config, "JSON file of flag values (keys are flag names without dashes)");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--workers", g.workers, "Worker threads for discovery (0 = all)")->check(CLI::NonNegativeNumber);
  app.add_flag("--verbose,-v", g.verbose, "Progress messages on stderr");

  GenerateArgs gen;
  auto* c_gen = app.add_subcommand("generate", "Sample an ER DAG and a synthetic SEM dataset");
  c_gen->add_option("--d", gen.d, "Number of variables")->required();
  c_gen->add_option("--degree", gen.degree, "Expected average degree")->capture_default_str();
  c_gen->add_option("--sem", gen.sem, "linear or gp")->check(CLI::IsMember({"linear", "gp"}))->capture_default_str();
  c_gen->add_option("--noise", gen.noise, "gaussian, uniform, laplace, gumbel, exponential or mixed")
      ->check(CLI::IsMember({"gaussian", "uniform", "laplace", "gumbel", "exponential", "mixed"}))
      ->capture_default_str();
  c_gen->add_option("--n", gen.n, "Number of samples")->capture_default_str();

  TrainArgs tr;
  auto* c_train = app.add_subcommand("train", "Train a FANS model on a dataset");
  c_train->add_option("--data", tr.data, "Dataset CSV")->required();
  c_train->add_option("--checkpoint", tr.checkpoint, "Checkpoint path (default <out>/model.fans)");
  c_train->add_flag("--standardize", tr.standardize, "Standardize columns before training");
  c_train->add_option("--epochs", tr.epochs, "Maximum epochs (default 5000)");
  c_train->add_option("--batch-size", tr.batch_size, "Mini-batch size (64, or 256 from d=100)");
  c_train->add_option("--lr", tr.lr, "Adam step size (default 1e-3)");
  c_train->add_option("--mask-group", tr.mask_group, "Samples sharing one sampled subset mask (default 8)");
  c_train->add_flag("--early-stop,!--no-early-stop", tr.early_stop, "Stop when the 200-epoch mean NLL stalls");
  c_train->add_option("--max-subset", tr.max_subset, "Largest subset size M");
  c_train->add_option("--compact", tr.compact, "Compact masking (true/false; default from d)");
  c_train->add_option("--hidden-layers", tr.hidden_layers, "Hidden layers (default 1)");
  c_train->add_option("--blocks", tr.blocks, "Blocks per hidden layer (default 6)");
  c_train->add_option("--dsf-dim", tr.dsf_dim, "DSF components (default 4)");
  c_train->add_option("--flow-layers", tr.flow_layers, "Stacked flow layers (default 1)");

  DiscoverArgs di;
  auto* c_disc = app.add_subcommand("discover", "Grow/shrink Markov boundary search for every variable");
  c_disc->add_option("--data", di.data, "Dataset CSV")->required();
  c_disc->add_option("--scorer", di.scorer, "gaussian or fans")->check(CLI::IsMember({"gaussian", "fans"}))->capture_default_str();
  c_disc->add_option("--checkpoint", di.checkpoint, "FANS checkpoint (fans scorer)");
  c_disc->add_option("--estimator", di.estimator, "fans entropy estimator: logdet or likelihood")
      ->check(CLI::IsMember({"logdet", "likelihood"}))->capture_default_str();
  c_disc->add_flag("--standardize", di.standardize, "Standardize columns first");
  c_disc->add_flag("--dense", di.dense, "Dense-graph thresholds (0.001 / 0.001)");
  c_disc->add_option("--eps-grow", di.eps_grow, "Growing threshold (default 0.005)");
  c_disc->add_option("--eps-shrink", di.eps_shrink, "Shrinking threshold (default 0.002)");
  c_disc->add_option("--patience", di.patience, "Patience rho")->capture_default_str();
  c_disc->add_option("--max-subset", di.max_subset, "Subset cap M (0 = scorer limit)")->capture_default_str();
  c_disc->add_option("--samples", di.samples, "Monte-Carlo samples K (fans)")->capture_default_str();
  c_disc->add_option("--symmetry", di.symmetry, "union, intersection or none")
      ->check(CLI::IsMember({"union", "intersection", "none"}))->capture_default_str();
  c_disc->add_flag("--bounds", di.bounds, "Also write the error-bound report");
  c_disc->add_option("--truth", di.truth, "Truth DAG used as the reference MB in the bound report");
  c_disc->add_option("--gamma", di.gamma, "Noise constant gamma")->capture_default_str();
  c_disc->add_option("--delta-e", di.delta_e, "Precision delta_e")->capture_default_str();
  c_disc->add_option("--eigen-mode", di.eigen_mode, "exact or interlacing")
      ->check(CLI::IsMember({"exact", "interlacing"}))->capture_default_str();

  EvaluateArgs ev;
  auto* c_eval = app.add_subcommand("evaluate", "nDCG, AveP and F1 against a truth DAG");
  c_eval->add_option("--mb", ev.mb, "MB JSON")->required();
  c_eval->add_option("--truth", ev.truth, "Truth DAG CSV")->required();

  OracleArgs oc;
  auto* c_oracle = app.add_subcommand("oracle-check", "Exact-covariance recovery check against subset enumeration");
  c_oracle->add_option("--d", oc.d, "Variables per SEM (at most 8)")->capture_default_str();
  c_oracle->add_option("--trials", oc.trials, "Random SEMs")->capture_default_str();
  c_oracle->add_option("--degree", oc.degree, "Expected average degree")->capture_default_str();
  c_oracle->add_option("--eps-grow", oc.eps_grow, "Growing threshold")->capture_default_str();
  c_oracle->add_option("--eps-shrink", oc.eps_shrink, "Shrinking threshold")->capture_default_str();
  c_oracle->add_option("--patience", oc.patience, "Patience rho")->capture_default_str();

  MoralArgs mo;
  auto* c_moral = app.add_subcommand("moral", "Moral-graph mask from an MB file");
  c_moral->add_option("--mb", mo.mb, "MB JSON")->required();

  BoundsArgs bo;
  auto* c_bounds = app.add_subcommand("bounds", "Error-bound report for a finished discovery run");
  c_bounds->add_option("--mb", bo.mb, "MB JSON written by discover")->required();
  c_bounds->add_option("--truth", bo.truth, "Truth DAG CSV")->required();
  c_bounds->add_option("--data", bo.data, "Dataset CSV")->required();
  c_bounds->add_flag("--standardize", bo.standardize, "Standardize columns first");
  c_bounds->add_option("--gamma", bo.gamma, "Noise constant gamma")->capture_default_str();
  c_bounds->add_option("--delta-e", bo.delta_e, "Precision delta_e")->capture_default_str();
  c_bounds->add_option("--n", bo.n, "Sample count N (default: dataset rows)");
  c_bounds->add_option("--eigen-mode", bo.eigen_mode, "exact or interlacing")
      ->check(CLI::IsMember({"exact", "interlacing"}))->capture_default_str();

  for (auto* s : app.get_subcommands({})) s->fallthrough();

  try {
    const std::vector<std::string> expanded = expand_config(args, app);
    std::vector<const char*> argv;
    for (const auto& a : expanded) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }

  const Log log(err, g.verbose);
  try {
    if (*c_gen) cmd_generate(g, gen, out, log);
    else if (*c_train) cmd_train(g, tr, out, err, log);
    else if (*c_disc) cmd_discover(g, di, out, log);
    else if (*c_eval) cmd_evaluate(g, ev, out);
    else if (*c_oracle) cmd_oracle(g, oc, out);
    else if (*c_moral) cmd_moral(g, mo, out);
    else if (*c_bounds) cmd_bounds(g, bo, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return 3;
  } catch (const json::exception& e) {
    err << "I/O error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace fansmb::cli
