#include "fansmb/mb_io.hpp"

#include <algorithm>

#include "fansmb/error.hpp"
#include "text_util.hpp"

namespace fansmb {

using nlohmann::json;

namespace {

std::map<std::string, int> index_names(const std::vector<std::string>& names) {
  std::map<std::string, int> idx;
  for (int i = 0; i < static_cast<int>(names.size()); ++i) idx[names[i]] = i;
  return idx;
}

int lookup(const std::map<std::string, int>& idx, const std::string& name) {
  auto it = idx.find(name);
  if (it == idx.end()) throw UsageError("unknown variable '" + name + "'");
  return it->second;
}

json trace_json(const std::vector<TraceStep>& trace, const std::vector<std::string>& names) {
  json arr = json::array();
  for (const auto& s : trace) arr.push_back({{"variable", names.at(s.variable)}, {"entropy", s.entropy}});
  return arr;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

NamedMbMap name_mb_map(const MbMap& mbs, const std::vector<std::string>& names) {
  NamedMbMap out;
  for (const auto& [t, list] : mbs) {
    auto& dst = out[names.at(t)];
    for (int v : list) dst.push_back(names.at(v));
  }
  return out;
}

MbMap resolve_mb_map(const NamedMbMap& mbs, const std::vector<std::string>& names) {
  const auto idx = index_names(names);
  MbMap out;
  for (const auto& [t, list] : mbs) {
    const int ti = lookup(idx, t);
    auto& dst = out[ti];
    for (const auto& v : list) {
      const int vi = lookup(idx, v);
      if (vi == ti) throw UsageError("Markov boundary of '" + t + "' contains the target itself");
      if (std::find(dst.begin(), dst.end(), vi) != dst.end())
        throw UsageError("Markov boundary of '" + t + "' lists '" + v + "' twice");
      dst.push_back(vi);
    }
  }
  for (int i = 0; i < static_cast<int>(names.size()); ++i)
    if (!out.contains(i)) throw UsageError("no Markov boundary given for target '" + names[i] + "'");
  return out;
}

json traces_json(const std::vector<MbResult>& results, const std::vector<std::string>& names) {
  json out = json::object();
  for (const auto& r : results) {
    json grown = json::array();
    for (int v : r.grown) grown.push_back(names.at(v));
    out[names.at(r.target)] = {{"initial_entropy", r.initial_entropy},
                               {"grown", grown},
                               {"grow_trace", trace_json(r.grow_trace, names)},
                               {"shrink_trace", trace_json(r.shrink_trace, names)}};
  }
  return out;
}

std::map<int, VarSet> grown_sets_from_metadata(const json& metadata, const std::vector<std::string>& names) {
  if (!metadata.contains("traces")) throw UsageError("MB file has no per-target traces in its metadata");
  const auto idx = index_names(names);
  std::map<int, VarSet> out;
  try {
    for (const auto& [t, entry] : metadata.at("traces").items()) {
      VarSet& s = out[lookup(idx, t)];
      for (const auto& v : entry.at("grown")) s.insert(lookup(idx, v.get<std::string>()));
    }
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed traces in MB metadata: ") + e.what());
  }
  return out;
}

void write_mb_json(const std::filesystem::path& path, const MbFile& file) {
  json doc = {{"mb", file.mb}, {"metadata", file.metadata}};
  detail::write_file(path, doc.dump(2) + "\n");
}

MbFile read_mb_json(const std::filesystem::path& path) {
  const std::string text = detail::read_file(path);
  MbFile f;
  try {
    const json doc = json::parse(text);
    f.mb = doc.at("mb").get<NamedMbMap>();
    if (doc.contains("metadata")) f.metadata = doc.at("metadata");
  } catch (const json::exception& e) {
    throw IoError("cannot parse MB file '" + path.string() + "': " + e.what());
  }
  return f;
}

json bound_report_json(const BoundReport& r, const BoundVerdict& v, const std::vector<std::string>& names) {
  return {{"target", names.at(r.target)},
          {"k", r.k},
          {"k_prime", r.k_prime},
          {"N", r.n},
          {"gamma", r.gamma},
          {"delta_e", r.delta_e},
          {"delta_N", r.delta_n},
          {"gap", r.gap},
          {"A", optional_json(r.a)},
          {"A_prime", optional_json(r.a_prime)},
          {"ratio", optional_json(r.ratio)},
          {"lambda_min", optional_json(r.lambda_min)},
          {"ratio_bound", optional_json(r.ratio_bound)},
          {"pass", v.pass},
          {"failed", v.failed}};
}

void write_bounds_json(const std::filesystem::path& path, const std::vector<BoundReport>& reports,
                       const std::vector<std::string>& names) {
  json arr = json::array();
  for (const auto& r : reports) arr.push_back(bound_report_json(r, verify_bounds(r), names));
  detail::write_file(path, arr.dump(2) + "\n");
}

}  // namespace fansmb
