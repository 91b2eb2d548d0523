#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "fansmb/bounds.hpp"
#include "fansmb/greedy_mb.hpp"

namespace fansmb {

using NamedMbMap = std::map<std::string, std::vector<std::string>>;

// {"mb": {name: [names in rank order]}, "metadata": {...}}
struct MbFile {
  NamedMbMap mb;
  nlohmann::json metadata = nlohmann::json::object();
};

NamedMbMap name_mb_map(const MbMap& mbs, const std::vector<std::string>& names);

// Joins by name. Every variable in `names` must have an entry and every
// referenced name must be known.
MbMap resolve_mb_map(const NamedMbMap& mbs, const std::vector<std::string>& names);

// Per-target search details for the metadata block.
nlohmann::json traces_json(const std::vector<MbResult>& results, const std::vector<std::string>& names);

// Grown sets (MB+) recovered from the metadata written by traces_json.
std::map<int, VarSet> grown_sets_from_metadata(const nlohmann::json& metadata,
                                               const std::vector<std::string>& names);

void write_mb_json(const std::filesystem::path& path, const MbFile& file);
MbFile read_mb_json(const std::filesystem::path& path);

nlohmann::json bound_report_json(const BoundReport& report, const BoundVerdict& verdict,
                                 const std::vector<std::string>& names);
void write_bounds_json(const std::filesystem::path& path, const std::vector<BoundReport>& reports,
                       const std::vector<std::string>& names);

}  // namespace fansmb
