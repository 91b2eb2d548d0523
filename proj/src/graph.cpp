#include "fansmb/graph.hpp"

#include <algorithm>
#include <queue>
#include <sstream>

#include "fansmb/error.hpp"
#include "text_util.hpp"

namespace fansmb {

Dag::Dag(int d, const std::vector<Edge>& edges, std::optional<EdgeWeights> weights)
    : d_(d), weights_(std::move(weights)), parents_(d > 0 ? d : 0), children_(d > 0 ? d : 0) {
  if (d < 1) throw UsageError("a DAG needs at least one variable");
  for (const Edge& e : edges) {
    if (e.parent < 0 || e.parent >= d || e.child < 0 || e.child >= d)
      throw UsageError("edge " + std::to_string(e.parent) + "->" + std::to_string(e.child) +
                       " out of range for d=" + std::to_string(d));
    if (e.parent == e.child) throw UsageError("self-loop on variable " + std::to_string(e.parent));
    if (!edges_.insert(e).second)
      throw UsageError("duplicate edge " + std::to_string(e.parent) + "->" + std::to_string(e.child));
    parents_[e.child].push_back(e.parent);
    children_[e.parent].push_back(e.child);
  }
  for (auto& p : parents_) std::sort(p.begin(), p.end());
  for (auto& c : children_) std::sort(c.begin(), c.end());

  if (weights_) {
    for (const auto& [e, w] : *weights_)
      if (!edges_.contains(e))
        throw UsageError("weight given for missing edge " + std::to_string(e.parent) + "->" +
                         std::to_string(e.child));
  }

  // Kahn's algorithm; lowest index first keeps the order canonical.
  std::vector<int> indegree(d, 0);
  for (const Edge& e : edges_) ++indegree[e.child];
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int v = 0; v < d; ++v)
    if (indegree[v] == 0) ready.push(v);
  while (!ready.empty()) {
    int v = ready.top();
    ready.pop();
    topo_.push_back(v);
    for (int c : children_[v])
      if (--indegree[c] == 0) ready.push(c);
  }
  if (static_cast<int>(topo_.size()) != d) throw UsageError("graph contains a directed cycle");
}

const EdgeWeights& Dag::weights() const {
  if (!weights_) throw UsageError("DAG has no edge weights");
  return *weights_;
}

Dag Dag::with_weights(EdgeWeights weights) const {
  return Dag(d_, std::vector<Edge>(edges_.begin(), edges_.end()), std::move(weights));
}

VarSet markov_boundary_of(const Dag& dag, int target) {
  if (target < 0 || target >= dag.size())
    throw UsageError("target " + std::to_string(target) + " out of range");
  VarSet mb(dag.parents(target).begin(), dag.parents(target).end());
  for (int c : dag.children(target)) {
    mb.insert(c);
    for (int spouse : dag.parents(c)) mb.insert(spouse);
  }
  mb.erase(target);
  return mb;
}

void MoralGraph::connect(int i, int j) {
  if (i < 0 || j < 0 || i >= d_ || j >= d_) throw UsageError("moral graph index out of range");
  if (i == j) return;
  adj_[index(i, j)] = 1;
  adj_[index(j, i)] = 1;
}

std::size_t MoralGraph::edge_count() const {
  std::size_t n = 0;
  for (int i = 0; i < d_; ++i)
    for (int j = i + 1; j < d_; ++j) n += adjacent(i, j) ? 1 : 0;
  return n;
}

MoralGraph moralize(const Dag& dag) {
  MoralGraph g(dag.size());
  for (int i = 0; i < dag.size(); ++i)
    for (int j : markov_boundary_of(dag, i)) g.connect(i, j);
  return g;
}

MoralGraph moral_from_mbs(const std::map<int, VarSet>& mb_map, int d) {
  MoralGraph g(d);
  for (const auto& [i, mb] : mb_map) {
    if (i < 0 || i >= d) throw UsageError("target " + std::to_string(i) + " out of range");
    for (int j : mb) {
      if (j < 0 || j >= d) throw UsageError("MB member " + std::to_string(j) + " out of range");
      g.connect(i, j);
    }
  }
  return g;
}

std::vector<std::string> default_names(int d) {
  std::vector<std::string> names;
  names.reserve(d);
  for (int i = 0; i < d; ++i) names.push_back("X" + std::to_string(i));
  return names;
}

void write_dag_csv(const std::filesystem::path& path, const Dag& dag,
                   const std::vector<std::string>& names) {
  std::ostringstream out;
  out << "# d=" << dag.size() << "\n";
  if (!names.empty()) {
    if (static_cast<int>(names.size()) != dag.size())
      throw UsageError("name count does not match DAG size");
    out << "# names=";
    for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
    out << "\n";
  }
  out << (dag.has_weights() ? "parent,child,weight\n" : "parent,child\n");
  for (const Edge& e : dag.edges()) {
    out << e.parent << "," << e.child;
    if (dag.has_weights()) out << "," << detail::format_double(dag.weights().at(e));
    out << "\n";
  }
  detail::write_file(path, out.str());
}

namespace {

NamedDag parse_dense(const std::vector<std::string>& rows, std::vector<std::string> names) {
  const int d = static_cast<int>(rows.size());
  std::vector<Edge> edges;
  for (int i = 0; i < d; ++i) {
    auto cells = detail::split(rows[i]);
    if (static_cast<int>(cells.size()) != d) throw IoError("dense DAG matrix is not square");
    for (int j = 0; j < d; ++j) {
      double v = detail::parse_double(cells[j]);
      if (v != 0.0 && v != 1.0) throw IoError("dense DAG matrix must be 0/1");
      if (v == 1.0) edges.push_back({i, j});
    }
  }
  if (names.empty()) names = default_names(d);
  return {Dag(d, edges), std::move(names)};
}

}  // namespace

NamedDag read_dag_csv(const std::filesystem::path& path) {
  auto lines = detail::read_lines(path);
  int d = -1;
  std::vector<std::string> names;
  std::vector<std::string> body;
  for (const auto& raw : lines) {
    auto line = detail::trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      auto rest = detail::trim(line.substr(1));
      if (rest.starts_with("d=")) {
        d = static_cast<int>(detail::parse_int(rest.substr(2)));
      } else if (rest.starts_with("names=")) {
        for (auto n : detail::split(rest.substr(6))) names.emplace_back(n);
      }
      continue;
    }
    body.emplace_back(line);
  }

  if (body.empty() || !body.front().starts_with("parent")) return parse_dense(body, names);

  auto header = detail::split(body.front());
  if (header.size() < 2 || header[1] != "child") throw IoError("bad DAG header in " + path.string());
  const bool weighted = header.size() >= 3 && header[2] == "weight";
  std::vector<Edge> edges;
  EdgeWeights weights;
  int max_index = -1;
  for (std::size_t r = 1; r < body.size(); ++r) {
    auto cells = detail::split(body[r]);
    if (cells.size() < 2) throw IoError("short DAG row in " + path.string());
    Edge e{static_cast<int>(detail::parse_int(cells[0])), static_cast<int>(detail::parse_int(cells[1]))};
    edges.push_back(e);
    max_index = std::max({max_index, e.parent, e.child});
    if (weighted) {
      if (cells.size() < 3) throw IoError("missing weight in " + path.string());
      weights[e] = detail::parse_double(cells[2]);
    }
  }
  if (d < 0) d = names.empty() ? max_index + 1 : static_cast<int>(names.size());
  if (names.empty()) names = default_names(d);
  if (static_cast<int>(names.size()) != d) throw IoError("names line does not match d in " + path.string());
  try {
    return {Dag(d, edges, weighted ? std::optional<EdgeWeights>(weights) : std::nullopt), names};
  } catch (const UsageError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_moral_csv(const std::filesystem::path& path, const MoralGraph& graph) {
  std::ostringstream out;
  for (int i = 0; i < graph.size(); ++i) {
    for (int j = 0; j < graph.size(); ++j) out << (j ? "," : "") << (graph.adjacent(i, j) ? 1 : 0);
    out << "\n";
  }
  detail::write_file(path, out.str());
}

MoralGraph read_moral_csv(const std::filesystem::path& path) {
  std::vector<std::string> rows;
  for (const auto& l : detail::read_lines(path))
    if (!detail::trim(l).empty()) rows.push_back(l);
  MoralGraph g(static_cast<int>(rows.size()));
  for (int i = 0; i < g.size(); ++i) {
    auto cells = detail::split(rows[i]);
    if (static_cast<int>(cells.size()) != g.size()) throw IoError("moral mask is not square");
    for (int j = 0; j < g.size(); ++j)
      if (detail::parse_int(cells[j]) != 0) g.connect(i, j);
  }
  return g;
}

}  // namespace fansmb
