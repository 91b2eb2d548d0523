#include "fansmb/dataset.hpp"

#include <cmath>
#include <sstream>

#include "fansmb/error.hpp"
#include "fansmb/graph.hpp"
#include "text_util.hpp"

namespace fansmb {

int Dataset::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  throw UsageError("unknown variable '" + name + "'");
}

Dataset make_dataset(Eigen::MatrixXd data, std::vector<std::string> names) {
  if (data.rows() < 1) throw UsageError("dataset needs at least one sample");
  if (names.empty()) names = default_names(static_cast<int>(data.cols()));
  if (static_cast<Eigen::Index>(names.size()) != data.cols())
    throw UsageError("name count does not match column count");
  if (!data.allFinite()) throw NumericalError("dataset contains non-finite entries");
  Dataset ds;
  ds.names = std::move(names);
  ds.data = std::move(data);
  return ds;
}

Dataset standardize(const Dataset& ds) {
  const auto n = ds.data.rows();
  Dataset out = ds;
  out.means = ds.data.colwise().mean().transpose();
  out.stds.resize(ds.data.cols());
  for (Eigen::Index j = 0; j < ds.data.cols(); ++j) {
    auto centered = ds.data.col(j).array() - out.means(j);
    double var = n > 1 ? centered.square().sum() / static_cast<double>(n - 1) : 0.0;
    double sd = std::sqrt(var);
    if (!(sd > 0.0)) sd = 1.0;
    out.stds(j) = sd;
    out.data.col(j) = centered / sd;
  }
  out.standardized = true;
  return out;
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& ds) {
  std::ostringstream out;
  for (std::size_t i = 0; i < ds.names.size(); ++i) out << (i ? "," : "") << ds.names[i];
  out << "\n";
  for (Eigen::Index r = 0; r < ds.data.rows(); ++r) {
    for (Eigen::Index c = 0; c < ds.data.cols(); ++c)
      out << (c ? "," : "") << detail::format_double(ds.data(r, c));
    out << "\n";
  }
  detail::write_file(path, out.str());
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  auto lines = detail::read_lines(path);
  std::size_t first = 0;
  while (first < lines.size() && detail::trim(lines[first]).empty()) ++first;
  if (first == lines.size()) throw IoError("empty dataset file " + path.string());
  std::vector<std::string> names;
  for (auto n : detail::split(lines[first])) names.emplace_back(n);

  std::vector<std::vector<double>> rows;
  for (std::size_t l = first + 1; l < lines.size(); ++l) {
    if (detail::trim(lines[l]).empty()) continue;
    auto cells = detail::split(lines[l]);
    if (cells.size() != names.size())
      throw IoError(path.string() + ": row " + std::to_string(l + 1) + " has " +
                    std::to_string(cells.size()) + " fields, expected " + std::to_string(names.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (auto c : cells) row.push_back(detail::parse_double(c));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("dataset " + path.string() + " has no samples");
  Eigen::MatrixXd data(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(names.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < names.size(); ++c) data(r, c) = rows[r][c];
  try {
    return make_dataset(std::move(data), std::move(names));
  } catch (const Error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace fansmb
