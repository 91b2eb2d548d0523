#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

namespace fansmb {

// N x d sample matrix (rows = observations) with column names.
struct Dataset {
  std::vector<std::string> names;
  Eigen::MatrixXd data;
  bool standardized = false;
  Eigen::VectorXd means;  // populated by standardize()
  Eigen::VectorXd stds;

  int rows() const { return static_cast<int>(data.rows()); }
  int dim() const { return static_cast<int>(data.cols()); }
  int index_of(const std::string& name) const;
};

Dataset make_dataset(Eigen::MatrixXd data, std::vector<std::string> names = {});

// Zero mean, unit (N-1) standard deviation per column. Constant columns are
// centered and left with std recorded as 1.
Dataset standardize(const Dataset& ds);

// First row names, then samples; shortest round-trip decimal floats.
void write_dataset_csv(const std::filesystem::path& path, const Dataset& ds);
Dataset read_dataset_csv(const std::filesystem::path& path);

}  // namespace fansmb
