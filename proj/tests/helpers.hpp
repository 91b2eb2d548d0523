#pragma once

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fansmb/graph.hpp"
#include "fansmb/random.hpp"
#include "fansmb/synth.hpp"

namespace fansmb::test {

// Random DAG with a random edge density, for property tests.
inline Dag random_dag(int d, Rng& rng) {
  std::uniform_real_distribution<double> deg(0.3, std::max(0.5, d - 1.0));
  return sample_er_dag(d, std::min(deg(rng), d - 1.0), rng());
}

inline VarSet random_subset(int d, Rng& rng, bool nonempty = true) {
  VarSet s;
  while (s.empty()) {
    std::bernoulli_distribution coin(0.5);
    for (int i = 0; i < d; ++i)
      if (coin(rng)) s.insert(i);
    if (!nonempty) break;
  }
  return s;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Fresh scratch directory under the working directory.
inline std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::current_path() / "scratch" / name;
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace fansmb::test
