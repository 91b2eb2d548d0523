#include "fansmb/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "fansmb/error.hpp"
#include "text_util.hpp"

namespace fansmb {

namespace {

void check_unique(const std::vector<int>& ranked) {
  if (VarSet(ranked.begin(), ranked.end()).size() != ranked.size())
    throw UsageError("ranked list contains duplicates");
}

}  // namespace

double ndcg(const std::vector<int>& ranked, const VarSet& truth) {
  check_unique(ranked);
  if (truth.empty()) return ranked.empty() ? 1.0 : 0.0;
  double dcg = 0.0;
  for (std::size_t r = 0; r < ranked.size(); ++r)
    if (truth.contains(ranked[r])) dcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
  double idcg = 0.0;
  for (std::size_t r = 0; r < truth.size(); ++r) idcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
  return dcg / idcg;
}

double avep(const std::vector<int>& ranked, const VarSet& truth) {
  check_unique(ranked);
  if (truth.empty()) return ranked.empty() ? 1.0 : 0.0;
  double sum = 0.0;
  int hits = 0;
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    if (!truth.contains(ranked[r])) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(r + 1);
  }
  return sum / static_cast<double>(truth.size());
}

double f1(const VarSet& predicted, const VarSet& truth) {
  if (predicted.empty() && truth.empty()) return 1.0;
  if (predicted.empty() || truth.empty()) return 0.0;
  std::size_t tp = 0;
  for (int v : predicted) tp += truth.contains(v);
  if (tp == 0) return 0.0;
  const double p = static_cast<double>(tp) / predicted.size();
  const double r = static_cast<double>(tp) / truth.size();
  return 2.0 * p * r / (p + r);
}

MetricReport evaluate_run(const MbMap& mbs, const Dag& dag) {
  const int d = dag.size();
  MetricReport rep;
  for (const auto& [t, _] : mbs)
    if (t < 0 || t >= d) throw UsageError("prediction for target " + std::to_string(t) + " outside the graph");
  for (int t = 0; t < d; ++t) {
    auto it = mbs.find(t);
    if (it == mbs.end()) throw UsageError("no prediction for target " + std::to_string(t));
    const VarSet truth = markov_boundary_of(dag, t);
    const VarSet pred(it->second.begin(), it->second.end());
    MetricRow row{t, ndcg(it->second, truth), avep(it->second, truth), f1(pred, truth)};
    rep.mean.ndcg += row.ndcg;
    rep.mean.avep += row.avep;
    rep.mean.f1 += row.f1;
    rep.rows.push_back(row);
  }
  if (d > 0) {
    rep.mean.ndcg /= d;
    rep.mean.avep /= d;
    rep.mean.f1 /= d;
  }
  return rep;
}

void write_metrics_csv(const std::filesystem::path& path, const MetricReport& report,
                       const std::vector<std::string>& names) {
  std::ostringstream s;
  s << "target,ndcg,avep,f1\n";
  auto row = [&](const std::string& name, const MetricRow& r) {
    s << name << ',' << detail::format_double(r.ndcg) << ',' << detail::format_double(r.avep) << ','
      << detail::format_double(r.f1) << '\n';
  };
  for (const auto& r : report.rows) row(names.at(r.target), r);
  row("mean", report.mean);
  detail::write_file(path, s.str());
}

void print_metrics_table(std::ostream& os, const MetricReport& report,
                         const std::vector<std::string>& names) {
  std::size_t width = 6;
  for (const auto& n : names) width = std::max(width, n.size());
  char buf[128];
  auto line = [&](const std::string& name, double a, double b, double c) {
    std::snprintf(buf, sizeof buf, "%-*s  %7.4f  %7.4f  %7.4f\n", static_cast<int>(width), name.c_str(), a, b, c);
    os << buf;
  };
  std::snprintf(buf, sizeof buf, "%-*s  %7s  %7s  %7s\n", static_cast<int>(width), "target", "nDCG", "AveP", "F1");
  os << buf;
  for (const auto& r : report.rows) line(names.at(r.target), r.ndcg, r.avep, r.f1);
  line("mean", report.mean.ndcg, report.mean.avep, report.mean.f1);
}

}  // namespace fansmb
