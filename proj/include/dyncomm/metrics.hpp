#pragma once

// Cover quality measures: extended (overlapping) modularity, overlapping NMI
// and the per-snapshot metric CSV.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "dyncomm/graph.hpp"
#include "dyncomm/membership.hpp"

namespace dyncomm {

/// EQ = 1/(2M) sum_c sum_{i,j in c} [A_ij - k_i k_j / 2M] / (O_i O_j), where
/// O_i counts the cover communities holding i. Equals Newman's Q on partitions.
inline double extended_modularity(const Cover& c, const SnapshotGraph& g) {
  const std::size_t m = g.num_edges();
  if (m == 0) return 0.0;
  const double two_m = 2.0 * static_cast<double>(m);
  std::vector<std::size_t> overlap(g.num_nodes(), 0);
  std::vector<std::vector<std::size_t>> member_of(g.num_nodes());
  std::size_t k = 0;
  for (const auto& [r, members] : c.communities) {
    for (const auto& [i, w] : members) {
      const std::size_t idx = g.index_of(i);
      ++overlap[idx];
      member_of[idx].push_back(k);
    }
    ++k;
  }
  std::vector<double> internal(k, 0.0), strength(k, 0.0);
  for (const auto& [u, v] : g.dense_edges()) {
    if (overlap[u] == 0 || overlap[v] == 0) continue;
    const double w = 1.0 / static_cast<double>(overlap[u] * overlap[v]);
    // member_of lists are built in increasing community order
    auto a = member_of[u].begin(), b = member_of[v].begin();
    while (a != member_of[u].end() && b != member_of[v].end()) {
      if (*a < *b) {
        ++a;
      } else if (*b < *a) {
        ++b;
      } else {
        internal[*a] += 2.0 * w;
        ++a;
        ++b;
      }
    }
  }
  for (std::size_t i = 0; i < g.num_nodes(); ++i)
    for (std::size_t cidx : member_of[i])
      strength[cidx] += static_cast<double>(g.degrees()[i]) / static_cast<double>(overlap[i]);
  double q = 0.0;
  for (std::size_t cidx = 0; cidx < k; ++cidx)
    q += internal[cidx] - strength[cidx] * strength[cidx] / two_m;
  return q / two_m;
}

namespace detail {

inline double plogp(double p) { return p > 0.0 ? -p * std::log(p) : 0.0; }

inline double binary_entropy(double p) { return plogp(p) + plogp(1.0 - p); }

/// Average normalized conditional entropy H(X_k|Y)/H(X_k) with the
/// Lancichinetti-Fortunato-Kertesz acceptance rule for candidate Y_l.
inline double normalized_conditional_entropy(const std::vector<std::set<std::size_t>>& x,
                                             const std::vector<std::set<std::size_t>>& y,
                                             double n) {
  if (x.empty()) return 0.0;
  double total = 0.0;
  for (const auto& xk : x) {
    const double px = static_cast<double>(xk.size()) / n;
    const double hx = binary_entropy(px);
    if (hx <= 0.0) continue;
    double best = hx;
    for (const auto& yl : y) {
      std::size_t both = 0;
      for (std::size_t i : xk) both += yl.count(i);
      const double p11 = static_cast<double>(both) / n;
      const double p10 = static_cast<double>(xk.size() - both) / n;
      const double p01 = static_cast<double>(yl.size() - both) / n;
      const double p00 = std::max(0.0, 1.0 - p11 - p10 - p01);
      if (!(plogp(p11) + plogp(p00) > plogp(p10) + plogp(p01))) continue;
      const double joint = plogp(p11) + plogp(p10) + plogp(p01) + plogp(p00);
      const double py = static_cast<double>(yl.size()) / n;
      best = std::min(best, joint - binary_entropy(py));
    }
    total += std::clamp(best / hx, 0.0, 1.0);
  }
  return total / static_cast<double>(x.size());
}

inline std::vector<std::set<std::size_t>> index_sets(const Cover& c,
                                                     const std::map<NodeId, std::size_t>& idx) {
  std::vector<std::set<std::size_t>> out;
  for (const auto& [r, members] : c.communities) {
    if (members.empty()) continue;
    auto& s = out.emplace_back();
    for (const auto& [i, w] : members) s.insert(idx.at(i));
  }
  return out;
}

}  // namespace detail

/// Overlapping NMI, 1 - (H(X|Y)_norm + H(Y|X)_norm) / 2. The universe is
/// `universe` joined with every node either cover mentions. Two empty covers
/// score 1; an empty cover against a nonempty one scores 0.
inline double overlapping_nmi(const Cover& x, const Cover& y, std::span<const NodeId> universe) {
  if (x.empty() && y.empty()) return 1.0;
  if (x.empty() || y.empty()) return 0.0;
  std::set<NodeId> all(universe.begin(), universe.end());
  for (NodeId i : x.nodes()) all.insert(i);
  for (NodeId i : y.nodes()) all.insert(i);
  std::map<NodeId, std::size_t> idx;
  for (NodeId i : all) idx.emplace(i, idx.size());
  const auto xs = detail::index_sets(x, idx);
  const auto ys = detail::index_sets(y, idx);
  const double n = static_cast<double>(all.size());
  const double hxy = detail::normalized_conditional_entropy(xs, ys, n);
  const double hyx = detail::normalized_conditional_entropy(ys, xs, n);
  return std::clamp(1.0 - 0.5 * (hxy + hyx), 0.0, 1.0);
}

inline std::vector<std::size_t> community_count_series(const std::vector<Cover>& covers) {
  std::vector<std::size_t> out;
  for (const auto& c : covers) {
    std::size_t k = 0;
    for (const auto& [r, members] : c.communities) k += members.empty() ? 0 : 1;
    out.push_back(k);
  }
  return out;
}

struct MetricRow {
  std::size_t t = 0;
  std::optional<double> nmi;
  double modularity = 0.0;
  std::size_t k_detected = 0;
};

struct MetricSummary {
  double mean = 0.0;
  double stddev = 0.0;  // population
};

inline MetricSummary summarize(std::span<const double> xs) {
  MetricSummary s;
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  for (double x : xs) s.stddev += (x - s.mean) * (x - s.mean);
  s.stddev = std::sqrt(s.stddev / static_cast<double>(xs.size()));
  return s;
}

inline void write_metric_csv(std::ostream& out, const std::vector<MetricRow>& rows) {
  out << "t,nmi,modularity,k_detected\n";
  for (const auto& r : rows) {
    out << r.t << ',';
    if (r.nmi) out << format_weight(*r.nmi);
    out << ',' << format_weight(r.modularity) << ',' << r.k_detected << '\n';
  }
}

inline void save_metric_csv(const std::string& path, const std::vector<MetricRow>& rows) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  write_metric_csv(out, rows);
}

}  // namespace dyncomm
