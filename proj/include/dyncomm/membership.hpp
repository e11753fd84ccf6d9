#pragma once

// Soft memberships, theta-rule covers and the cover file format.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dyncomm/graph.hpp"
#include "dyncomm/model.hpp"

namespace dyncomm {

/// u[i][k] = (n_r / M) * beta_ir for node `nodes[i]` and community `communities[k]`.
struct SoftMembership {
  std::vector<NodeId> nodes;
  std::vector<CommunityId> communities;
  std::vector<std::vector<double>> u;
};

/// Overlapping node communities. Each member carries its soft weight.
struct Cover {
  std::map<CommunityId, std::map<NodeId, double>> communities;

  std::size_t size() const noexcept { return communities.size(); }
  bool empty() const noexcept { return communities.empty(); }

  void add(CommunityId r, NodeId i, double w = 1.0) { communities[r][i] = w; }

  /// Number of communities each node belongs to.
  std::map<NodeId, std::size_t> membership_counts() const {
    std::map<NodeId, std::size_t> out;
    for (const auto& [r, members] : communities)
      for (const auto& [i, w] : members) ++out[i];
    return out;
  }

  std::set<NodeId> nodes() const {
    std::set<NodeId> out;
    for (const auto& [r, members] : communities)
      for (const auto& [i, w] : members) out.insert(i);
    return out;
  }
};

/// Nodes without incident edges get an all-zero row: a sampled beta is never
/// exactly zero, so their membership has to come from the counts.
inline SoftMembership soft_membership(const BetaMatrix& B, const CommunityStats& stats,
                                      const SnapshotGraph& g) {
  SoftMembership s;
  const std::size_t m = g.num_edges();
  if (m == 0) return s;
  s.nodes = g.nodes();
  std::vector<double> scale;
  for (const auto& [r, n] : stats.sizes) {
    if (n == 0) continue;
    s.communities.push_back(r);
    scale.push_back(static_cast<double>(n) / static_cast<double>(m));
  }
  s.u.assign(g.num_nodes(), std::vector<double>(s.communities.size(), 0.0));
  for (std::size_t k = 0; k < s.communities.size(); ++k) {
    const auto& lb = B.log_of(s.communities[k]);
    for (std::size_t i = 0; i < g.num_nodes(); ++i) {
      if (g.degrees()[i] == 0) continue;
      s.u[i][k] = scale[k] * std::exp(lb[i]);
    }
  }
  return s;
}

/// Node i joins community s when u_is / max_r u_ir >= theta.
inline Cover extract_cover(const SoftMembership& s, double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) throw Error("theta must lie in (0, 1]");
  Cover c;
  for (std::size_t i = 0; i < s.u.size(); ++i) {
    const auto& row = s.u[i];
    double hi = 0.0;
    for (double x : row) hi = std::max(hi, x);
    if (!(hi > 0.0)) continue;
    for (std::size_t k = 0; k < row.size(); ++k)
      if (row[k] > 0.0 && row[k] / hi >= theta) c.add(s.communities[k], s.nodes[i], row[k]);
  }
  return c;
}

/// Index of the largest score; ties go to the latest entry.
inline std::size_t select_best_index(const std::vector<double>& modularities) {
  if (modularities.empty()) throw Error("cannot select from an empty sample list");
  std::size_t best = 0;
  for (std::size_t k = 1; k < modularities.size(); ++k)
    if (modularities[k] >= modularities[best]) best = k;
  return best;
}

// Cover file: one `t community_id node_id u_value` line per membership,
// sorted by (t, community_id, node_id).

inline std::string format_weight(double w) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", w);
  return buf;
}

inline void write_covers(std::ostream& out, const std::map<std::size_t, Cover>& covers) {
  for (const auto& [t, cover] : covers)
    for (const auto& [r, members] : cover.communities)
      for (const auto& [i, w] : members) out << t << ' ' << r << ' ' << i << ' ' << format_weight(w) << '\n';
}

inline void save_covers(const std::string& path, const std::map<std::size_t, Cover>& covers) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  write_covers(out, covers);
}

inline std::map<std::size_t, Cover> read_covers(std::istream& in) {
  std::map<std::size_t, Cover> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(detail::strip_comment(line));
    std::vector<std::string> tok;
    for (std::string s; ss >> s;) tok.push_back(s);
    if (tok.empty()) continue;
    if (tok.size() != 4) throw ParseError(lineno, "expected 4 fields");
    std::uint64_t t = 0, r = 0, i = 0;
    if (!detail::parse_uint(tok[0], t) || t == 0 || !detail::parse_uint(tok[1], r) ||
        !detail::parse_uint(tok[2], i))
      throw ParseError(lineno, "invalid integer field");
    double w = 0.0;
    try {
      w = std::stod(tok[3]);
    } catch (...) {
      throw ParseError(lineno, "invalid membership weight");
    }
    out[t].add(r, i, w);
  }
  return out;
}

inline std::map<std::size_t, Cover> load_covers(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return read_covers(in);
}

}  // namespace dyncomm
