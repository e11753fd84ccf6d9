#pragma once

// Snapshot graphs, dynamic networks and the `t u v` edge-list format.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace dyncomm {

using NodeId = std::uint64_t;

/// Base class of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(what + " at line " + std::to_string(line)), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Canonical undirected edge, u < v.
struct EdgeKey {
  NodeId u = 0;
  NodeId v = 0;

  EdgeKey() = default;
  EdgeKey(NodeId a, NodeId b) : u(std::min(a, b)), v(std::max(a, b)) {}

  friend auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
};

struct EdgeKeyHash {
  std::size_t operator()(const EdgeKey& e) const noexcept {
    std::uint64_t h = e.u * 0x9E3779B97F4A7C15ULL;
    h ^= e.v + 0x7F4A7C159E3779B9ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

/// One time step of the network. Nodes are kept sorted so that a node's
/// position (its dense index) is stable for the lifetime of the value.
class SnapshotGraph {
 public:
  SnapshotGraph() = default;

  /// Builds a snapshot; endpoints are added to the node set, duplicate edges
  /// collapse, self-loops throw.
  SnapshotGraph(std::size_t t, std::vector<NodeId> nodes, std::vector<EdgeKey> edges)
      : t_(t), nodes_(std::move(nodes)), edges_(std::move(edges)) {
    for (const auto& e : edges_) {
      if (e.u == e.v) throw Error("self-loop on node " + std::to_string(e.u));
      nodes_.push_back(e.u);
      nodes_.push_back(e.v);
    }
    std::sort(nodes_.begin(), nodes_.end());
    nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    build_index();
  }

  /// Bypasses canonicalization; used by tests that need to hold invalid graphs
  /// for `validate`.
  static SnapshotGraph unchecked(std::size_t t, std::vector<NodeId> nodes,
                                 std::vector<EdgeKey> edges) {
    SnapshotGraph g;
    g.t_ = t;
    g.nodes_ = std::move(nodes);
    g.edges_ = std::move(edges);
    g.unchecked_ = true;
    return g;
  }

  std::size_t t() const noexcept { return t_; }
  const std::vector<NodeId>& nodes() const noexcept { return nodes_; }
  const std::vector<EdgeKey>& edges() const noexcept { return edges_; }
  std::size_t num_nodes() const noexcept { return nodes_.size(); }
  std::size_t num_edges() const noexcept { return edges_.size(); }

  bool contains(NodeId id) const { return index_.count(id) != 0; }

  /// Dense index in 0..N-1 of a node id.
  std::size_t index_of(NodeId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw Error("unknown node " + std::to_string(id));
    return it->second;
  }

  /// Edge endpoints as dense indices, aligned with `edges()`.
  const std::vector<std::pair<std::size_t, std::size_t>>& dense_edges() const noexcept {
    return dense_edges_;
  }

  /// Degree per dense index.
  const std::vector<std::size_t>& degrees() const noexcept { return degrees_; }

  /// Position of an edge in `edges()`, or -1.
  std::ptrdiff_t edge_position(const EdgeKey& e) const {
    auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
    if (it == edges_.end() || *it != e) return -1;
    return it - edges_.begin();
  }

  bool is_unchecked() const noexcept { return unchecked_; }

 private:
  void build_index() {
    index_.clear();
    index_.reserve(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) index_.emplace(nodes_[i], i);
    degrees_.assign(nodes_.size(), 0);
    dense_edges_.clear();
    dense_edges_.reserve(edges_.size());
    for (const auto& e : edges_) {
      const std::size_t a = index_.at(e.u);
      const std::size_t b = index_.at(e.v);
      dense_edges_.emplace_back(a, b);
      ++degrees_[a];
      ++degrees_[b];
    }
  }

  std::size_t t_ = 1;
  std::vector<NodeId> nodes_;
  std::vector<EdgeKey> edges_;
  std::unordered_map<NodeId, std::size_t> index_;
  std::vector<std::pair<std::size_t, std::size_t>> dense_edges_;
  std::vector<std::size_t> degrees_;
  bool unchecked_ = false;
};

struct DynamicNetwork {
  std::vector<SnapshotGraph> snapshots;

  std::size_t size() const noexcept { return snapshots.size(); }
};

inline std::size_t degree(const SnapshotGraph& g, NodeId i) {
  return g.degrees().at(g.index_of(i));
}

struct Violation {
  std::string kind;  // "self-loop", "dangling endpoint", "non-canonical edge", "duplicate edge"
  EdgeKey edge;
};

/// Checks every invariant and reports all violations.
inline std::vector<Violation> validate(const SnapshotGraph& g) {
  std::vector<Violation> out;
  std::set<NodeId> nodes(g.nodes().begin(), g.nodes().end());
  std::set<std::pair<NodeId, NodeId>> seen;
  for (const auto& e : g.edges()) {
    if (e.u == e.v) {
      out.push_back({"self-loop", e});
      continue;
    }
    if (e.u > e.v) out.push_back({"non-canonical edge", e});
    if (!nodes.count(e.u) || !nodes.count(e.v)) out.push_back({"dangling endpoint", e});
    if (!seen.emplace(std::min(e.u, e.v), std::max(e.u, e.v)).second)
      out.push_back({"duplicate edge", e});
  }
  return out;
}

namespace detail {

inline std::string strip_comment(const std::string& line) {
  auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

inline bool parse_uint(const std::string& tok, std::uint64_t& out) {
  if (tok.empty() || tok[0] == '-' || tok[0] == '+') return false;
  std::size_t used = 0;
  try {
    out = std::stoull(tok, &used);
  } catch (...) {
    return false;
  }
  return used == tok.size();
}

}  // namespace detail

/// Parses the snapshot edge-list format. Each non-comment line is `t u v` or
/// `t n id` (isolated-node declaration). Snapshots run 1..T; a snapshot index
/// that never appears between 1 and T becomes an empty graph.
inline DynamicNetwork read_dynamic(std::istream& in) {
  std::map<std::size_t, std::pair<std::vector<NodeId>, std::vector<EdgeKey>>> raw;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(detail::strip_comment(line));
    std::vector<std::string> tok;
    for (std::string s; ss >> s;) tok.push_back(s);
    if (tok.empty()) continue;
    if (tok.size() != 3) throw ParseError(lineno, "expected 3 fields, got " + std::to_string(tok.size()));
    std::uint64_t t = 0;
    if (!detail::parse_uint(tok[0], t) || t == 0)
      throw ParseError(lineno, "snapshot index must be a positive integer");
    auto& slot = raw[t];
    if (tok[1] == "n") {
      std::uint64_t id = 0;
      if (!detail::parse_uint(tok[2], id)) throw ParseError(lineno, "invalid node id '" + tok[2] + "'");
      slot.first.push_back(id);
      continue;
    }
    std::uint64_t u = 0, v = 0;
    if (tok[1][0] == '-' || tok[2][0] == '-') throw ParseError(lineno, "negative node id");
    if (!detail::parse_uint(tok[1], u) || !detail::parse_uint(tok[2], v))
      throw ParseError(lineno, "invalid node id");
    if (u == v) throw ParseError(lineno, "self-loop");
    slot.second.emplace_back(u, v);
  }
  if (raw.empty()) throw Error("no snapshots");
  DynamicNetwork net;
  const std::size_t T = raw.rbegin()->first;
  net.snapshots.reserve(T);
  for (std::size_t t = 1; t <= T; ++t) {
    auto it = raw.find(t);
    if (it == raw.end()) {
      net.snapshots.emplace_back(t, std::vector<NodeId>{}, std::vector<EdgeKey>{});
    } else {
      net.snapshots.emplace_back(t, std::move(it->second.first), std::move(it->second.second));
    }
  }
  return net;
}

inline DynamicNetwork load_dynamic(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return read_dynamic(in);
}

/// Canonical form: per snapshot, node declarations for isolated nodes, then
/// edges in (u, v) order.
inline void write_dynamic(std::ostream& out, const DynamicNetwork& net) {
  for (const auto& g : net.snapshots) {
    for (std::size_t i = 0; i < g.num_nodes(); ++i)
      if (g.degrees()[i] == 0) out << g.t() << " n " << g.nodes()[i] << '\n';
    for (const auto& e : g.edges()) out << g.t() << ' ' << e.u << ' ' << e.v << '\n';
  }
}

inline void save_dynamic(const std::string& path, const DynamicNetwork& net) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  write_dynamic(out, net);
}

}  // namespace dyncomm
