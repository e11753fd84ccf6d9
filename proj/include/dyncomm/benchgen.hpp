#pragma once

// Synthetic dynamic networks with planted overlapping communities. Edges
// inside a community are drawn with uniform node importance over its
// members, so every within-community pair is equally likely; background edges
// join pairs that share no community.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "dyncomm/graph.hpp"
#include "dyncomm/membership.hpp"
#include "dyncomm/model.hpp"
#include "dyncomm/random.hpp"

namespace dyncomm {

struct GenConfig {
  std::size_t n = 200;
  std::size_t k = 4;
  std::size_t overlap_nodes = 10;
  std::size_t memberships_per_overlap = 2;
  double mixing = 0.1;
  double avg_degree = 20.0;
  std::size_t max_degree = 40;  // 0 disables the cap
  std::size_t snapshots = 1;
  double churn = 0.1;
  std::size_t min_community_size = 4;
  std::uint64_t seed = 1;

  void check() const {
    if (n < 2) throw Error("need at least two nodes");
    if (k == 0) throw Error("need at least one community");
    if (overlap_nodes > n) throw Error("more overlapping nodes than nodes");
    if (overlap_nodes > 0 && memberships_per_overlap < 2)
      throw Error("overlapping nodes need at least two memberships");
    if (overlap_nodes > 0 && k < memberships_per_overlap)
      throw Error("fewer communities than memberships per overlapping node");
    if (!(mixing >= 0.0 && mixing < 1.0)) throw Error("mixing must lie in [0, 1)");
    if (!(avg_degree >= 0.0)) throw Error("average degree must be nonnegative");
    const double nn = static_cast<double>(n);
    if (avg_degree * nn / 2.0 > nn * (nn - 1.0) / 2.0) throw Error("infeasible degree target");
    if (max_degree != 0 && static_cast<double>(max_degree) < avg_degree)
      throw Error("max degree below average degree");
    if (snapshots == 0) throw Error("need at least one snapshot");
    if (!(churn >= 0.0 && churn <= 1.0)) throw Error("churn must lie in [0, 1]");
  }
};

enum class EventKind { birth, death, expand, contract, merge, split };

inline const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::birth: return "birth";
    case EventKind::death: return "death";
    case EventKind::expand: return "expand";
    case EventKind::contract: return "contract";
    case EventKind::merge: return "merge";
    case EventKind::split: return "split";
  }
  return "?";
}

inline EventKind parse_event_kind(const std::string& s) {
  if (s == "birth") return EventKind::birth;
  if (s == "death") return EventKind::death;
  if (s == "expand") return EventKind::expand;
  if (s == "contract") return EventKind::contract;
  if (s == "merge") return EventKind::merge;
  if (s == "split") return EventKind::split;
  throw Error("unknown event kind '" + s + "'");
}

/// One scripted change. Unset communities are chosen at random among the
/// live ones; an unset amount means the default for the kind (birth: mean
/// community size, expand/contract: a tenth of the target's size).
struct GenEvent {
  std::size_t t = 2;
  EventKind kind = EventKind::birth;
  std::optional<CommunityId> target;
  std::optional<CommunityId> other;  // second community of a merge
  std::optional<std::size_t> amount;
};

struct GenSchedule {
  std::vector<GenEvent> events;
};

/// Net change in community count caused by one event.
inline int k_delta(EventKind k) {
  switch (k) {
    case EventKind::birth:
    case EventKind::split: return 1;
    case EventKind::death:
    case EventKind::merge: return -1;
    default: return 0;
  }
}

/// Community count per snapshot implied by the schedule alone.
inline std::vector<std::size_t> schedule_k_series(std::size_t k, const GenSchedule& s,
                                                  std::size_t snapshots) {
  std::vector<std::size_t> out;
  long cur = static_cast<long>(k);
  for (std::size_t t = 1; t <= snapshots; ++t) {
    for (const auto& e : s.events)
      if (e.t == t) cur += k_delta(e.kind);
    out.push_back(static_cast<std::size_t>(std::max(cur, 0L)));
  }
  return out;
}

/// Schedule file: `t kind [target=ID] [other=ID] [size=N|q=N]` per line.
inline GenSchedule read_schedule(std::istream& in) {
  GenSchedule s;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(detail::strip_comment(line));
    std::vector<std::string> tok;
    for (std::string x; ss >> x;) tok.push_back(x);
    if (tok.empty()) continue;
    if (tok.size() < 2) throw ParseError(lineno, "expected `t kind [key=value...]`");
    GenEvent e;
    std::uint64_t t = 0;
    if (!detail::parse_uint(tok[0], t) || t < 2) throw ParseError(lineno, "event snapshot must be >= 2");
    e.t = t;
    try {
      e.kind = parse_event_kind(tok[1]);
    } catch (const Error& err) {
      throw ParseError(lineno, err.what());
    }
    for (std::size_t k = 2; k < tok.size(); ++k) {
      const auto eq = tok[k].find('=');
      std::uint64_t v = 0;
      if (eq == std::string::npos || !detail::parse_uint(tok[k].substr(eq + 1), v))
        throw ParseError(lineno, "bad event parameter '" + tok[k] + "'");
      const std::string key = tok[k].substr(0, eq);
      if (key == "target") e.target = v;
      else if (key == "other") e.other = v;
      else if (key == "size" || key == "q") e.amount = v;
      else throw ParseError(lineno, "unknown event parameter '" + key + "'");
    }
    s.events.push_back(e);
  }
  std::stable_sort(s.events.begin(), s.events.end(),
                   [](const GenEvent& a, const GenEvent& b) { return a.t < b.t; });
  return s;
}

inline void write_schedule(std::ostream& out, const GenSchedule& s) {
  for (const auto& e : s.events) {
    out << e.t << ' ' << to_string(e.kind);
    if (e.target) out << " target=" << *e.target;
    if (e.other) out << " other=" << *e.other;
    if (e.amount) out << (e.kind == EventKind::birth ? " size=" : " q=") << *e.amount;
    out << '\n';
  }
}

/// Planted memberships for one snapshot.
class PlantedCover {
 public:
  explicit PlantedCover(std::size_t n = 0) : member_of_(n) {}

  std::size_t num_nodes() const noexcept { return member_of_.size(); }
  const std::map<CommunityId, std::set<NodeId>>& communities() const noexcept { return comms_; }
  const std::set<CommunityId>& memberships(NodeId i) const { return member_of_.at(i); }
  std::size_t k() const noexcept { return comms_.size(); }
  bool is_live(CommunityId r) const { return comms_.count(r) != 0; }
  CommunityId next_id() const noexcept { return next_id_; }

  CommunityId open() {
    const CommunityId r = next_id_++;
    comms_[r];
    return r;
  }
  void join(NodeId i, CommunityId r) {
    comms_.at(r).insert(i);
    member_of_.at(i).insert(r);
  }
  void leave(NodeId i, CommunityId r) {
    comms_.at(r).erase(i);
    member_of_.at(i).erase(r);
  }
  void close(CommunityId r) {
    for (NodeId i : comms_.at(r)) member_of_[i].erase(r);
    comms_.erase(r);
  }

  std::vector<CommunityId> live() const {
    std::vector<CommunityId> out;
    for (const auto& [r, m] : comms_) out.push_back(r);
    return out;
  }

  Cover to_cover() const {
    Cover c;
    for (const auto& [r, members] : comms_)
      for (NodeId i : members) c.add(r, i, 1.0);
    return c;
  }

 private:
  std::vector<std::set<CommunityId>> member_of_;
  std::map<CommunityId, std::set<NodeId>> comms_;
  CommunityId next_id_ = 0;
};

struct GroundTruth {
  std::vector<PlantedCover> snapshots;

  std::vector<std::size_t> k_series() const {
    std::vector<std::size_t> out;
    for (const auto& p : snapshots) out.push_back(p.k());
    return out;
  }
  std::map<std::size_t, Cover> covers() const {
    std::map<std::size_t, Cover> out;
    for (std::size_t t = 0; t < snapshots.size(); ++t) out.emplace(t + 1, snapshots[t].to_cover());
    return out;
  }
};

namespace detail {

template <class T>
T pick_one(const std::vector<T>& xs, Rng& rng) {
  std::uniform_int_distribution<std::size_t> d(0, xs.size() - 1);
  return xs[d(rng)];
}

inline std::vector<NodeId> shuffled_nodes(std::size_t n, Rng& rng) {
  std::vector<NodeId> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  std::shuffle(v.begin(), v.end(), rng);
  return v;
}

/// Moves single-membership node i from its community to r, unless that
/// would shrink the source below `min_size`.
inline bool move_single(PlantedCover& p, NodeId i, CommunityId r, std::size_t min_size) {
  const auto& m = p.memberships(i);
  if (m.size() != 1) return false;
  const CommunityId from = *m.begin();
  if (from == r || p.communities().at(from).size() <= min_size) return false;
  p.leave(i, from);
  p.join(i, r);
  return true;
}

inline CommunityId resolve_target(const PlantedCover& p, const std::optional<CommunityId>& want,
                                  Rng& rng) {
  if (want) {
    if (!p.is_live(*want)) throw Error("event on dead community " + std::to_string(*want));
    return *want;
  }
  return pick_one(p.live(), rng);
}

}  // namespace detail

/// Snapshot-1 memberships: n - on nodes get one community (balanced
/// round-robin), on randomly chosen nodes get om distinct communities.
inline PlantedCover plant_memberships(const GenConfig& cfg, Rng& rng) {
  cfg.check();
  if (cfg.overlap_nodes > 0 && cfg.k < cfg.memberships_per_overlap)
    throw Error("fewer communities than memberships per overlapping node");
  PlantedCover p(cfg.n);
  std::vector<CommunityId> ids;
  for (std::size_t r = 0; r < cfg.k; ++r) ids.push_back(p.open());
  const auto order = detail::shuffled_nodes(cfg.n, rng);
  const std::size_t singles = cfg.n - cfg.overlap_nodes;
  for (std::size_t s = 0; s < singles; ++s) p.join(order[s], ids[s % cfg.k]);
  for (std::size_t s = singles; s < cfg.n; ++s) {
    auto pool = ids;
    std::shuffle(pool.begin(), pool.end(), rng);
    for (std::size_t m = 0; m < cfg.memberships_per_overlap; ++m) p.join(order[s], pool[m]);
  }
  return p;
}

/// Samples one snapshot's edges from the planted memberships.
inline SnapshotGraph generate_snapshot(const PlantedCover& p, const GenConfig& cfg, std::size_t t,
                                       Rng& rng) {
  const std::size_t n = p.num_nodes();
  std::size_t total_memberships = 0;
  for (const auto& [r, m] : p.communities()) total_memberships += m.size();
  const double nn = static_cast<double>(n);
  const double inside = (1.0 - cfg.mixing) * cfg.avg_degree * nn / 2.0;
  const auto background = static_cast<std::size_t>(std::llround(cfg.mixing * cfg.avg_degree * nn / 2.0));
  const std::size_t cap = cfg.max_degree == 0 ? n : cfg.max_degree;

  std::unordered_set<EdgeKey, EdgeKeyHash> edges;
  std::vector<std::size_t> deg(n, 0);
  auto try_add = [&](NodeId a, NodeId b) {
    if (a == b || deg[a] >= cap || deg[b] >= cap) return false;
    if (!edges.emplace(a, b).second) return false;
    ++deg[a];
    ++deg[b];
    return true;
  };

  for (const auto& [r, members] : p.communities()) {
    const std::size_t s = members.size();
    if (s < 2 || total_memberships == 0) continue;
    const auto want = static_cast<std::size_t>(
        std::llround(inside * static_cast<double>(s) / static_cast<double>(total_memberships)));
    if (want > s * (s - 1) / 2) throw Error("infeasible degree target for community " + std::to_string(r));
    const std::vector<NodeId> mv(members.begin(), members.end());
    std::uniform_int_distribution<std::size_t> pick(0, s - 1);
    std::size_t added = 0, attempts = 0;
    const std::size_t budget = 200 * want + 1000;
    while (added < want) {
      if (++attempts > budget) throw Error("infeasible degree target for community " + std::to_string(r));
      if (try_add(mv[pick(rng)], mv[pick(rng)])) ++added;
    }
  }

  std::uniform_int_distribution<NodeId> any(0, n - 1);
  std::size_t added = 0, attempts = 0;
  const std::size_t budget = 200 * background + 1000;
  auto share = [&](NodeId a, NodeId b) {
    const auto& ma = p.memberships(a);
    const auto& mb = p.memberships(b);
    return std::any_of(ma.begin(), ma.end(), [&](CommunityId r) { return mb.count(r) != 0; });
  };
  while (added < background) {
    if (++attempts > budget) throw Error("infeasible degree target for background edges");
    const NodeId a = any(rng), b = any(rng);
    if (a == b || share(a, b)) continue;
    if (try_add(a, b)) ++added;
  }

  std::vector<NodeId> nodes(n);
  for (std::size_t i = 0; i < n; ++i) nodes[i] = i;
  std::vector<EdgeKey> list(edges.begin(), edges.end());
  return SnapshotGraph(t, std::move(nodes), std::move(list));
}

/// Evolves snapshot `prev` into the next one: churn on single-membership
/// nodes, then the events scheduled for snapshot t in file order.
inline PlantedCover evolve(const PlantedCover& prev, const GenSchedule& sched, std::size_t t,
                           const GenConfig& cfg, Rng& rng) {
  PlantedCover p = prev;
  const std::size_t min_size = cfg.min_community_size;

  const auto churn = static_cast<std::size_t>(std::floor(cfg.churn * static_cast<double>(cfg.n)));
  if (p.k() > 1) {
    std::size_t moved = 0;
    for (NodeId i : detail::shuffled_nodes(cfg.n, rng)) {
      if (moved == churn) break;
      if (p.memberships(i).size() != 1) continue;
      const CommunityId from = *p.memberships(i).begin();
      auto options = p.live();
      options.erase(std::find(options.begin(), options.end(), from));
      if (detail::move_single(p, i, detail::pick_one(options, rng), min_size)) ++moved;
    }
  }

  for (const auto& ev : sched.events) {
    if (ev.t != t) continue;
    switch (ev.kind) {
      case EventKind::birth: {
        const std::size_t size = ev.amount.value_or(cfg.n / std::max<std::size_t>(p.k(), 1));
        const CommunityId r = p.open();
        std::size_t joined = 0;
        for (NodeId i : detail::shuffled_nodes(cfg.n, rng)) {
          if (joined == size) break;
          if (detail::move_single(p, i, r, min_size)) ++joined;
        }
        if (joined < 2) throw Error("birth at snapshot " + std::to_string(t) + " found no members");
        break;
      }
      case EventKind::death: {
        const CommunityId r = detail::resolve_target(p, ev.target, rng);
        if (p.k() <= 1) throw Error("death would remove the last community");
        const std::vector<NodeId> members(p.communities().at(r).begin(), p.communities().at(r).end());
        p.close(r);
        for (NodeId i : members) {
          std::vector<CommunityId> options;
          for (CommunityId c : p.live())
            if (!p.memberships(i).count(c)) options.push_back(c);
          if (!options.empty()) p.join(i, detail::pick_one(options, rng));
        }
        break;
      }
      case EventKind::expand: {
        const CommunityId r = detail::resolve_target(p, ev.target, rng);
        const std::size_t q = ev.amount.value_or(std::max<std::size_t>(1, p.communities().at(r).size() / 10));
        std::size_t joined = 0;
        for (NodeId i : detail::shuffled_nodes(cfg.n, rng)) {
          if (joined == q) break;
          if (detail::move_single(p, i, r, min_size)) ++joined;
        }
        break;
      }
      case EventKind::contract: {
        const CommunityId r = detail::resolve_target(p, ev.target, rng);
        const std::size_t q = ev.amount.value_or(std::max<std::size_t>(1, p.communities().at(r).size() / 10));
        if (p.k() <= 1) break;
        std::vector<NodeId> members(p.communities().at(r).begin(), p.communities().at(r).end());
        std::shuffle(members.begin(), members.end(), rng);
        std::size_t left = 0;
        for (NodeId i : members) {
          if (left == q) break;
          auto options = p.live();
          options.erase(std::find(options.begin(), options.end(), r));
          if (detail::move_single(p, i, detail::pick_one(options, rng), min_size)) ++left;
        }
        break;
      }
      case EventKind::merge: {
        if (p.k() < 2) throw Error("merge needs two live communities");
        const CommunityId a = detail::resolve_target(p, ev.target, rng);
        CommunityId b = 0;
        if (ev.other) {
          b = detail::resolve_target(p, ev.other, rng);
        } else {
          auto options = p.live();
          options.erase(std::find(options.begin(), options.end(), a));
          b = detail::pick_one(options, rng);
        }
        if (a == b) throw Error("merge of a community with itself");
        const std::vector<NodeId> members(p.communities().at(b).begin(), p.communities().at(b).end());
        p.close(b);
        for (NodeId i : members) p.join(i, a);
        break;
      }
      case EventKind::split: {
        const CommunityId r = detail::resolve_target(p, ev.target, rng);
        std::vector<NodeId> members(p.communities().at(r).begin(), p.communities().at(r).end());
        if (members.size() < 4) throw Error("community too small to split");
        std::shuffle(members.begin(), members.end(), rng);
        const CommunityId fresh = p.open();
        for (std::size_t m = 0; m < members.size() / 2; ++m) {
          p.leave(members[m], r);
          p.join(members[m], fresh);
        }
        break;
      }
    }
  }
  return p;
}

/// Planted memberships for every snapshot 1..cfg.snapshots.
inline GroundTruth apply_events(const PlantedCover& first, const GenSchedule& sched,
                                const GenConfig& cfg, Rng& rng) {
  for (const auto& ev : sched.events)
    if (ev.t < 2 || ev.t > cfg.snapshots)
      throw Error("event at snapshot " + std::to_string(ev.t) + " outside 2.." + std::to_string(cfg.snapshots));
  GroundTruth truth;
  truth.snapshots.push_back(first);
  for (std::size_t t = 2; t <= cfg.snapshots; ++t)
    truth.snapshots.push_back(evolve(truth.snapshots.back(), sched, t, cfg, rng));
  return truth;
}

struct Benchmark {
  DynamicNetwork network;
  GroundTruth truth;
};

inline Benchmark generate_dynamic(const GenConfig& cfg, const GenSchedule& sched) {
  cfg.check();
  Rng rng(derive_seed(cfg.seed, 0x6d656d62));
  Benchmark b;
  b.truth = apply_events(plant_memberships(cfg, rng), sched, cfg, rng);
  for (std::size_t t = 1; t <= cfg.snapshots; ++t) {
    Rng edge_rng(derive_seed(cfg.seed, 0x65646765, t));
    b.network.snapshots.push_back(generate_snapshot(b.truth.snapshots[t - 1], cfg, t, edge_rng));
  }
  return b;
}

// Named configurations. The `-t1` / `-t2` presets use the two common
// benchmark settings (N, average degree, max degree, on, om, mu, T) of
// 1000/40/60/40/4/0.3/10 and 500/30/50/20/3/0.2/9; `desk-*` presets are
// small instances that run in seconds.

struct Preset {
  GenConfig config;
  GenSchedule schedule;
};

inline GenConfig table1_config() {
  GenConfig c;
  c.n = 1000;
  c.avg_degree = 40;
  c.max_degree = 60;
  c.overlap_nodes = 40;
  c.memberships_per_overlap = 4;
  c.mixing = 0.3;
  c.snapshots = 10;
  c.k = 20;
  c.churn = 0.1;
  return c;
}

inline GenConfig table2_config() {
  GenConfig c;
  c.n = 500;
  c.avg_degree = 30;
  c.max_degree = 50;
  c.overlap_nodes = 20;
  c.memberships_per_overlap = 3;
  c.mixing = 0.2;
  c.snapshots = 9;
  c.k = 10;
  c.churn = 0.1;
  return c;
}

inline GenConfig desk_config() {
  GenConfig c;
  c.n = 200;
  c.k = 4;
  c.overlap_nodes = 10;
  c.memberships_per_overlap = 2;
  c.mixing = 0.1;
  c.avg_degree = 20;
  c.max_degree = 40;
  c.snapshots = 6;
  c.churn = 0.1;
  return c;
}

/// Every snapshot after the first pairs the given kinds.
inline GenSchedule paired_schedule(std::size_t snapshots, std::initializer_list<EventKind> kinds) {
  GenSchedule s;
  for (std::size_t t = 2; t <= snapshots; ++t)
    for (EventKind k : kinds) s.events.push_back(GenEvent{t, k, {}, {}, {}});
  return s;
}

/// Alternating single events so that K actually moves: +1, -1, (+1 -1), +1, -1, ...
inline GenSchedule alternating_birth_death(std::size_t snapshots) {
  GenSchedule s;
  for (std::size_t t = 2; t <= snapshots; ++t) {
    switch ((t - 2) % 3) {
      case 0: s.events.push_back({t, EventKind::birth, {}, {}, {}}); break;
      case 1: s.events.push_back({t, EventKind::death, {}, {}, {}}); break;
      default:
        s.events.push_back({t, EventKind::birth, {}, {}, {}});
        s.events.push_back({t, EventKind::death, {}, {}, {}});
    }
  }
  return s;
}

inline std::vector<std::string> preset_names() {
  return {"birthdeath-t1", "expandcontract-t1", "mergesplit-t1", "birthdeath-t2",
          "expandcontract-t2", "mergesplit-t2", "birth-t2", "death-t2", "merge-t2", "split-t2",
          "desk-static", "desk-birthdeath"};
}

inline Preset make_preset(const std::string& name) {
  Preset p;
  const auto dash = name.rfind('-');
  if (dash == std::string::npos) throw Error("unknown preset '" + name + "'");
  const std::string kind = name.substr(0, dash), scale = name.substr(dash + 1);
  if (scale == "t1") p.config = table1_config();
  else if (scale == "t2") p.config = table2_config();
  else if (name == "desk-static" || name == "desk-birthdeath") p.config = desk_config();
  else throw Error("unknown preset '" + name + "'");
  const std::size_t T = p.config.snapshots;
  if (name == "desk-static") {
    p.config.snapshots = 1;
  } else if (name == "desk-birthdeath") {
    p.schedule = alternating_birth_death(T);
  } else if (kind == "birthdeath") {
    p.schedule = paired_schedule(T, {EventKind::birth, EventKind::death});
  } else if (kind == "expandcontract") {
    p.schedule = paired_schedule(T, {EventKind::expand, EventKind::contract});
  } else if (kind == "mergesplit") {
    p.schedule = paired_schedule(T, {EventKind::merge, EventKind::split});
  } else if (kind == "birth") {
    p.schedule = paired_schedule(T, {EventKind::birth});
  } else if (kind == "death") {
    p.schedule = paired_schedule(T, {EventKind::death});
  } else if (kind == "merge") {
    p.schedule = paired_schedule(T, {EventKind::merge});
  } else if (kind == "split") {
    p.schedule = paired_schedule(T, {EventKind::split});
  } else {
    throw Error("unknown preset '" + name + "'");
  }
  return p;
}

}  // namespace dyncomm
