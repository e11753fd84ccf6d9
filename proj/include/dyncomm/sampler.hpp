#pragma once

// Gibbs sampler over edge-to-community assignments with CRP (first snapshot)
// and recurrent-CRP (later snapshots) priors.

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include "dyncomm/graph.hpp"
#include "dyncomm/membership.hpp"
#include "dyncomm/metrics.hpp"
#include "dyncomm/model.hpp"
#include "dyncomm/random.hpp"

namespace dyncomm {

/// Hands out community ids; never returns an id twice.
class CommunityAllocator {
 public:
  explicit CommunityAllocator(CommunityId next = 0) : next_(next) {}
  CommunityId fresh() { return next_++; }
  CommunityId next() const noexcept { return next_; }

 private:
  CommunityId next_;
};

/// What one snapshot hands to the next: the initialization map for surviving
/// edges, n_{k,t-1} for every community of G^{t-1}, and the allocator position.
struct PrevSummary {
  std::map<EdgeKey, CommunityId> assignment;
  std::map<CommunityId, std::size_t> sizes;
  CommunityId next_id = 0;
};

/// Summary of the selected sample. `found`, when given, restricts the
/// initialization map to edges whose community made it into the cover; the
/// counts always cover all of G^{t-1}.
inline PrevSummary make_summary(const SnapshotGraph& g, const EdgeAssignment& G,
                                CommunityId next_id, const Cover* found = nullptr) {
  PrevSummary s;
  s.next_id = next_id;
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const CommunityId r = G.labels[e];
    ++s.sizes[r];
    if (!found || found->communities.count(r)) s.assignment.emplace(g.edges()[e], r);
  }
  return s;
}

inline std::size_t initial_community_count(std::size_t n, const HyperParams& h) {
  return std::max<std::size_t>(1, n / h.k0_divisor);
}

/// Uniform random assignment over K0 = max(1, N / k0_divisor) fresh ids.
inline EdgeAssignment init_assignments_first(const SnapshotGraph& g, const HyperParams& h,
                                             CommunityAllocator& ids, Rng& rng) {
  const std::size_t k0 = initial_community_count(g.num_nodes(), h);
  std::vector<CommunityId> pool(k0);
  for (auto& r : pool) r = ids.fresh();
  std::uniform_int_distribution<std::size_t> pick(0, k0 - 1);
  EdgeAssignment G;
  G.labels.reserve(g.num_edges());
  for (std::size_t e = 0; e < g.num_edges(); ++e) G.labels.push_back(pool[pick(rng)]);
  return G;
}

/// Surviving edges keep their previous community; new edges draw uniformly
/// from the communities that initialize at least one surviving edge (all of
/// G^{t-1} when the map is complete), or share one fresh community if none.
inline EdgeAssignment init_assignments_carry(const SnapshotGraph& g, const PrevSummary& prev,
                                             CommunityAllocator& ids, Rng& rng) {
  std::set<CommunityId> carried;
  for (const auto& [e, r] : prev.assignment) carried.insert(r);
  const std::vector<CommunityId> live(carried.begin(), carried.end());
  std::optional<CommunityId> fallback;
  EdgeAssignment G;
  G.labels.reserve(g.num_edges());
  for (const auto& e : g.edges()) {
    auto it = prev.assignment.find(e);
    if (it != prev.assignment.end()) {
      G.labels.push_back(it->second);
    } else if (!live.empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, live.size() - 1);
      G.labels.push_back(live[pick(rng)]);
    } else {
      if (!fallback) fallback = ids.fresh();
      G.labels.push_back(*fallback);
    }
  }
  return G;
}

/// Maximum-likelihood beta: beta_ir = N_ir / (2 n_r).
inline BetaMatrix init_beta_mle(const SnapshotGraph& g, const EdgeAssignment& G) {
  const auto stats = compute_stats(g, G);
  BetaMatrix B;
  for (const auto& [r, counts] : stats.endpoint_counts) {
    const double denom = 2.0 * static_cast<double>(stats.sizes.at(r));
    auto& lb = B.log_beta[r];
    lb.reserve(counts.size());
    for (std::size_t c : counts) lb.push_back(c > 0 ? std::log(static_cast<double>(c) / denom) : kNegInf);
  }
  return B;
}

/// Independent Dir(N_r + gamma) draw per community in `stats`.
inline BetaMatrix sample_beta(const CommunityStats& stats, double gamma, Rng& rng) {
  BetaMatrix B;
  std::vector<double> conc;
  for (const auto& [r, counts] : stats.endpoint_counts) {
    conc.resize(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) conc[i] = gamma + static_cast<double>(counts[i]);
    B.log_beta[r] = sample_log_dirichlet(conc, rng);
  }
  return B;
}

/// Mutable state of one chain on one snapshot.
class SamplerState {
 public:
  struct Community {
    CommunityId id = 0;
    std::size_t size = 0;       // n_{r,t}
    std::size_t prev_size = 0;  // n_{r,t-1}; nonzero marks a carried community
    std::vector<std::size_t> counts;
    std::vector<double> log_beta;  // empty while size == 0
  };

  /// `prev_sizes` lists the communities of G^{t-1}; they stay revivable for
  /// the whole snapshot. An occupied community missing from `B` starts at
  /// uniform beta. A carried community without edges holds no beta: its beta
  /// is integrated out until an edge revives it.
  SamplerState(const SnapshotGraph& g, EdgeAssignment G, const BetaMatrix& B,
               const std::map<CommunityId, std::size_t>& prev_sizes, CommunityAllocator ids)
      : g_(&g), labels_(std::move(G)), ids_(ids), carried_(false) {
    if (labels_.labels.size() != g.num_edges()) throw Error("assignment does not cover every edge");
    const std::size_t n = g.num_nodes();
    for (const auto& [r, np] : prev_sizes) {
      if (np == 0) continue;
      slot_of(r).prev_size = np;
      carried_ = true;
    }
    const auto& de = g.dense_edges();
    for (std::size_t e = 0; e < de.size(); ++e) {
      auto& c = slot_of(labels_.labels[e]);
      ++c.size;
      ++c.counts[de[e].first];
      ++c.counts[de[e].second];
    }
    for (auto& c : comms_) {
      if (c.size == 0) continue;
      auto it = B.log_beta.find(c.id);
      if (it != B.log_beta.end() && it->second.size() == n) {
        c.log_beta = it->second;
      } else {
        c.log_beta.assign(n, -std::log(static_cast<double>(std::max<std::size_t>(n, 1))));
      }
    }
  }

  const SnapshotGraph& graph() const noexcept { return *g_; }
  const EdgeAssignment& assignment() const noexcept { return labels_; }
  const std::vector<Community>& communities() const noexcept { return comms_; }
  /// True when the state runs under the recurrent prior.
  bool has_previous() const noexcept { return carried_; }
  CommunityId next_id() const noexcept { return ids_.next(); }

  const Community& community(CommunityId r) const { return comms_.at(index_.at(r)); }
  bool is_live(CommunityId r) const { return index_.count(r) != 0; }

  /// Communities with at least one edge in this snapshot.
  std::size_t num_occupied() const {
    return static_cast<std::size_t>(
        std::count_if(comms_.begin(), comms_.end(), [](const Community& c) { return c.size > 0; }));
  }

  /// Takes edge e out of the counts (leave-one-out). A community that drops
  /// to zero edges and was not alive at t-1 is pruned and its id retired.
  void detach_edge(std::size_t e) {
    const auto [i, j] = g_->dense_edges()[e];
    const std::size_t k = index_.at(labels_.labels[e]);
    auto& c = comms_[k];
    --c.size;
    --c.counts[i];
    --c.counts[j];
    if (c.size > 0) return;
    if (c.prev_size == 0) {
      remove_slot(k);
    } else {
      c.log_beta.clear();
    }
  }

  /// Attaches edge e to live community r. Reviving a carried community
  /// requires `revive_log_beta`.
  void attach_edge(std::size_t e, CommunityId r, std::vector<double> revive_log_beta = {}) {
    const auto [i, j] = g_->dense_edges()[e];
    auto& c = comms_.at(index_.at(r));
    if (c.size == 0) {
      if (revive_log_beta.size() != g_->num_nodes()) throw Error("reviving a community needs a beta");
      c.log_beta = std::move(revive_log_beta);
    }
    ++c.size;
    ++c.counts[i];
    ++c.counts[j];
    labels_.labels[e] = r;
  }

  /// Opens a fresh, still empty community; attach_edge must follow.
  CommunityId open_community() {
    const CommunityId r = ids_.fresh();
    slot_of(r);
    return r;
  }

  /// Redraws beta_r from Dir(N_r + gamma) for every occupied community.
  void resample_beta(double gamma, Rng& rng) {
    std::vector<double> conc(g_->num_nodes());
    for (auto& c : comms_) {
      if (c.size == 0) continue;
      for (std::size_t i = 0; i < conc.size(); ++i) conc[i] = gamma + static_cast<double>(c.counts[i]);
      c.log_beta = sample_log_dirichlet(conc, rng);
    }
  }

  /// Counts of occupied communities.
  CommunityStats stats() const {
    CommunityStats s;
    for (const auto& c : comms_) {
      if (c.size == 0) continue;
      s.sizes[c.id] = c.size;
      s.endpoint_counts[c.id] = c.counts;
    }
    return s;
  }

  /// Beta of every occupied community.
  BetaMatrix beta() const {
    BetaMatrix b;
    for (const auto& c : comms_)
      if (c.size > 0) b.log_beta[c.id] = c.log_beta;
    return b;
  }

  /// Recomputes counts from the assignment and compares with the incremental ones.
  bool consistent() const {
    const auto fresh = compute_stats(*g_, labels_);
    if (fresh != stats()) return false;
    std::size_t total = 0;
    for (const auto& c : comms_) {
      total += c.size;
      if (c.size == 0 && c.prev_size == 0) return false;
      if (c.log_beta.size() != (c.size > 0 ? g_->num_nodes() : 0)) return false;
    }
    return total == g_->num_edges();
  }

 private:
  Community& slot_of(CommunityId r) {
    auto [it, inserted] = index_.emplace(r, comms_.size());
    if (inserted) {
      auto& c = comms_.emplace_back();
      c.id = r;
      c.counts.assign(g_->num_nodes(), 0);
    }
    return comms_[it->second];
  }

  void remove_slot(std::size_t k) {
    index_.erase(comms_[k].id);
    if (k + 1 != comms_.size()) {
      comms_[k] = std::move(comms_.back());
      index_[comms_[k].id] = k;
    }
    comms_.pop_back();
  }

  const SnapshotGraph* g_;
  EdgeAssignment labels_;
  CommunityAllocator ids_;
  bool carried_;
  std::vector<Community> comms_;
  std::unordered_map<CommunityId, std::size_t> index_;
};

/// Result of one conditional draw: the community, plus a fresh beta when the
/// community is new or is a carried community being revived.
struct EdgeDraw {
  CommunityId community = 0;
  std::vector<double> log_beta;
};

/// Log weights of the conditional for detached edge e, one per community slot
/// of `s` followed by the new-community weight. An occupied community weighs
/// (n_{k,t} + n_{k,t-1}) beta_ik beta_jk. A community without current edges
/// has its beta integrated out: a carried one weighs n_{k,t-1} C(gamma_new)/C(gamma)
/// and a brand-new one alpha C(gamma_new)/C(gamma).
inline void conditional_log_weights(std::size_t e, const SamplerState& s, const HyperParams& h,
                                    std::vector<double>& out) {
  const auto [i, j] = s.graph().dense_edges()[e];
  const auto& comms = s.communities();
  const double log_ratio = log_new_group_weight(h.gamma, s.graph().num_nodes(), 1.0, i, j);
  out.resize(comms.size() + 1);
  for (std::size_t k = 0; k < comms.size(); ++k) {
    const auto& c = comms[k];
    if (c.size > 0) {
      out[k] = std::log(static_cast<double>(c.size + c.prev_size)) + c.log_beta[i] + c.log_beta[j];
    } else {
      out[k] = c.prev_size == 0 ? kNegInf : std::log(static_cast<double>(c.prev_size)) + log_ratio;
    }
  }
  out[comms.size()] = std::log(h.alpha) + log_ratio;
}

namespace detail {

/// Draws a community for detached edge e from conditional_log_weights. A new
/// or revived community gets the single-edge posterior Dir(gamma + e_i + e_j)
/// as its beta.
inline EdgeDraw draw_assignment(std::size_t e, SamplerState& s, const HyperParams& h, Rng& rng,
                                std::vector<double>& scratch) {
  const auto [i, j] = s.graph().dense_edges()[e];
  const auto& comms = s.communities();
  conditional_log_weights(e, s, h, scratch);
  const std::size_t pick = sample_log_categorical(scratch, rng);
  const bool needs_beta = pick >= comms.size() || comms[pick].size == 0;
  EdgeDraw d;
  if (needs_beta) {
    std::vector<double> conc(s.graph().num_nodes(), h.gamma);
    conc[i] += 1.0;
    conc[j] += 1.0;
    d.log_beta = sample_log_dirichlet(conc, rng);
  }
  if (pick < comms.size()) {
    d.community = comms[pick].id;
  } else {
    d.community = s.open_community();
  }
  return d;
}

}  // namespace detail

/// Static conditional for the first snapshot. Edge e must already be detached.
inline EdgeDraw sample_g_static(std::size_t e, SamplerState& s, const HyperParams& h, Rng& rng) {
  if (s.has_previous()) throw Error("static conditional used on a snapshot with history");
  std::vector<double> scratch;
  return detail::draw_assignment(e, s, h, rng, scratch);
}

/// Recurrent conditional for t > 1. Edge e must already be detached.
inline EdgeDraw sample_g_dynamic(std::size_t e, SamplerState& s, const HyperParams& h, Rng& rng) {
  if (!s.has_previous()) throw Error("recurrent conditional used on a snapshot without history");
  std::vector<double> scratch;
  return detail::draw_assignment(e, s, h, rng, scratch);
}

/// One pass: every edge is reassigned in a freshly shuffled order, then all
/// betas are redrawn.
inline void gibbs_sweep(SamplerState& s, const HyperParams& h, Rng& rng) {
  std::vector<std::size_t> order(s.graph().num_edges());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<double> scratch;
  for (std::size_t e : order) {
    s.detach_edge(e);
    auto d = detail::draw_assignment(e, s, h, rng, scratch);
    s.attach_edge(e, d.community, std::move(d.log_beta));
  }
  s.resample_beta(h.gamma, rng);
}

struct SampleRecord {
  EdgeAssignment G;
  std::optional<BetaMatrix> B;
  Cover cover;
  double modularity = 0.0;
  std::size_t sweep_index = 0;
};

struct SnapshotRun {
  std::vector<SampleRecord> records;
  CommunityId next_id = 0;
};

struct RunOptions {
  bool keep_beta = true;
  /// Overrides the h.s_first / h.s_later sweep count when nonzero.
  std::size_t sweeps = 0;
};

inline Cover cover_of(const SamplerState& s, double theta) {
  return extract_cover(soft_membership(s.beta(), s.stats(), s.graph()), theta);
}

/// Builds the chain for snapshot g (carry-over when `prev` is given), then
/// records one sample per sweep with its theta-cover and extended modularity.
inline SnapshotRun run_snapshot(const SnapshotGraph& g, const PrevSummary* prev,
                                const HyperParams& h, std::uint64_t seed,
                                const RunOptions& opt = {}) {
  h.check();
  Rng rng(seed);
  CommunityAllocator ids(prev ? prev->next_id : 0);
  SnapshotRun run;
  if (g.num_edges() == 0) {
    run.records.push_back(SampleRecord{{}, BetaMatrix{}, Cover{}, 0.0, 0});
    run.next_id = ids.next();
    return run;
  }
  const bool history = prev && !prev->sizes.empty();
  EdgeAssignment G = history ? init_assignments_carry(g, *prev, ids, rng)
                             : init_assignments_first(g, h, ids, rng);
  const BetaMatrix B = init_beta_mle(g, G);
  static const std::map<CommunityId, std::size_t> kNoHistory;
  SamplerState state(g, std::move(G), B, history ? prev->sizes : kNoHistory, ids);
  const std::size_t sweeps = opt.sweeps ? opt.sweeps : (prev ? h.s_later : h.s_first);
  run.records.reserve(sweeps);
  for (std::size_t n = 0; n < sweeps; ++n) {
    gibbs_sweep(state, h, rng);
    SampleRecord rec;
    rec.G = state.assignment();
    if (opt.keep_beta) rec.B = state.beta();
    rec.cover = cover_of(state, h.theta);
    rec.modularity = extended_modularity(rec.cover, g);
    rec.sweep_index = n;
    run.records.push_back(std::move(rec));
  }
  run.next_id = state.next_id();
  return run;
}

/// Sample with maximum extended modularity; ties go to the later sweep.
inline const SampleRecord& select_best(const std::vector<SampleRecord>& records) {
  std::vector<double> q;
  q.reserve(records.size());
  for (const auto& r : records) q.push_back(r.modularity);
  return records[select_best_index(q)];
}

}  // namespace dyncomm
