#pragma once

// Probability kernels of the link-community model: CRP / recurrent CRP table
// weights, the per-edge likelihood, the new-community marginal and joint
// scores. Node arguments are dense snapshot indices (SnapshotGraph::index_of).

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "dyncomm/graph.hpp"

namespace dyncomm {

using CommunityId = std::uint64_t;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct HyperParams {
  double alpha = 0.1;
  double gamma = 0.1;
  double theta = 0.7;
  std::size_t s_first = 100;
  std::size_t s_later = 50;
  std::size_t k0_divisor = 5;

  void check() const {
    if (!(alpha > 0.0)) throw Error("alpha must be positive");
    if (!(gamma > 0.0)) throw Error("gamma must be positive");
    if (!(theta > 0.0 && theta <= 1.0)) throw Error("theta must lie in (0, 1]");
    if (s_first == 0 || s_later == 0) throw Error("sample counts must be positive");
    if (k0_divisor == 0) throw Error("k0 divisor must be positive");
  }
};

/// Community label per edge, aligned with SnapshotGraph::edges().
struct EdgeAssignment {
  std::vector<CommunityId> labels;

  friend bool operator==(const EdgeAssignment&, const EdgeAssignment&) = default;
};

/// n_r and N_ir. Endpoint counts are dense vectors over the snapshot's nodes.
struct CommunityStats {
  std::map<CommunityId, std::size_t> sizes;
  std::map<CommunityId, std::vector<std::size_t>> endpoint_counts;

  std::size_t size_of(CommunityId r) const {
    auto it = sizes.find(r);
    return it == sizes.end() ? 0 : it->second;
  }

  friend bool operator==(const CommunityStats&, const CommunityStats&) = default;
};

inline CommunityStats compute_stats(const SnapshotGraph& g, const EdgeAssignment& G) {
  if (G.labels.size() != g.num_edges()) throw Error("assignment does not cover every edge");
  CommunityStats s;
  const auto& de = g.dense_edges();
  for (std::size_t e = 0; e < de.size(); ++e) {
    const CommunityId r = G.labels[e];
    ++s.sizes[r];
    auto& counts = s.endpoint_counts[r];
    if (counts.empty()) counts.assign(g.num_nodes(), 0);
    ++counts[de[e].first];
    ++counts[de[e].second];
  }
  return s;
}

/// Node-importance vectors, stored as logs (log 0 = -inf).
struct BetaMatrix {
  std::map<CommunityId, std::vector<double>> log_beta;

  static BetaMatrix from_probabilities(const std::map<CommunityId, std::vector<double>>& p) {
    BetaMatrix b;
    for (const auto& [r, v] : p) {
      auto& lv = b.log_beta[r];
      lv.reserve(v.size());
      for (double x : v) lv.push_back(x > 0.0 ? std::log(x) : kNegInf);
    }
    return b;
  }

  const std::vector<double>& log_of(CommunityId r) const {
    auto it = log_beta.find(r);
    if (it == log_beta.end()) throw Error("unknown community " + std::to_string(r));
    return it->second;
  }

  double prob(CommunityId r, std::size_t i) const { return std::exp(log_of(r).at(i)); }

  std::vector<double> probabilities(CommunityId r) const {
    std::vector<double> out;
    for (double x : log_of(r)) out.push_back(std::exp(x));
    return out;
  }
};

/// Unnormalized table weights: one per existing table plus the new table.
struct TableWeights {
  std::map<CommunityId, double> existing;
  double new_table = 0.0;

  /// Existing tables in id order, followed by the new table.
  std::vector<double> normalized() const {
    double total = new_table;
    for (const auto& [r, w] : existing) total += w;
    std::vector<double> out;
    for (const auto& [r, w] : existing) out.push_back(w / total);
    out.push_back(new_table / total);
    return out;
  }
};

inline TableWeights crp_weights(const std::map<CommunityId, std::size_t>& sizes, double alpha) {
  TableWeights w;
  for (const auto& [r, n] : sizes)
    if (n > 0) w.existing[r] = static_cast<double>(n);
  w.new_table = alpha;
  return w;
}

/// Tables used yesterday get n_{k,t-1} + n_{k,t}; tables opened today get
/// n_{k,t}. The shared denominator cancels under normalization.
inline TableWeights rcrp_weights(const std::map<CommunityId, std::size_t>& prev,
                                 const std::map<CommunityId, std::size_t>& cur, double alpha) {
  TableWeights w;
  for (const auto& [r, n] : prev)
    if (n > 0) w.existing[r] = static_cast<double>(n);
  for (const auto& [r, n] : cur)
    if (n > 0) w.existing[r] += static_cast<double>(n);
  w.new_table = alpha;
  return w;
}

inline double edge_likelihood(const BetaMatrix& B, CommunityId r, std::size_t i, std::size_t j) {
  const auto& lb = B.log_of(r);
  return std::exp(lb.at(i) + lb.at(j));
}

/// log[alpha * C(gamma_new) / C(gamma)] for a Dirichlet whose entries i and j
/// are incremented by one: alpha * g_i g_j / (g0 (g0 + 1)).
inline double log_new_group_weight(std::span<const double> gamma, double alpha, std::size_t i,
                                   std::size_t j) {
  if (i == j) throw Error("new-group weight undefined for a self-loop");
  double g0 = 0.0;
  for (double g : gamma) g0 += g;
  return std::log(alpha) + std::log(gamma[i]) + std::log(gamma[j]) - std::log(g0) -
         std::log(g0 + 1.0);
}

/// Scalar-gamma form; i and j only need to be distinct.
inline double log_new_group_weight(double gamma, std::size_t n, double alpha, std::size_t i,
                                   std::size_t j) {
  if (i == j) throw Error("new-group weight undefined for a self-loop");
  const double g0 = gamma * static_cast<double>(n);
  return std::log(alpha) + 2.0 * std::log(gamma) - std::log(g0) - std::log(g0 + 1.0);
}

inline double new_group_weight(double gamma, std::size_t n, double alpha, std::size_t i,
                               std::size_t j) {
  return std::exp(log_new_group_weight(gamma, n, alpha, i, j));
}

/// log C(a) with C the Dirichlet normalizer prod Gamma(a_l) / Gamma(sum a_l).
inline double log_dirichlet_normalizer(std::span<const double> a) {
  double s = 0.0, acc = 0.0;
  for (double x : a) {
    s += x;
    acc += std::lgamma(x);
  }
  return acc - std::lgamma(s);
}

/// Exchangeable partition probability of the CRP:
/// alpha^K prod Gamma(n_r) Gamma(alpha) / Gamma(alpha + M).
inline double log_crp_partition(const std::map<CommunityId, std::size_t>& sizes, double alpha) {
  double out = std::lgamma(alpha);
  std::size_t m = 0;
  for (const auto& [r, n] : sizes) {
    if (n == 0) continue;
    out += std::log(alpha) + std::lgamma(static_cast<double>(n));
    m += n;
  }
  return out - std::lgamma(alpha + static_cast<double>(m));
}

/// log p(G, B, A | alpha, gamma) over existing edges.
inline double log_joint(const EdgeAssignment& G, const BetaMatrix& B, const SnapshotGraph& g,
                        const HyperParams& h) {
  const auto stats = compute_stats(g, G);
  double lik = 0.0;
  const auto& de = g.dense_edges();
  for (std::size_t e = 0; e < de.size(); ++e) {
    const auto& lb = B.log_of(G.labels[e]);
    const double term = lb.at(de[e].first) + lb.at(de[e].second);
    if (term == kNegInf) return kNegInf;
    lik += term;
  }
  const std::vector<double> gamma(g.num_nodes(), h.gamma);
  const double log_c = log_dirichlet_normalizer(gamma);
  double prior_beta = 0.0;
  for (const auto& [r, n] : stats.sizes) {
    const auto& lb = B.log_of(r);
    prior_beta -= log_c;
    for (double x : lb) prior_beta += (h.gamma - 1.0) * x;
  }
  return log_crp_partition(stats.sizes, h.alpha) + lik + prior_beta;
}

/// log p(G, A | alpha, gamma) with every beta_r integrated out. Exact but
/// only practical for scoring; the sampler never calls it.
inline double collapsed_partition_score(const EdgeAssignment& G, const SnapshotGraph& g,
                                        const HyperParams& h) {
  const auto stats = compute_stats(g, G);
  const std::vector<double> gamma(g.num_nodes(), h.gamma);
  const double log_c = log_dirichlet_normalizer(gamma);
  double out = log_crp_partition(stats.sizes, h.alpha);
  std::vector<double> post(g.num_nodes());
  for (const auto& [r, counts] : stats.endpoint_counts) {
    for (std::size_t i = 0; i < post.size(); ++i) post[i] = h.gamma + static_cast<double>(counts[i]);
    out += log_dirichlet_normalizer(post) - log_c;
  }
  return out;
}

}  // namespace dyncomm
