#pragma once

// Balanced coupling graphs and the matrices of the synchronization analysis.
//
//   G : 2n x 2n Laplacian with phase rotations, G_ii = m_i I,
//       G_ij = -(rho_i / rho_j) R(delta_ij) for j in N_i.
//   L : the plain graph Laplacian (Kronecker product with I_2).
//   T : block-diagonal, block j = (rho_1 / rho_j) R(delta_1j), so that
//       z = T x and G = T^-1 L T.
//   V : orthonormal basis of the complement of the stacked-identity block 1.
//
// The network synchronizes globally and exponentially when
// k * lambda_min(V^T (L + L^T) V / 2) > lambda.

#include <algorithm>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cpgflight/common.hpp"
#include "cpgflight/graph.hpp"
#include "cpgflight/oscillator.hpp"

namespace cpgflight {

inline constexpr double kPhaseTolerance = 1e-9;

struct TopologyReport {
  bool valid = true;
  std::string message;
  std::optional<std::size_t> node;  ///< offending node (zero-based)
  std::optional<std::size_t> edge;  ///< offending edge index

  explicit operator bool() const { return valid; }
};

namespace detail {

// Undirected adjacency with (neighbour, edge index) pairs in edge-list order,
// so every traversal is deterministic.
inline std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adjacency(
    const NetworkTopology& topo) {
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(topo.n);
  for (std::size_t e = 0; e < topo.edges.size(); ++e) {
    adj[topo.edges[e].to].push_back({topo.edges[e].from, e});
    adj[topo.edges[e].from].push_back({topo.edges[e].to, e});
  }
  return adj;
}

// Breadth-first phase assignment within every component. phase[i] is the
// phase lead of node i over its component root.
inline std::vector<std::optional<double>> propagate_phases(
    const NetworkTopology& topo, std::size_t root,
    std::vector<std::optional<double>> phase = {}) {
  if (phase.empty()) phase.assign(topo.n, std::nullopt);
  const auto adj = adjacency(topo);
  std::deque<std::size_t> queue{root};
  phase[root] = 0.0;
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    for (const auto& [j, e] : adj[i]) {
      if (phase[j]) continue;
      const Edge& edge = topo.edges[e];
      // delta_{to,from} = phase[to] - phase[from]
      phase[j] = (edge.to == j) ? *phase[i] + edge.delta
                                : *phase[i] - edge.delta;
      queue.push_back(j);
    }
  }
  return phase;
}

}  // namespace detail

/// Checks node indices, balancedness (in-degree == out-degree per node) and
/// cycle consistency (phase shifts around every cycle sum to 0 mod 2pi).
inline TopologyReport validate_topology(const NetworkTopology& topo) {
  TopologyReport rep;
  auto fail = [&](std::string msg, std::optional<std::size_t> node,
                  std::optional<std::size_t> edge) {
    rep.valid = false;
    rep.message = std::move(msg);
    rep.node = node;
    rep.edge = edge;
    return rep;
  };
  if (topo.n == 0) return fail("network has no oscillators", std::nullopt, std::nullopt);
  if (!std::isfinite(topo.k) || topo.k < 0.0)
    return fail("coupling gain k must be finite and >= 0", std::nullopt, std::nullopt);

  for (std::size_t e = 0; e < topo.edges.size(); ++e) {
    const Edge& edge = topo.edges[e];
    const std::string label = "edge " + std::to_string(edge.to + 1) + "<-" +
                              std::to_string(edge.from + 1);
    if (edge.to >= topo.n || edge.from >= topo.n)
      return fail(label + " references a node outside 1.." +
                      std::to_string(topo.n),
                  std::nullopt, e);
    if (edge.to == edge.from) return fail(label + " is a self-loop", edge.to, e);
    if (!std::isfinite(edge.delta))
      return fail(label + " has a non-finite phase shift", std::nullopt, e);
    for (std::size_t f = 0; f < e; ++f) {
      if (topo.edges[f].to == edge.to && topo.edges[f].from == edge.from)
        return fail(label + " is duplicated", std::nullopt, e);
    }
  }

  std::vector<int> in_deg(topo.n, 0), out_deg(topo.n, 0);
  for (const Edge& edge : topo.edges) {
    ++in_deg[edge.to];
    ++out_deg[edge.from];
  }
  for (std::size_t i = 0; i < topo.n; ++i) {
    if (in_deg[i] != out_deg[i])
      return fail("graph is not balanced at node " + std::to_string(i + 1) +
                      " (in-degree " + std::to_string(in_deg[i]) +
                      ", out-degree " + std::to_string(out_deg[i]) + ")",
                  i, std::nullopt);
  }

  std::vector<std::optional<double>> phase(topo.n);
  for (std::size_t root = 0; root < topo.n; ++root) {
    if (!phase[root]) phase = detail::propagate_phases(topo, root, phase);
  }
  for (std::size_t e = 0; e < topo.edges.size(); ++e) {
    const Edge& edge = topo.edges[e];
    const double mismatch =
        wrap_angle(*phase[edge.to] - *phase[edge.from] - edge.delta);
    if (std::abs(mismatch) > kPhaseTolerance)
      return fail("phase shifts around the cycle through edge " +
                      std::to_string(edge.to + 1) + "<-" +
                      std::to_string(edge.from + 1) + " do not sum to 0 mod 360 deg (off by " +
                      std::to_string(rad2deg(mismatch)) + " deg)",
                  std::nullopt, e);
  }
  return rep;
}

inline void require_valid(const NetworkTopology& topo) {
  const TopologyReport rep = validate_topology(topo);
  if (!rep.valid) {
    std::string where = "topology";
    if (rep.edge) where += ".edges[" + std::to_string(*rep.edge) + "]";
    else if (rep.node) where += ".node " + std::to_string(*rep.node + 1);
    throw ValidationError(where, rep.message);
  }
}

inline bool is_connected(const NetworkTopology& topo) {
  if (topo.n == 0) return false;
  const auto phase = detail::propagate_phases(topo, 0);
  return std::all_of(phase.begin(), phase.end(),
                     [](const auto& p) { return p.has_value(); });
}

/// Phase lead of every node over node 1 (node 1 itself is 0). Requires a
/// valid, connected topology; phases are wrapped to (-pi, pi].
inline std::vector<double> node_phases(const NetworkTopology& topo) {
  const auto phase = detail::propagate_phases(topo, 0);
  std::vector<double> out(topo.n);
  for (std::size_t i = 0; i < topo.n; ++i) {
    if (!phase[i])
      throw ValidationError("topology.node " + std::to_string(i + 1),
                            "graph is disconnected; relative phase to node 1 "
                            "is undefined");
    out[i] = wrap_angle(*phase[i]);
  }
  return out;
}

/// Same graph with every edge shift re-derived from absolute node phases, so
/// cycle consistency holds by construction.
inline NetworkTopology with_node_phases(NetworkTopology topo,
                                        std::span<const double> phases) {
  if (phases.size() != topo.n)
    throw DomainError("with_node_phases: need one phase per node");
  for (Edge& e : topo.edges) e.delta = wrap_angle(phases[e.to] - phases[e.from]);
  return topo;
}

struct CouplingMatrices {
  MatX G, L, T, V;
  std::vector<double> phases;  ///< phase lead over node 1, per node
  std::vector<double> radii;   ///< rho_i the matrices were built from

  std::size_t n() const { return radii.size(); }

  /// True when `params` carry the radii these matrices were built for.
  bool matches(std::span<const HopfParams> params) const {
    if (params.size() != radii.size()) return false;
    for (std::size_t i = 0; i < radii.size(); ++i)
      if (params[i].rho != radii[i]) return false;
    return true;
  }
};

/// Orthonormal 2n x 2(n-1) basis of the complement of span{1 e1, 1 e2}.
inline MatX sync_complement_basis(std::size_t n) {
  MatX ones = MatX::Zero(2 * n, 2);
  for (std::size_t i = 0; i < n; ++i) ones.block<2, 2>(2 * i, 0) = Mat2::Identity();
  ones /= std::sqrt(static_cast<double>(n));
  Eigen::HouseholderQR<MatX> qr(ones);
  const MatX q = qr.householderQ() * MatX::Identity(2 * n, 2 * n);
  return q.rightCols(2 * (n - 1));
}

inline CouplingMatrices build_matrices(const NetworkTopology& topo,
                                       std::span<const double> radii) {
  require_valid(topo);
  if (radii.size() != topo.n)
    throw DomainError("build_matrices: need one radius per node");
  for (double r : radii)
    if (!(r > 0.0) || !std::isfinite(r))
      throw DomainError("build_matrices: radii must be positive and finite");
  if (!is_connected(topo))
    throw ValidationError("topology", "graph is disconnected; relative phases "
                                      "are undefined across components");

  const std::size_t n = topo.n;
  CouplingMatrices m;
  m.radii.assign(radii.begin(), radii.end());
  m.phases = node_phases(topo);
  m.G = MatX::Zero(2 * n, 2 * n);
  m.L = MatX::Zero(2 * n, 2 * n);
  m.T = MatX::Zero(2 * n, 2 * n);
  for (const Edge& e : topo.edges) {
    const std::size_t i = e.to, j = e.from;
    m.G.block<2, 2>(2 * i, 2 * i) += Mat2::Identity();
    m.L.block<2, 2>(2 * i, 2 * i) += Mat2::Identity();
    m.G.block<2, 2>(2 * i, 2 * j) -= (radii[i] / radii[j]) * rotation2(e.delta);
    m.L.block<2, 2>(2 * i, 2 * j) -= Mat2::Identity();
  }
  for (std::size_t j = 0; j < n; ++j) {
    // delta_1j = -(phase lead of j over 1)
    m.T.block<2, 2>(2 * j, 2 * j) =
        (radii[0] / radii[j]) * rotation2(-m.phases[j]);
  }
  m.V = n >= 2 ? sync_complement_basis(n) : MatX(2 * n, 0);
  return m;
}

inline CouplingMatrices build_matrices(const NetworkTopology& topo,
                                       std::span<const HopfParams> params) {
  std::vector<double> radii;
  radii.reserve(params.size());
  for (const auto& p : params) radii.push_back(p.rho);
  return build_matrices(topo, radii);
}

struct SyncThreshold {
  double lambda_min = 0.0;  ///< lambda_min(V^T (L + L^T) V / 2)
  double k_min = 0.0;       ///< lambda / lambda_min; infinite if unverifiable
  bool verifiable = false;  ///< lambda_min > 0
};

inline SyncThreshold sync_gain_threshold(const CouplingMatrices& mat,
                                         double lambda) {
  if (mat.n() < 2)
    throw DomainError("sync_gain_threshold: needs at least two oscillators");
  if (!(lambda > 0.0)) throw DomainError("sync_gain_threshold: lambda must be > 0");
  const MatX sym = (mat.L + mat.L.transpose()) / 2.0;
  const MatX reduced = mat.V.transpose() * sym * mat.V;
  Eigen::SelfAdjointEigenSolver<MatX> eig(reduced, Eigen::EigenvaluesOnly);
  SyncThreshold out;
  out.lambda_min = eig.eigenvalues().minCoeff();
  out.verifiable = out.lambda_min > 1e-12;
  out.k_min = out.verifiable ? lambda / out.lambda_min
                             : std::numeric_limits<double>::infinity();
  return out;
}

/// ||V^T T {x}||, zero exactly on the synchronized manifold.
inline double sync_error(const NetworkState& net, const CouplingMatrices& mat) {
  if (net.size() != mat.n())
    throw DomainError("sync_error: network and matrices differ in size");
  if (mat.n() < 2) return 0.0;
  return (mat.V.transpose() * (mat.T * net.stacked_shifted())).norm();
}

/// Graph configuration A: two four-node rings (flap, pitch, lead-lag, second
/// flap joint per wing) joined by a bidirectional link between the two
/// flapping oscillators. Nominal phase shifts delta_21 = delta_65 = 90 deg and
/// delta_31 = delta_75 = -90 deg.
inline NetworkTopology config_a(double k) {
  const double d90 = deg2rad(90.0), d180 = deg2rad(180.0);
  NetworkTopology t;
  t.n = 8;
  t.k = k;
  // edges as (to, from, delta_to_from), zero-based
  t.edges = {
      {1, 0, d90},  {2, 1, -d180}, {3, 2, 0.0}, {0, 3, d90},
      {0, 4, 0.0},  {4, 0, 0.0},
      {5, 4, d90},  {6, 5, -d180}, {7, 6, 0.0}, {4, 7, d90},
  };
  return t;
}

}  // namespace cpgflight
