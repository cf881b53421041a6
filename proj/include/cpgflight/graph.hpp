#pragma once

#include <cstddef>
#include <vector>

namespace cpgflight {

/// Directed coupling i <- j: oscillator `to` receives the phase-rotated state
/// of oscillator `from`. `delta` is the phase lead of `to` over `from` (rad).
struct Edge {
  std::size_t to = 0;
  std::size_t from = 0;
  double delta = 0.0;

  bool operator==(const Edge&) const = default;
};

/// CPG coupling graph. Node indices are zero-based here; scenario files use
/// one-based indices.
struct NetworkTopology {
  std::size_t n = 0;
  std::vector<Edge> edges;
  double k = 0.0;  ///< coupling gain, 1/s

  bool operator==(const NetworkTopology&) const = default;
};

}  // namespace cpgflight
