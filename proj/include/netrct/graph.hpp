#pragma once

// Connected Watts-Strogatz graphs in compressed adjacency form, plus the
// degree statistics and treatment-relative partitions used by experiments.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

namespace netrct {

using NodeId = std::uint32_t;
using NodeSet = std::vector<NodeId>;

struct WattsStrogatzParams {
  std::uint32_t n = 0;
  std::uint32_t k = 0;  // mean degree; even, ring lattice uses k/2 per side
  double p = 0.0;       // rewiring probability
  std::uint64_t seed = 0;

  /// Throws parameter_error unless n >= 3, k even and positive, k < n, p in [0,1].
  void validate() const;
};

/// Undirected simple graph with sorted adjacency lists. Immutable once built.
class Graph {
 public:
  Graph() = default;

  /// Builds from per-node neighbour lists. Lists are sorted and checked for
  /// symmetry, self-loops and duplicates; violations throw parameter_error.
  explicit Graph(std::vector<std::vector<NodeId>> adjacency);

  std::size_t node_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return targets_.size() / 2; }

  std::span<const NodeId> neighbours(NodeId node) const noexcept {
    return {targets_.data() + offsets_[node], targets_.data() + offsets_[node + 1]};
  }
  std::size_t degree(NodeId node) const noexcept {
    return offsets_[node + 1] - offsets_[node];
  }

  bool connected() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> targets_;
};

/// Ring lattice rewired edge by edge, retried on fresh substreams of the seed
/// until connected (at most kMaxGenerationAttempts).
Graph generate_watts_strogatz(const WattsStrogatzParams& params);

inline constexpr int kMaxGenerationAttempts = 100;

using DegreeHistogram = std::map<std::size_t, std::size_t>;

DegreeHistogram degree_histogram(const Graph& g);

/// Arithmetic mean degree over `nodes`.
double mean_degree_of(const Graph& g, std::span<const NodeId> nodes);

enum class GroupLabel : std::uint8_t { treatment = 0, neighbour = 1, rest = 2 };

/// Treatment, its non-treated neighbours, and everything else. Control is the
/// union of neighbours and rest.
struct GroupPartition {
  NodeSet treatment;
  NodeSet neighbours;
  NodeSet rest;
  std::vector<GroupLabel> labels;  // per node

  /// Sorted union of neighbours and rest.
  NodeSet control() const;
  std::size_t control_size() const noexcept { return neighbours.size() + rest.size(); }

  /// Partition with no treatment: every node in rest.
  static GroupPartition untreated(std::size_t n);
};

GroupPartition partition_by_treatment(const Graph& g, std::span<const NodeId> treatment);

/// Fraction of (member, neighbour) incidences whose neighbour is also a member.
double within_group_edge_fraction(const Graph& g, std::span<const NodeId> group);

/// 1 - |distinct outside neighbours| / total member degree. Near 1 when the
/// members' edges mostly stay inside or converge on few outside nodes.
double neighbour_overlap_fraction(const Graph& g, std::span<const NodeId> group);

/// Membership mask of length n; throws parameter_error on out-of-range or
/// duplicate ids.
std::vector<std::uint8_t> membership_mask(std::size_t n, std::span<const NodeId> nodes);

/// Edge list with a "# n=.. k=.. p=.. seed=.." header, one "u v" (u < v) per line.
void write_edge_list(std::ostream& out, const Graph& g, const WattsStrogatzParams& params);

/// Parses the format written by write_edge_list.
Graph read_edge_list(std::istream& in);

}  // namespace netrct
