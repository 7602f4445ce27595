#include "netrct/graph.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "netrct/errors.hpp"
#include "netrct/rng.hpp"

namespace netrct {

namespace {

using AdjacencyLists = std::vector<std::vector<NodeId>>;

bool contains(const std::vector<NodeId>& sorted, NodeId v) {
  return std::binary_search(sorted.begin(), sorted.end(), v);
}

void insert_sorted(std::vector<NodeId>& sorted, NodeId v) {
  sorted.insert(std::lower_bound(sorted.begin(), sorted.end(), v), v);
}

void erase_sorted(std::vector<NodeId>& sorted, NodeId v) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), v);
  if (it != sorted.end() && *it == v) sorted.erase(it);
}

AdjacencyLists ring_lattice(std::uint32_t n, std::uint32_t k) {
  AdjacencyLists adj(n);
  const std::uint32_t half = k / 2;
  for (std::uint32_t i = 0; i < n; ++i) {
    auto& row = adj[i];
    row.reserve(k + 8);
    for (std::uint32_t j = 1; j <= half; ++j) {
      row.push_back((i + j) % n);
      row.push_back((i + n - j) % n);
    }
    std::sort(row.begin(), row.end());
  }
  return adj;
}

// Original lattice edges as (u, v), u < v, in ascending order.
std::vector<std::pair<NodeId, NodeId>> lattice_edges(const AdjacencyLists& lattice) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::size_t total = 0;
  for (const auto& row : lattice) total += row.size();
  edges.reserve(total / 2);
  for (NodeId u = 0; u < lattice.size(); ++u) {
    for (NodeId v : lattice[u]) {
      if (u < v) edges.emplace_back(u, v);
    }
  }
  return edges;
}

void rewire(AdjacencyLists& adj, const std::vector<std::pair<NodeId, NodeId>>& edges,
            double p, CounterStream& rng) {
  const auto n = static_cast<std::uint64_t>(adj.size());
  for (auto [u, v] : edges) {
    if (!(rng.uniform01() < p)) continue;
    auto& row = adj[u];
    if (row.size() + 1 >= n) continue;  // u already touches every node
    NodeId w;
    do {
      w = static_cast<NodeId>(rng.below(n));
    } while (w == u || contains(row, w));
    erase_sorted(row, v);
    erase_sorted(adj[v], u);
    insert_sorted(row, w);
    insert_sorted(adj[w], u);
  }
}

bool lists_connected(const AdjacencyLists& adj) {
  if (adj.empty()) return true;
  std::vector<std::uint8_t> seen(adj.size(), 0);
  std::vector<NodeId> frontier{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    NodeId u = frontier.back();
    frontier.pop_back();
    for (NodeId v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        frontier.push_back(v);
      }
    }
  }
  return reached == adj.size();
}

}  // namespace

void WattsStrogatzParams::validate() const {
  if (n < 3) throw parameter_error("n must be at least 3");
  if (k == 0 || k % 2 != 0) throw parameter_error("k must be a positive even integer");
  if (k >= n) throw parameter_error("k must be smaller than n");
  if (!(p >= 0.0 && p <= 1.0)) throw parameter_error("p must lie in [0, 1]");
}

Graph::Graph(std::vector<std::vector<NodeId>> adjacency) {
  const std::size_t n = adjacency.size();
  offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto& row = adjacency[i];
    std::sort(row.begin(), row.end());
    if (std::adjacent_find(row.begin(), row.end()) != row.end())
      throw parameter_error("duplicate neighbour at node " + std::to_string(i));
    if (std::binary_search(row.begin(), row.end(), static_cast<NodeId>(i)))
      throw parameter_error("self-loop at node " + std::to_string(i));
    if (!row.empty() && row.back() >= n)
      throw parameter_error("neighbour id out of range at node " + std::to_string(i));
    offsets_[i + 1] = offsets_[i] + row.size();
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (NodeId j : adjacency[i]) {
      if (!std::binary_search(adjacency[j].begin(), adjacency[j].end(), static_cast<NodeId>(i)))
        throw parameter_error("asymmetric edge " + std::to_string(i) + "-" + std::to_string(j));
    }
  }
  targets_.reserve(offsets_[n]);
  for (auto& row : adjacency) {
    targets_.insert(targets_.end(), row.begin(), row.end());
    std::vector<NodeId>().swap(row);
  }
}

bool Graph::connected() const {
  const std::size_t n = node_count();
  if (n == 0) return true;
  std::vector<std::uint8_t> seen(n, 0);
  std::vector<NodeId> frontier{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    NodeId u = frontier.back();
    frontier.pop_back();
    for (NodeId v : neighbours(u)) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        frontier.push_back(v);
      }
    }
  }
  return reached == n;
}

Graph generate_watts_strogatz(const WattsStrogatzParams& params) {
  params.validate();
  const AdjacencyLists lattice = ring_lattice(params.n, params.k);
  if (params.p == 0.0) return Graph(lattice);

  const auto edges = lattice_edges(lattice);
  for (int attempt = 0; attempt < kMaxGenerationAttempts; ++attempt) {
    CounterStream rng(derive_key(params.seed, {0x57a7, static_cast<std::uint64_t>(attempt)}));
    AdjacencyLists adj = lattice;
    rewire(adj, edges, params.p, rng);
    if (lists_connected(adj)) return Graph(std::move(adj));
  }
  throw generation_error("no connected graph after " + std::to_string(kMaxGenerationAttempts) +
                         " attempts");
}

DegreeHistogram degree_histogram(const Graph& g) {
  DegreeHistogram hist;
  for (NodeId i = 0; i < g.node_count(); ++i) ++hist[g.degree(i)];
  return hist;
}

double mean_degree_of(const Graph& g, std::span<const NodeId> nodes) {
  if (nodes.empty()) throw parameter_error("mean degree of an empty node set");
  std::size_t total = 0;
  for (NodeId i : nodes) {
    if (i >= g.node_count()) throw parameter_error("node id out of range");
    total += g.degree(i);
  }
  return static_cast<double>(total) / static_cast<double>(nodes.size());
}

std::vector<std::uint8_t> membership_mask(std::size_t n, std::span<const NodeId> nodes) {
  std::vector<std::uint8_t> mask(n, 0);
  for (NodeId i : nodes) {
    if (i >= n) throw parameter_error("node id " + std::to_string(i) + " out of range");
    if (mask[i]) throw parameter_error("duplicate node id " + std::to_string(i));
    mask[i] = 1;
  }
  return mask;
}

NodeSet GroupPartition::control() const {
  NodeSet out;
  out.reserve(control_size());
  std::merge(neighbours.begin(), neighbours.end(), rest.begin(), rest.end(),
             std::back_inserter(out));
  return out;
}

GroupPartition GroupPartition::untreated(std::size_t n) {
  GroupPartition part;
  part.rest.resize(n);
  for (std::size_t i = 0; i < n; ++i) part.rest[i] = static_cast<NodeId>(i);
  part.labels.assign(n, GroupLabel::rest);
  return part;
}

GroupPartition partition_by_treatment(const Graph& g, std::span<const NodeId> treatment) {
  if (treatment.empty()) throw parameter_error("treatment set is empty");
  const std::size_t n = g.node_count();
  const auto treated = membership_mask(n, treatment);

  GroupPartition part;
  part.labels.assign(n, GroupLabel::rest);
  for (NodeId i = 0; i < n; ++i) {
    if (treated[i]) {
      part.labels[i] = GroupLabel::treatment;
      for (NodeId j : g.neighbours(i)) {
        if (!treated[j]) part.labels[j] = GroupLabel::neighbour;
      }
    }
  }
  for (NodeId i = 0; i < n; ++i) {
    switch (part.labels[i]) {
      case GroupLabel::treatment: part.treatment.push_back(i); break;
      case GroupLabel::neighbour: part.neighbours.push_back(i); break;
      case GroupLabel::rest: part.rest.push_back(i); break;
    }
  }
  return part;
}

double within_group_edge_fraction(const Graph& g, std::span<const NodeId> group) {
  if (group.empty()) throw parameter_error("within-group fraction of an empty group");
  const auto member = membership_mask(g.node_count(), group);
  std::size_t inside = 0;
  std::size_t total = 0;
  for (NodeId i : group) {
    for (NodeId j : g.neighbours(i)) inside += member[j];
    total += g.degree(i);
  }
  return total == 0 ? 0.0 : static_cast<double>(inside) / static_cast<double>(total);
}

double neighbour_overlap_fraction(const Graph& g, std::span<const NodeId> group) {
  if (group.empty()) throw parameter_error("neighbour overlap of an empty group");
  const auto member = membership_mask(g.node_count(), group);
  std::vector<std::uint8_t> outside(g.node_count(), 0);
  std::size_t distinct = 0;
  std::size_t total = 0;
  for (NodeId i : group) {
    for (NodeId j : g.neighbours(i)) {
      if (!member[j] && !outside[j]) {
        outside[j] = 1;
        ++distinct;
      }
    }
    total += g.degree(i);
  }
  if (total == 0) return 0.0;
  return 1.0 - static_cast<double>(distinct) / static_cast<double>(total);
}

void write_edge_list(std::ostream& out, const Graph& g, const WattsStrogatzParams& params) {
  char pbuf[64];
  std::snprintf(pbuf, sizeof pbuf, "%.12g", params.p);
  out << "# n=" << params.n << " k=" << params.k << " p=" << pbuf << " seed=" << params.seed
      << '\n';
  for (NodeId u = 0; u < g.node_count(); ++u) {
    for (NodeId v : g.neighbours(u)) {
      if (u < v) out << u << ' ' << v << '\n';
    }
  }
}

Graph read_edge_list(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
    throw parameter_error("edge list is missing its header line");
  std::size_t n = 0;
  {
    std::istringstream header(line.substr(2));
    std::string field;
    while (header >> field) {
      if (field.rfind("n=", 0) == 0) n = std::stoull(field.substr(2));
    }
  }
  if (n == 0) throw parameter_error("edge list header does not declare n");
  AdjacencyLists adj(n);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::uint64_t u = 0, v = 0;
    if (!(row >> u >> v) || u >= n || v >= n)
      throw parameter_error("malformed edge on line " + std::to_string(lineno));
    adj[u].push_back(static_cast<NodeId>(v));
    adj[v].push_back(static_cast<NodeId>(u));
  }
  return Graph(std::move(adj));
}

}  // namespace netrct
