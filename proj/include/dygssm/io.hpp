#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dygssm/graph.hpp"
#include "dygssm/model.hpp"

namespace dygssm {

// A dataset loaded from disk: edges with node ids remapped to a dense
// 0-based range, plus the original ids (original_ids[i] is node i's id in
// the source file, sorted ascending).
struct EdgeData {
  std::vector<TimedEdge> edges;
  std::vector<long long> original_ids;
  int self_loops_dropped = 0;
};

// Reads `source,target,timestamp[,weight]` rows. A first line that does not
// parse as numbers is treated as a header. Self-loops are dropped with a
// warning; any other malformed row is a DataError naming the line. Node ids
// may be arbitrary integers; they are remapped by ascending order.
EdgeData load_edge_csv(const std::string& path);

// `node_id,original_id` rows, one per node.
void save_node_mapping(const std::vector<long long>& original_ids, const std::string& path);

// Per-snapshot edge files `snapshot_NNN.csv` (rows `u,v`) plus a
// `graph_meta.txt` with the universe size, written under `dir`.
void save_snapshots(const DynamicGraph& graph, const std::string& dir);
DynamicGraph load_snapshots(const std::string& dir);

// Plain-text named-tensor checkpoint. Values are printed with 17 significant
// digits, which round-trips IEEE doubles exactly: saving, loading, and
// saving again yields byte-identical files.
void save_checkpoint(const ModelParams& params, const std::string& path);
ModelParams load_checkpoint(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace dygssm
