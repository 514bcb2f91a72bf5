#include "dygssm/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "dygssm/errors.hpp"

namespace dygssm {

namespace {

std::string fmt_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, end);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

bool parse_ll(const std::string& s, long long& out) {
  try {
    std::size_t used = 0;
    out = std::stoll(s, &used);
    return used == s.size() && !s.empty();
  } catch (...) {
    return false;
  }
}

bool parse_d(const std::string& s, double& out) {
  try {
    std::size_t used = 0;
    out = std::stod(s, &used);
    return used == s.size() && !s.empty();
  } catch (...) {
    return false;
  }
}

std::string snapshot_path(const std::string& dir, int t) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "snapshot_%03d.csv", t);
  return dir + "/" + buf;
}

ParamGroup parse_group(const std::string& s) {
  if (s == "gcn") return ParamGroup::gcn;
  if (s == "gru") return ParamGroup::gru;
  if (s == "attn") return ParamGroup::attn;
  throw DataError("unknown parameter group '" + s + "'");
}

}  // namespace

EdgeData load_edge_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read edge file: " + path);

  struct RawEdge {
    long long u, v;
    double ts;
  };
  std::vector<RawEdge> raw;
  EdgeData out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv(line);
    if (fields.size() != 3 && fields.size() != 4)
      throw DataError(path + ":" + std::to_string(lineno) + ": expected 3 or 4 fields, got " +
                      std::to_string(fields.size()));
    long long u, v;
    double ts;
    if (!parse_ll(fields[0], u) || !parse_ll(fields[1], v) || !parse_d(fields[2], ts)) {
      if (lineno == 1) continue;  // header row
      throw DataError(path + ":" + std::to_string(lineno) + ": malformed row '" + line + "'");
    }
    if (u == v) {
      ++out.self_loops_dropped;
      continue;
    }
    raw.push_back({u, v, ts});
  }
  if (raw.empty()) throw DataError(path + ": no usable edges");
  if (out.self_loops_dropped > 0)
    std::cerr << "warning: dropped " << out.self_loops_dropped << " self-loop(s) from " << path
              << "\n";

  for (const auto& e : raw) {
    out.original_ids.push_back(e.u);
    out.original_ids.push_back(e.v);
  }
  std::sort(out.original_ids.begin(), out.original_ids.end());
  out.original_ids.erase(std::unique(out.original_ids.begin(), out.original_ids.end()),
                         out.original_ids.end());
  std::map<long long, int> index;
  for (std::size_t i = 0; i < out.original_ids.size(); ++i)
    index[out.original_ids[i]] = static_cast<int>(i);

  out.edges.reserve(raw.size());
  for (const auto& e : raw) out.edges.push_back({index[e.u], index[e.v], e.ts});
  return out;
}

void save_node_mapping(const std::vector<long long>& original_ids, const std::string& path) {
  std::string text = "node_id,original_id\n";
  for (std::size_t i = 0; i < original_ids.size(); ++i)
    text += std::to_string(i) + "," + std::to_string(original_ids[i]) + "\n";
  write_text_file(path, text);
}

void save_snapshots(const DynamicGraph& graph, const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::string meta = "nodes = " + std::to_string(graph.node_count) + "\n";
  meta += "snapshots = " + std::to_string(graph.snapshot_count()) + "\n";
  write_text_file(dir + "/graph_meta.txt", meta);
  for (int t = 0; t < graph.snapshot_count(); ++t) {
    std::string text;
    for (auto [u, v] : graph.snapshots[t].edges)
      text += std::to_string(u) + "," + std::to_string(v) + "\n";
    write_text_file(snapshot_path(dir, t), text);
  }
}

DynamicGraph load_snapshots(const std::string& dir) {
  const std::string meta = read_text_file(dir + "/graph_meta.txt");
  int nodes = -1, T = -1;
  {
    std::istringstream in(meta);
    std::string line;
    while (std::getline(in, line)) {
      long long x;
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(0, eq);
      key.erase(key.find_last_not_of(" \t") + 1);
      std::string value = line.substr(eq + 1);
      value.erase(0, value.find_first_not_of(" \t"));
      if (!value.empty() && value.back() == '\r') value.pop_back();
      if (!parse_ll(value, x)) continue;
      if (key == "nodes") nodes = static_cast<int>(x);
      if (key == "snapshots") T = static_cast<int>(x);
    }
  }
  if (nodes < 1 || T < 1) throw DataError(dir + "/graph_meta.txt: missing nodes/snapshots");

  std::vector<std::vector<std::pair<int, int>>> edges(T);
  for (int t = 0; t < T; ++t) {
    const std::string path = snapshot_path(dir, t);
    std::ifstream in(path);
    if (!in) throw DataError("missing snapshot file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || line == "\r") continue;
      const auto fields = split_csv(line);
      long long u, v;
      if (fields.size() != 2 || !parse_ll(fields[0], u) || !parse_ll(fields[1], v))
        throw DataError(path + ":" + std::to_string(lineno) + ": malformed row '" + line + "'");
      edges[t].emplace_back(static_cast<int>(u), static_cast<int>(v));
    }
  }
  return graph_from_snapshot_edges(edges, nodes);
}

void save_checkpoint(const ModelParams& params, const std::string& path) {
  std::string text = "dygssm-checkpoint 1\n";
  text += std::to_string(params.names().size()) + "\n";
  for (const auto& name : params.names()) {
    const Tensor& t = params.get(name);
    text += name + " " + to_string(params.group_of(name)) + " " + std::to_string(t.rows()) +
            " " + std::to_string(t.cols()) + "\n";
    auto vals = t.data();
    std::string row;
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (i) row += " ";
      row += fmt_double(vals[i]);
    }
    text += row + "\n";
  }
  write_text_file(path, text);
}

ModelParams load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read checkpoint: " + path);
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "dygssm-checkpoint" || version != 1)
    throw DataError(path + ": not a dygssm checkpoint");
  std::size_t count = 0;
  if (!(in >> count)) throw DataError(path + ": missing tensor count");

  ModelParams params;
  for (std::size_t i = 0; i < count; ++i) {
    std::string name, group;
    int rows = 0, cols = 0;
    if (!(in >> name >> group >> rows >> cols) || rows < 1 || cols < 1)
      throw DataError(path + ": malformed tensor header (entry " + std::to_string(i) + ")");
    std::vector<double> vals(static_cast<std::size_t>(rows) * cols);
    for (auto& v : vals)
      if (!(in >> v))
        throw DataError(path + ": truncated values for tensor '" + name + "'");
    params.add(name, parse_group(group),
               Tensor::from_data(rows, cols, std::move(vals), /*requires_grad=*/true));
  }
  return params;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  out << content;
  if (!out) throw DataError("failed writing file: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace dygssm
