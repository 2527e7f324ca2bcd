#include "dpc/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "dpc/errors.hpp"

namespace dpc {

namespace {

// Returns the next line that carries content, with comments stripped.
bool next_content_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r\n") != std::string::npos) return true;
  }
  return false;
}

}  // namespace

Graph read_edge_list(std::istream& in) {
  std::string line;
  if (!next_content_line(in, line)) throw IoError("edge list: missing header");
  std::istringstream header(line);
  long long n = 0, m = 0;
  if (!(header >> n >> m) || n <= 0 || m < 0)
    throw IoError("edge list: bad header '" + line + "'");
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<size_t>(m));
  for (long long i = 0; i < m; ++i) {
    if (!next_content_line(in, line))
      throw IoError("edge list: expected " + std::to_string(m) + " edges, got " +
                    std::to_string(i));
    std::istringstream row(line);
    int u = 0, v = 0;
    if (!(row >> u >> v)) throw IoError("edge list: bad edge line '" + line + "'");
    edges.emplace_back(u, v);
  }
  try {
    return Graph::from_edges(static_cast<int>(n), edges);
  } catch (const InvalidInput& e) {
    throw IoError(std::string("edge list: ") + e.what());
  }
}

Graph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << g.n() << ' ' << g.m() << '\n';
  for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

void write_edge_list_file(const std::string& path, const Graph& g) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_edge_list(out, g);
  if (!out) throw IoError("failed writing " + path);
}

Clustering read_labels(std::istream& in) {
  std::vector<int> labels;
  std::string line;
  while (next_content_line(in, line)) {
    std::istringstream row(line);
    int l = 0;
    if (!(row >> l)) throw IoError("labels: bad line '" + line + "'");
    labels.push_back(l);
  }
  if (labels.empty()) throw IoError("labels: empty file");
  int k = *std::max_element(labels.begin(), labels.end()) + 1;
  try {
    return Clustering::from_labels(std::move(labels), k);
  } catch (const InvalidInput& e) {
    throw IoError(std::string("labels: ") + e.what());
  }
}

Clustering read_labels_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_labels(in);
}

void write_labels(std::ostream& out, const Clustering& c) {
  for (int l : c.labels) out << l << '\n';
}

void write_labels_file(const std::string& path, const Clustering& c) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_labels(out, c);
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace dpc
