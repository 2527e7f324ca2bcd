#pragma once

#include <iosfwd>
#include <string>

#include "dpc/graph.hpp"

namespace dpc {

// Edge-list format: a header line "n m" followed by m lines "u v", one edge
// each, 0-based endpoints.  Lines starting with '#' and blank lines are
// ignored anywhere in the file.
Graph read_edge_list(std::istream& in);
Graph read_edge_list_file(const std::string& path);
void write_edge_list(std::ostream& out, const Graph& g);
void write_edge_list_file(const std::string& path, const Graph& g);

// Label format: one integer per line, line i holding the cluster of vertex i.
// k is inferred as 1 + max label.
Clustering read_labels(std::istream& in);
Clustering read_labels_file(const std::string& path);
void write_labels(std::ostream& out, const Clustering& c);
void write_labels_file(const std::string& path, const Clustering& c);

}  // namespace dpc
