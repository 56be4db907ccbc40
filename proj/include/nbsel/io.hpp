#ifndef NBSEL_IO_HPP
#define NBSEL_IO_HPP

#include <filesystem>
#include <string>

#include "nbsel/graph.hpp"
#include "nbsel/numeric_core.hpp"

namespace nbsel {

// CSV: one header row with p names, then one row of p decimal numbers per
// observation. Lines and columns in errors are 1-based.
DataMatrix parse_csv(const std::string& text);
DataMatrix load_csv(const std::filesystem::path& path);
std::string format_csv(const DataMatrix& data);
void save_csv(const DataMatrix& data, const std::filesystem::path& path);

// Edge lists: one "a<TAB>b" line per edge, 1-based, a < b, sorted.
std::string format_edges(const EdgeSet& edges);
EdgeSet parse_edges(const std::string& text, Index p);
void write_edges(const EdgeSet& edges, const std::filesystem::path& path);
EdgeSet read_edges(const std::filesystem::path& path, Index p);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace nbsel

#endif  // NBSEL_IO_HPP
