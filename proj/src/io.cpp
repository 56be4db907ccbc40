#include "nbsel/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace nbsel {

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = end + 1;
  }
  return lines;
}

std::vector<std::string> split_fields(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = line.find(sep, start);
    fields.push_back(line.substr(start, end == std::string::npos ? std::string::npos : end - start));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return fields;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

template <typename T>
bool parse_number(const std::string& field, T& out) {
  const std::string t = trim(field);
  if (t.empty()) return false;
  const char* begin = t.data();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size();
}

}  // namespace

DataMatrix parse_csv(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.empty() || trim(lines.front()).empty())
    throw Error(ErrorKind::ParseError, "CSV is missing its header row", 1, 1);
  const std::size_t p = split_fields(lines.front(), ',').size();
  std::vector<double> values;
  std::size_t rows = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto line_no = static_cast<std::int64_t>(i + 1);
    if (lines[i].empty()) {
      if (i + 1 == lines.size()) break;
      throw Error(ErrorKind::RaggedRow, "empty row at line " + std::to_string(line_no), line_no);
    }
    const auto fields = split_fields(lines[i], ',');
    if (fields.size() != p)
      throw Error(ErrorKind::RaggedRow,
                  "line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                      " fields, expected " + std::to_string(p),
                  line_no);
    for (std::size_t j = 0; j < p; ++j) {
      double v = 0.0;
      if (!parse_number(fields[j], v))
        throw Error(ErrorKind::ParseError,
                    "cannot parse number at line " + std::to_string(line_no) + ", column " +
                        std::to_string(j + 1),
                    line_no, static_cast<std::int64_t>(j + 1));
      values.push_back(v);
    }
    ++rows;
  }
  if (rows < 2)
    throw Error(ErrorKind::ParseError, "CSV needs at least 2 observation rows",
                static_cast<std::int64_t>(lines.size()), 1);
  Eigen::MatrixXd m(static_cast<Index>(rows), static_cast<Index>(p));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < p; ++c) m(static_cast<Index>(r), static_cast<Index>(c)) = values[r * p + c];
  return DataMatrix(std::move(m), false);
}

std::string format_csv(const DataMatrix& data) {
  std::string out;
  for (Index j = 0; j < data.p(); ++j) out += (j ? ",x" : "x") + std::to_string(j + 1);
  out += '\n';
  char buffer[40];
  for (Index i = 0; i < data.n(); ++i) {
    for (Index j = 0; j < data.p(); ++j) {
      std::snprintf(buffer, sizeof buffer, "%.17g", data.values()(i, j));
      if (j) out += ',';
      out += buffer;
    }
    out += '\n';
  }
  return out;
}

std::string format_edges(const EdgeSet& edges) {
  std::string out;
  for (const auto& [a, b] : edges.edges())
    out += std::to_string(a + 1) + '\t' + std::to_string(b + 1) + '\n';
  return out;
}

EdgeSet parse_edges(const std::string& text, Index p) {
  std::vector<Edge> edges;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line_no = static_cast<std::int64_t>(i + 1);
    if (trim(lines[i]).empty()) continue;
    const auto fields = split_fields(lines[i], '\t');
    long a = 0, b = 0;
    if (fields.size() != 2 || !parse_number(fields[0], a) || !parse_number(fields[1], b))
      throw Error(ErrorKind::ParseError, "malformed edge at line " + std::to_string(line_no),
                  line_no, 1);
    if (a < 1 || b < 1 || a > p || b > p || a == b)
      throw Error(ErrorKind::ParseError, "invalid edge endpoints at line " + std::to_string(line_no),
                  line_no, 1);
    edges.emplace_back(a - 1, b - 1);
  }
  return EdgeSet(p, std::move(edges));
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

DataMatrix load_csv(const std::filesystem::path& path) { return parse_csv(read_text(path)); }
void save_csv(const DataMatrix& data, const std::filesystem::path& path) {
  write_text(path, format_csv(data));
}
void write_edges(const EdgeSet& edges, const std::filesystem::path& path) {
  write_text(path, format_edges(edges));
}
EdgeSet read_edges(const std::filesystem::path& path, Index p) {
  return parse_edges(read_text(path), p);
}

}  // namespace nbsel
