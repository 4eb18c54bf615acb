#include "mvica/csv_io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace mvica {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

double parse_token(const std::string& token, int line) {
  if (token.empty()) throw ParseError("empty value", line);
  const char* begin = token.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end != begin + token.size())
    throw ParseError("non-numeric value '" + token + "'", line);
  if (!std::isfinite(v))
    throw ParseError("non-finite value '" + token + "'", line);
  return v;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

Matrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());

  std::vector<std::vector<double>> rows;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    line = strip_cr(line);
    if (line.empty() && in.peek() == std::ifstream::traits_type::eof()) break;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string token;
    while (std::getline(ss, token, ',')) row.push_back(parse_token(token, line_number));
    if (line.empty() || line.back() == ',')
      throw ParseError("trailing or missing value", line_number);
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError("row has " + std::to_string(row.size()) + " values, expected " +
                           std::to_string(rows.front().size()),
                       line_number);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("empty matrix", 1);

  Matrix out(static_cast<Eigen::Index>(rows.size()),
             static_cast<Eigen::Index>(rows.front().size()));
  for (size_t r = 0; r < rows.size(); ++r)
    for (size_t c = 0; c < rows[r].size(); ++c)
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return out;
}

void store_matrix(const Matrix& m, const std::filesystem::path& path) {
  if (!is_finite(m)) throw ValidationError("refusing to store non-finite matrix");
  std::ofstream out(path, std::ios::binary);  // binary keeps LF endings everywhere
  if (!out) throw IoError("cannot write " + path.string());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out << ',';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
  if (!out) throw IoError("failed while writing " + path.string());
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());

  Manifest manifest;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty manifest", 1);
  line = strip_cr(line);
  if (std::sscanf(line.c_str(), "k=%d,n=%d", &manifest.k, &manifest.n) != 2)
    throw ParseError("manifest must start with 'k=<int>,n=<int>'", 1);
  if (manifest.k < 1 || manifest.n < 1)
    throw ParseError("manifest k and n must be positive", 1);

  const auto base = path.parent_path();
  int line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    line = strip_cr(line);
    if (line.empty()) continue;
    std::filesystem::path p(line);
    if (p.is_relative()) p = base / p;
    manifest.view_paths.push_back(std::move(p));
  }
  if (manifest.view_paths.empty())
    throw ParseError("manifest lists no views", line_number);
  return manifest;
}

MultiViewDataset load_dataset(const Manifest& manifest) {
  std::vector<Matrix> views;
  views.reserve(manifest.view_paths.size());
  for (const auto& p : manifest.view_paths) {
    Matrix v = load_matrix(p);
    if (v.rows() != manifest.k || v.cols() != manifest.n)
      throw ValidationError("view " + p.string() + " is " + std::to_string(v.rows()) + "x" +
                            std::to_string(v.cols()) + ", manifest declares " +
                            std::to_string(manifest.k) + "x" + std::to_string(manifest.n));
    views.push_back(std::move(v));
  }
  return MultiViewDataset(std::move(views));
}

}  // namespace mvica
