#pragma once

#include "mvica/types.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace mvica {

/// CSV parse failure; line is 1-based.
struct ParseError : std::runtime_error {
  int line;
  ParseError(const std::string& msg, int line_number)
      : std::runtime_error(msg), line(line_number) {}
};

/// File-system failure (missing file, unwritable path).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Matrix CSV: one row per line, comma-separated, 17 significant digits,
/// LF line endings, no header. store followed by load is bit-exact for
/// finite doubles.
Matrix load_matrix(const std::filesystem::path& path);
void store_matrix(const Matrix& m, const std::filesystem::path& path);

/// Plain-text dataset manifest: a "k=...,n=..." first line, then one
/// matrix CSV path per line. Relative paths resolve against the manifest's
/// directory.
struct Manifest {
  int k = 0;
  int n = 0;
  std::vector<std::filesystem::path> view_paths;
};

Manifest load_manifest(const std::filesystem::path& path);

/// Loads every view named by the manifest and checks the declared shape.
MultiViewDataset load_dataset(const Manifest& manifest);

/// Round-trip formatting used by every CSV writer ("%.17g").
std::string format_double(double v);

}  // namespace mvica
