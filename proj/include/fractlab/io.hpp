#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fractlab/grid.hpp"

namespace fractlab {

// "%.17g": round-trips doubles and keeps file output byte-stable.
std::string format_double(double v);

// Canonical versioned measure document (JSON): version, dim, step (rational
// string), origin, cells sorted lexicographically with masses as decimal
// strings, plus an optional Cantor provenance block.
std::string measure_to_json(const GridMeasure& mu);
GridMeasure measure_from_json(const std::string& text);

GridMeasure load_measure(const std::filesystem::path& path);
void save_measure(const GridMeasure& mu, const std::filesystem::path& path);

// Write-temp-then-rename in the target directory.
void atomic_write(const std::filesystem::path& path, const std::string& content);

// Scale ladders: "3^-4..3^-10" (exact powers, strictly decreasing), a comma
// list of rationals/powers, or a single value.
std::vector<Rational> parse_scale_ladder(const std::string& text);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace fractlab
