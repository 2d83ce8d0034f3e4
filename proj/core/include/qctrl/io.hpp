#pragma once

// Deterministic file output: CSV with 12 significant digits and a manifest
// listing every written file with its byte size.

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qctrl {

// "%.12g" formatting; the same value always renders to the same bytes.
std::string format_number(double v);

struct Artifact {
    std::string filename;
    std::string content;
};

// CSV row helpers.
std::string csv_row(const std::vector<std::string>& cells);
std::string csv_numeric_row(const std::vector<double>& cells);

struct ManifestEntry {
    std::string filename;
    std::size_t bytes = 0;
};

// Writes every artifact into out_dir (created if missing) plus a
// manifest.csv; returns the manifest.
std::vector<ManifestEntry> write_outputs(const std::vector<Artifact>& artifacts,
                                         const std::string& out_dir);

} // namespace qctrl
