#include "qctrl/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "qctrl/errors.hpp"

namespace qctrl {

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string csv_row(const std::vector<std::string>& cells) {
    std::string row;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0)
            row += ',';
        row += cells[i];
    }
    row += '\n';
    return row;
}

std::string csv_numeric_row(const std::vector<double>& cells) {
    std::vector<std::string> s;
    s.reserve(cells.size());
    for (double v : cells)
        s.push_back(format_number(v));
    return csv_row(s);
}

std::vector<ManifestEntry> write_outputs(const std::vector<Artifact>& artifacts,
                                         const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        throw IoError("write_outputs: cannot create directory " + out_dir + ": " + ec.message());

    std::vector<ManifestEntry> manifest;
    for (const auto& art : artifacts) {
        const fs::path path = fs::path(out_dir) / art.filename;
        std::ofstream f(path, std::ios::binary);
        if (!f)
            throw IoError("write_outputs: cannot open " + path.string());
        f.write(art.content.data(), static_cast<std::streamsize>(art.content.size()));
        if (!f)
            throw IoError("write_outputs: write failed for " + path.string());
        manifest.push_back({art.filename, art.content.size()});
    }

    std::string mtext = "filename,bytes\n";
    for (const auto& e : manifest)
        mtext += e.filename + "," + std::to_string(e.bytes) + "\n";
    const fs::path mpath = fs::path(out_dir) / "manifest.csv";
    std::ofstream mf(mpath, std::ios::binary);
    if (!mf)
        throw IoError("write_outputs: cannot open " + mpath.string());
    mf << mtext;
    return manifest;
}

} // namespace qctrl
