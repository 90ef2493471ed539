// output.hpp: CSV and plain-PGM formatting. Everything is rendered to a
// string first so a failed run never leaves a half-written file behind.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rabi/errors.hpp"
#include "rabi/grid.hpp"

namespace rabi::io {

// 17 significant digits round-trip every double; NaN prints as "NaN".
inline std::string csv_number(double v) {
    if (std::isnan(v)) return "NaN";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : columns_(header.size()) { add_row(header); }

    CsvTable& row() {
        if (open_) finish();
        open_ = true;
        cells_ = 0;
        return *this;
    }
    CsvTable& operator<<(double v) { return cell(csv_number(v)); }
    CsvTable& operator<<(std::size_t v) { return cell(std::to_string(v)); }
    CsvTable& operator<<(int v) { return cell(std::to_string(v)); }
    CsvTable& operator<<(const std::string& v) { return cell(v); }
    CsvTable& operator<<(const char* v) { return cell(v); }

    const std::string& str() {
        if (open_) finish();
        return text_;
    }
    std::size_t rows() const { return rows_ - 1 + (open_ ? 1 : 0); }  // excluding the header

private:
    CsvTable& cell(const std::string& s) {
        text_ += (cells_++ ? "," : "") + s;
        return *this;
    }
    void add_row(const std::vector<std::string>& xs) {
        for (const auto& x : xs) cell(x);
        text_ += '\n';
        ++rows_;
        cells_ = 0;
    }
    void finish() {
        if (cells_ != columns_) throw std::logic_error("csv row has " + std::to_string(cells_) + " cells, header has " +
                                                       std::to_string(columns_));
        text_ += '\n';
        ++rows_;
        open_ = false;
    }

    std::size_t columns_;
    std::size_t cells_{0};
    std::size_t rows_{0};
    bool open_{false};
    std::string text_;
};

struct PgmImage {
    std::string text;
    double scale{0.0};  // value = pixel / 255 * scale for non-missing pixels
};

// Plain 8-bit PGM (P2), one pixel per grid node, top row = largest y.
// Pixels are round(255 * v / max v); missing (NaN) nodes and an all-zero
// field render as 0.
inline PgmImage render_pgm(const GridField& f) {
    double vmax = 0.0;
    for (Eigen::Index i = 0; i < f.values.size(); ++i) {
        const double v = f.values.data()[i];
        if (std::isfinite(v)) vmax = std::max(vmax, v);
    }
    PgmImage img;
    img.scale = vmax;
    img.text = "P2\n" + std::to_string(f.x.n) + " " + std::to_string(f.y.n) + "\n255\n";
    for (int iy = f.y.n - 1; iy >= 0; --iy) {
        for (int ix = 0; ix < f.x.n; ++ix) {
            const double v = f.values(iy, ix);
            int px = 0;
            if (std::isfinite(v) && vmax > 0.0) px = static_cast<int>(std::lround(255.0 * std::max(v, 0.0) / vmax));
            img.text += (ix ? " " : "") + std::to_string(px);
        }
        img.text += '\n';
    }
    return img;
}

struct IoError : ValidationError {
    using ValidationError::ValidationError;
};

inline void ensure_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
    }
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << content;
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

} // namespace rabi::io
