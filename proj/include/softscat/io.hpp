/**
 * @file io.hpp
 *
 * On-disk formats:
 *  - near-field bundle: U_re.csv, U_im.csv, dU_re.csv, dU_im.csv and meta.json
 *  - operator dumps:    <name>_re.csv, <name>_im.csv
 *  - images:            CSV with header `x,y,value`, and binary PGM (P5)
 *  - configs/manifests: flat `key = value` text, `#` starts a comment
 *
 * Numbers are written with %.17g so a round trip is exact.
 */
#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "softscat/common.hpp"
#include "softscat/forward.hpp"
#include "softscat/imaging.hpp"

namespace softscat::io {

namespace fs = std::filesystem;

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string trim(std::string s) {
    auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
    s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
    s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
    return s;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(trim(cur));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

inline std::ofstream open_out(const fs::path& p) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw FormatError("cannot write " + p.string());
    return out;
}

inline std::ifstream open_in(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw FormatError("cannot read " + p.string());
    return in;
}

// ---------------------------------------------------------------------------
// Dense matrices

inline void write_matrix_csv(const fs::path& p, const Eigen::MatrixXd& m) {
    auto out = open_out(p);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

inline Eigen::MatrixXd read_matrix_csv(const fs::path& p) {
    auto in = open_in(p);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) continue;
        std::vector<double> row;
        for (const auto& cell : split(line, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw FormatError(p.string() + ": bad number '" + cell + "'");
            }
        }
        if (!rows.empty() && row.size() != rows.front().size()) throw FormatError(p.string() + ": ragged rows");
        rows.push_back(std::move(row));
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size()));
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return m;
}

inline void write_complex_csv(const fs::path& dir, const std::string& stem, const CMatrix& m) {
    write_matrix_csv(dir / (stem + "_re.csv"), m.real());
    write_matrix_csv(dir / (stem + "_im.csv"), m.imag());
}

inline CMatrix read_complex_csv(const fs::path& dir, const std::string& stem) {
    const Eigen::MatrixXd re = read_matrix_csv(dir / (stem + "_re.csv"));
    const Eigen::MatrixXd im = read_matrix_csv(dir / (stem + "_im.csv"));
    if (re.rows() != im.rows() || re.cols() != im.cols()) throw FormatError(stem + ": real/imaginary shape mismatch");
    CMatrix m(re.rows(), re.cols());
    m.real() = re;
    m.imag() = im;
    return m;
}

// ---------------------------------------------------------------------------
// Near-field bundle

inline void write_bundle(const fs::path& dir, const NearFieldData& d) {
    fs::create_directories(dir);
    write_complex_csv(dir, "U", d.U);
    write_complex_csv(dir, "dU", d.dU);
    nlohmann::ordered_json meta;
    meta["k"] = d.k;
    meta["radius"] = d.gamma.radius;
    meta["count"] = d.gamma.count;
    meta["delta"] = d.delta;
    meta["seed"] = d.seed;
    auto out = open_out(dir / "meta.json");
    out << meta.dump(2) << '\n';
}

inline NearFieldData read_bundle(const fs::path& dir) {
    auto in = open_in(dir / "meta.json");
    nlohmann::json meta;
    try {
        in >> meta;
    } catch (const std::exception& e) {
        throw FormatError("meta.json: " + std::string(e.what()));
    }
    NearFieldData d;
    try {
        d.k = meta.at("k").get<double>();
        const double radius = meta.at("radius").get<double>();
        const int count = meta.at("count").get<int>();
        d.delta = meta.value("delta", 0.0);
        d.seed = meta.value("seed", std::uint64_t{0});
        d.gamma = make_source_curve(radius, count);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("meta.json: " + std::string(e.what()));
    }
    d.U = read_complex_csv(dir, "U");
    d.dU = read_complex_csv(dir, "dU");
    const auto n = static_cast<Eigen::Index>(d.gamma.count);
    for (const CMatrix* m : {&d.U, &d.dU}) {
        if (m->rows() != n || m->cols() != n) throw FormatError("bundle matrices must be count x count");
        if (!m->allFinite()) throw FormatError("bundle contains non-finite entries");
    }
    return d;
}

// ---------------------------------------------------------------------------
// Images

inline void write_image_csv(const fs::path& p, const ImageGrid& img) {
    auto out = open_out(p);
    out << "x,y,value\n";
    for (int j = 0; j < img.ny(); ++j)
        for (int i = 0; i < img.nx(); ++i)
            out << format_double(img.xs[static_cast<size_t>(i)]) << ',' << format_double(img.ys[static_cast<size_t>(j)])
                << ',' << format_double(img.at(i, j)) << '\n';
}

/// Reads a grid written by write_image_csv (rows ordered y-major).
inline ImageGrid read_image_csv(const fs::path& p) {
    auto in = open_in(p);
    std::string line;
    if (!std::getline(in, line) || trim(line) != "x,y,value") throw FormatError(p.string() + ": missing x,y,value header");
    ImageGrid img;
    std::vector<Point2> nodes;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != 3) throw FormatError(p.string() + ": expected three columns");
        nodes.emplace_back(std::stod(cells[0]), std::stod(cells[1]));
        img.values.push_back(std::stod(cells[2]));
    }
    if (nodes.empty()) throw FormatError(p.string() + ": empty image");
    for (const auto& z : nodes) {
        if (z.y() != nodes.front().y()) break;
        img.xs.push_back(z.x());
    }
    for (size_t l = 0; l < nodes.size(); l += img.xs.size()) img.ys.push_back(nodes[l].y());
    if (img.xs.size() * img.ys.size() != nodes.size()) throw FormatError(p.string() + ": not a rectangular grid");
    return img;
}

/// 8-bit P5 image; the first stored row is the largest y so the picture is
/// upright in ordinary viewers.
inline void write_image_pgm(const fs::path& p, const ImageGrid& img) {
    auto out = open_out(p);
    out << "P5\n" << img.nx() << ' ' << img.ny() << "\n255\n";
    std::string row(static_cast<size_t>(img.nx()), '\0');
    for (int j = img.ny() - 1; j >= 0; --j) {
        for (int i = 0; i < img.nx(); ++i) {
            const double v = std::clamp(img.at(i, j), 0.0, 1.0);
            row[static_cast<size_t>(i)] = static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * v)));
        }
        out.write(row.data(), static_cast<std::streamsize>(row.size()));
    }
}

// ---------------------------------------------------------------------------
// key = value text

using KeyValues = std::map<std::string, std::string>;

inline KeyValues parse_key_values(std::istream& in, const std::string& origin = "config") {
    KeyValues kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw FormatError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw FormatError(origin + ":" + std::to_string(lineno) + ": empty key");
        kv[key] = trim(line.substr(eq + 1));
    }
    return kv;
}

inline KeyValues read_key_values(const fs::path& p) {
    auto in = open_in(p);
    return parse_key_values(in, p.string());
}

}  // namespace softscat::io
