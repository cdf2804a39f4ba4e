// Copyright 2026-present the mmc-tdgl project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mmctdgl/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>
#include <vector>

#include "mmctdgl/errors.hpp"

namespace mmctdgl::io {

std::string format_shortest(double v) {
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw IoError("number formatting failed");
    return std::string(buf, p);
}

std::string format_17(double v) {
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    if (ec != std::errc()) throw IoError("number formatting failed");
    return std::string(buf, p);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
        throw IoError("not a number: '" + s + "'");
    }
    return v;
}

std::string snapshot_stem(double t) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "phi_t%.6f", t);
    return buf;
}

void write_field_csv(const Field2D& f, const std::string& path) {
    std::string out;
    out.reserve(f.size() * 24);
    for (int j = 0; j < f.grid.ny; ++j) {
        for (int i = 0; i < f.grid.nx; ++i) {
            if (i > 0) out += ',';
            out += format_17(f.at(i, j));
        }
        out += '\n';
    }
    write_text_file(path, out);
}

Field2D read_field_csv(const std::string& path, double lx, double ly) {
    const std::string text = read_text_file(path);
    std::vector<std::vector<double>> rows;
    std::istringstream stream(text);
    std::string line;
    int lineno = 0;
    while (std::getline(stream, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::size_t start = 0;
        while (start <= line.size()) {
            const std::size_t comma = line.find(',', start);
            const std::string tok =
                comma == std::string::npos ? line.substr(start) : line.substr(start, comma - start);
            try {
                row.push_back(parse_double(tok));
            } catch (const IoError& e) {
                throw IoError(path + ":" + std::to_string(lineno) + ": " + e.what());
            }
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw IoError(path + ":" + std::to_string(lineno) + ": ragged row, expected " +
                          std::to_string(rows.front().size()) + " values, got " +
                          std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IoError(path + ": no data rows");
    const int ny = static_cast<int>(rows.size());
    const int nx = static_cast<int>(rows.front().size());
    Field2D f(grid::Grid2D(nx, ny, lx, ly));
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            f.at(i, j) = rows[j][i];
        }
    }
    return f;
}

void write_field_pgm(const Field2D& f, const std::string& path) {
    std::string out = "P5\n" + std::to_string(f.grid.nx) + " " + std::to_string(f.grid.ny) + "\n255\n";
    out.reserve(out.size() + f.size());
    for (int j = 0; j < f.grid.ny; ++j) {
        for (int i = 0; i < f.grid.nx; ++i) {
            double v = f.at(i, j);
            if (v < 0.0) v = 0.0;
            if (v > 1.0) v = 1.0;
            // Nearest integer with exact halves rounding down, so 127.5 -> 127.
            const double px = std::ceil(255.0 * v - 0.5);
            out += static_cast<char>(static_cast<unsigned char>(px));
        }
    }
    write_text_file(path, out);
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write to '" + path + "' failed");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read from '" + path + "' failed");
    return buf.str();
}

}  // namespace mmctdgl::io
