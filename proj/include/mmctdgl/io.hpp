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

#pragma once

#include <string>

#include "mmctdgl/grid.hpp"

namespace mmctdgl::io {

using grid::Field2D;
using grid::Grid2D;

// Shortest decimal that round-trips the double exactly.
std::string format_shortest(double v);
// 17 significant digits; also round-trips exactly.
std::string format_17(double v);
double parse_double(const std::string& s);

// Snapshot basename stem for time t: "phi_t" + fixed six-decimal t.
std::string snapshot_stem(double t);

// CSV matrix, ny rows of nx comma-separated values, row j holds phi[.,j],
// 17 significant digits per value.
void write_field_csv(const Field2D& f, const std::string& path);
// Reads the matrix back; lx/ly are not stored in the CSV and must be supplied.
Field2D read_field_csv(const std::string& path, double lx, double ly);

// Binary P5, 8-bit, pixel = nearest integer of 255*clamp(phi,0,1) with ties
// rounding down; file row r is grid row j = r.
void write_field_pgm(const Field2D& f, const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace mmctdgl::io
