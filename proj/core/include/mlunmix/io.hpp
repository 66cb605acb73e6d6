// Copyright 2026 The mlunmix Authors. All Rights Reserved.
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

// Plain-text file formats.
//
// Matrix file:
//   # matrix <rows> <cols>
//   v,v,...,v          (one line per row, <cols> values)
// Values use 17 significant digits and a period decimal separator, so a
// write/read cycle reproduces every finite double bit for bit.
//
// Library file:
//   # library <bands> <signatures>
//   name_1,name_2,...,name_K
//   # wavelengths_nm w_1,...,w_B      (optional)
//   <bands> rows of <signatures> comma-separated reflectances
//
// Key/value file: one `key=value` per line; blank lines and lines starting
// with '#' are ignored.

#ifndef MLUNMIX_IO_HPP_
#define MLUNMIX_IO_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mlunmix/synth.hpp"
#include "mlunmix/types.hpp"

namespace mlunmix {

std::string format_double(double value);
double parse_double(std::string_view text);

std::string format_matrix(const Matrix& m);
Matrix parse_matrix(std::string_view text);
void write_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix(const std::filesystem::path& path);

std::string format_library(const SpectralLibrary& lib);
SpectralLibrary parse_library(std::string_view text);
void write_library(const std::filesystem::path& path, const SpectralLibrary& lib);
SpectralLibrary read_library(const std::filesystem::path& path);

using KeyValues = std::vector<std::pair<std::string, std::string>>;

std::string format_key_values(const KeyValues& kv);
KeyValues parse_key_values(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);
// Writes to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::vector<std::string_view> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);

}  // namespace mlunmix

#endif  // MLUNMIX_IO_HPP_
