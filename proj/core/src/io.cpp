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

#include "mlunmix/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace mlunmix {

namespace fs = std::filesystem;

namespace {

// Iterates over '\n'-terminated lines, tolerating a trailing '\r'.
class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  bool next(std::string_view& line) {
    if (pos_ >= text_.size()) return false;
    const std::size_t end = text_.find('\n', pos_);
    const std::size_t stop = end == std::string_view::npos ? text_.size() : end;
    line = text_.substr(pos_, stop - pos_);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos_ = stop + 1;
    ++number_;
    return true;
  }
  int number() const { return number_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int number_ = 0;
};

Index parse_count(std::string_view text) {
  text = trim(text);
  long long value = -1;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || value < 0) {
    throw DataError("expected a nonnegative integer, got '" + std::string(text) + "'");
  }
  return static_cast<Index>(value);
}

// "# <tag> <a> <b>" -> (a, b)
std::pair<Index, Index> parse_header(std::string_view line, std::string_view tag) {
  const std::string prefix = "# " + std::string(tag) + " ";
  if (line.substr(0, prefix.size()) != prefix) {
    throw DataError("expected header '" + prefix + "<n> <m>'");
  }
  const auto parts = split(trim(line.substr(prefix.size())), ' ');
  if (parts.size() != 2) throw DataError("malformed header '" + std::string(line) + "'");
  return {parse_count(parts[0]), parse_count(parts[1])};
}

void append_row(std::string& out, auto&& values, Index count) {
  for (Index j = 0; j < count; ++j) {
    if (j) out += ',';
    out += format_double(values(j));
  }
  out += '\n';
}

void parse_row(std::string_view line, Index expected, int line_number, auto&& sink) {
  const auto fields = split(line, ',');
  const Index got = line.empty() ? 0 : static_cast<Index>(fields.size());
  if (got != expected) {
    throw DataError("line " + std::to_string(line_number) + ": expected " +
                    std::to_string(expected) + " values, found " +
                    std::to_string(got));
  }
  for (Index j = 0; j < expected; ++j) sink(j, parse_double(fields[static_cast<std::size_t>(j)]));
}

}  // namespace

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return text.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(text.substr(start));
      break;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  if (ec != std::errc()) throw DataError("could not format number");
  return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw DataError("not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::string format_matrix(const Matrix& m) {
  std::string out = "# matrix " + std::to_string(m.rows()) + " " +
                    std::to_string(m.cols()) + "\n";
  out.reserve(out.size() + static_cast<std::size_t>(m.size()) * 24);
  for (Index i = 0; i < m.rows(); ++i) append_row(out, m.row(i), m.cols());
  return out;
}

Matrix parse_matrix(std::string_view text) {
  LineReader lines(text);
  std::string_view line;
  if (!lines.next(line)) throw DataError("empty matrix file");
  const auto [rows, cols] = parse_header(line, "matrix");
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    if (!lines.next(line)) {
      throw DataError("matrix file ends after " + std::to_string(i) + " of " +
                      std::to_string(rows) + " rows");
    }
    parse_row(line, cols, lines.number(), [&](Index j, double v) { m(i, j) = v; });
  }
  while (lines.next(line)) {
    if (!trim(line).empty()) throw DataError("trailing data after matrix rows");
  }
  return m;
}

void write_matrix(const fs::path& path, const Matrix& m) {
  write_file_atomic(path, format_matrix(m));
}

Matrix read_matrix(const fs::path& path) {
  try {
    return parse_matrix(read_text_file(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string format_library(const SpectralLibrary& lib) {
  lib.validate();
  std::string out = "# library " + std::to_string(lib.bands()) + " " +
                    std::to_string(lib.size()) + "\n";
  for (Index k = 0; k < lib.size(); ++k) {
    if (k) out += ',';
    std::string name = lib.names.empty() ? "em_" + std::to_string(k)
                                         : lib.names[static_cast<std::size_t>(k)];
    if (name.find_first_of(",\n") != std::string::npos) {
      throw DataError("signature name '" + name + "' contains a separator");
    }
    out += name;
  }
  out += '\n';
  if (!lib.wavelengths_nm.empty()) {
    out += "# wavelengths_nm ";
    for (std::size_t b = 0; b < lib.wavelengths_nm.size(); ++b) {
      if (b) out += ',';
      out += format_double(lib.wavelengths_nm[b]);
    }
    out += '\n';
  }
  for (Index b = 0; b < lib.bands(); ++b) append_row(out, lib.signatures.row(b), lib.size());
  return out;
}

SpectralLibrary parse_library(std::string_view text) {
  LineReader lines(text);
  std::string_view line;
  if (!lines.next(line)) throw DataError("empty library file");
  const auto [bands, count] = parse_header(line, "library");
  if (bands < 1 || count < 1) throw DataError("library must have bands and signatures");

  SpectralLibrary lib;
  if (!lines.next(line)) throw DataError("library file lacks the names line");
  for (std::string_view name : split(line, ',')) lib.names.emplace_back(trim(name));
  if (static_cast<Index>(lib.names.size()) != count) {
    throw DataError("library declares " + std::to_string(count) +
                    " signatures but names " + std::to_string(lib.names.size()));
  }

  lib.signatures.resize(bands, count);
  Index row = 0;
  constexpr std::string_view kWavelengths = "# wavelengths_nm";
  while (row < bands && lines.next(line)) {
    if (row == 0 && lib.wavelengths_nm.empty() &&
        line.substr(0, kWavelengths.size()) == kWavelengths) {
      std::string_view rest = trim(line.substr(kWavelengths.size()));
      for (std::string_view w : split(rest, ',')) lib.wavelengths_nm.push_back(parse_double(w));
      if (static_cast<Index>(lib.wavelengths_nm.size()) != bands) {
        throw DataError("wavelength line has " +
                        std::to_string(lib.wavelengths_nm.size()) +
                        " values for " + std::to_string(bands) + " bands");
      }
      continue;
    }
    parse_row(line, count, lines.number(),
              [&](Index j, double v) { lib.signatures(row, j) = v; });
    ++row;
  }
  if (row != bands) {
    throw DataError("library declares " + std::to_string(bands) +
                    " bands but has " + std::to_string(row) + " data rows");
  }
  while (lines.next(line)) {
    if (!trim(line).empty()) throw DataError("trailing data after library rows");
  }
  try {
    lib.validate();
  } catch (const DomainError& e) {
    throw DataError(e.what());
  }
  return lib;
}

void write_library(const fs::path& path, const SpectralLibrary& lib) {
  write_file_atomic(path, format_library(lib));
}

SpectralLibrary read_library(const fs::path& path) {
  try {
    return parse_library(read_text_file(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string format_key_values(const KeyValues& kv) {
  std::string out;
  for (const auto& [key, value] : kv) out += key + "=" + value + "\n";
  return out;
}

KeyValues parse_key_values(std::string_view text) {
  KeyValues kv;
  LineReader lines(text);
  std::string_view line;
  while (lines.next(line)) {
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw DataError("line " + std::to_string(lines.number()) +
                      ": expected key=value");
    }
    kv.emplace_back(std::string(trim(line.substr(0, eq))),
                    std::string(trim(line.substr(eq + 1))));
  }
  return kv;
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw DataError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw DataError("cannot rename " + tmp.string() + ": " + ec.message());
}

}  // namespace mlunmix
