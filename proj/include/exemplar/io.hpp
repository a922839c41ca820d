#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "exemplar/error.hpp"
#include "exemplar/ground_set.hpp"
#include "exemplar/precision.hpp"

namespace exemplar::io {

static_assert(std::endian::native == std::endian::little, "binary I/O assumes a little-endian host");

namespace detail {

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto first = cell.find_first_not_of(" \t\r");
    const auto last = cell.find_last_not_of(" \t\r");
    fields.push_back(first == std::string::npos ? std::string() : cell.substr(first, last - first + 1));
  }
  return fields;
}

inline bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

}  // namespace detail

/// Numeric CSV rows. A first row that does not parse as numbers is taken to
/// be a header and skipped; blank lines are ignored.
inline std::vector<std::vector<double>> read_csv_rows(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = detail::split_fields(line);
    std::vector<double> row;
    row.reserve(fields.size());
    bool numeric = true;
    for (const auto& f : fields) {
      double x;
      if (!detail::parse_number(f, x)) {
        numeric = false;
        break;
      }
      row.push_back(x);
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      fail(Errc::format_error, "line " + std::to_string(line_no) + " is not numeric");
    }
    first = false;
    if (!rows.empty() && row.size() != rows.front().size()) {
      fail(Errc::dimension_mismatch, "line " + std::to_string(line_no) + " has " +
                                         std::to_string(row.size()) + " fields, expected " +
                                         std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Raw contents of a ground-set file: values are widened to double.
struct RawGroundData {
  Precision precision = Precision::binary32;
  std::uint32_t n = 0;
  std::uint32_t d = 0;
  std::vector<double> column_major;

  std::vector<std::vector<double>> rows() const {
    std::vector<std::vector<double>> out(n, std::vector<double>(d));
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t i = 0; i < n; ++i) out[i][k] = column_major[k * n + i];
    return out;
  }
};

inline constexpr std::array<char, 4> kExemMagic{'E', 'X', 'E', 'M'};
inline constexpr std::uint8_t kExemVersion = 0x01;

/// "EXEM", version 0x01, precision tag (0/1/2), u32 n, u32 d, then n*d
/// column-major values at the tagged width, little-endian.
template <class T, class D>
void write_exem(std::ostream& out, const GroundSet<T, D>& ground) {
  if (ground.n() > UINT32_MAX || ground.d() > UINT32_MAX) {
    fail(Errc::invalid_argument, "ground set too large for the file format");
  }
  out.write(kExemMagic.data(), kExemMagic.size());
  const std::uint8_t header[2] = {kExemVersion, static_cast<std::uint8_t>(scalar_traits<T>::precision)};
  out.write(reinterpret_cast<const char*>(header), 2);
  const std::uint32_t dims[2] = {static_cast<std::uint32_t>(ground.n()),
                                 static_cast<std::uint32_t>(ground.d())};
  out.write(reinterpret_cast<const char*>(dims), sizeof dims);
  const auto data = ground.data();
  if constexpr (std::is_same_v<T, Half>) {
    for (Half h : data) {
      const std::uint16_t bits = h.bits();
      out.write(reinterpret_cast<const char*>(&bits), 2);
    }
  } else {
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size() * sizeof(T)));
  }
  if (!out) fail(Errc::io_error, "failed writing ground-set file");
}

inline RawGroundData read_exem(std::istream& in) {
  std::array<char, 4> magic{};
  std::uint8_t header[2] = {};
  std::uint32_t dims[2] = {};
  in.read(magic.data(), 4);
  in.read(reinterpret_cast<char*>(header), 2);
  in.read(reinterpret_cast<char*>(dims), sizeof dims);
  if (!in) fail(Errc::format_error, "truncated ground-set header");
  if (magic != kExemMagic) fail(Errc::format_error, "bad magic bytes");
  if (header[0] != kExemVersion) fail(Errc::format_error, "unsupported version " + std::to_string(header[0]));
  if (header[1] > 2) fail(Errc::format_error, "unknown precision tag " + std::to_string(header[1]));

  RawGroundData raw;
  raw.precision = static_cast<Precision>(header[1]);
  raw.n = dims[0];
  raw.d = dims[1];
  const std::size_t count = static_cast<std::size_t>(raw.n) * raw.d;
  raw.column_major.resize(count);
  const std::size_t width = bytes_per_value(raw.precision);
  std::vector<char> bytes(count * width);
  in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (static_cast<std::size_t>(in.gcount()) != bytes.size()) {
    fail(Errc::format_error, "truncated ground-set payload");
  }
  for (std::size_t i = 0; i < count; ++i) {
    const char* p = bytes.data() + i * width;
    switch (raw.precision) {
      case Precision::binary16: {
        std::uint16_t bits;
        std::memcpy(&bits, p, 2);
        raw.column_major[i] = Half::to_float(bits);
        break;
      }
      case Precision::binary32: {
        float x;
        std::memcpy(&x, p, 4);
        raw.column_major[i] = x;
        break;
      }
      case Precision::binary64: std::memcpy(&raw.column_major[i], p, 8); break;
    }
  }
  return raw;
}

inline bool has_exem_magic(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::array<char, 4> magic{};
  in.read(magic.data(), 4);
  return in && magic == kExemMagic;
}

/// Loads observations from a .exem file or a CSV file (by content).
inline std::vector<std::vector<double>> load_observations(const std::string& path) {
  if (has_exem_magic(path)) {
    std::ifstream in(path, std::ios::binary);
    return read_exem(in).rows();
  }
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open " + path);
  return read_csv_rows(in);
}

/// Evaluation sets as CSV: each row is `set_id,x_1,...,x_d`. Consecutive
/// rows with the same id form one set; sets keep their file order.
inline std::vector<std::vector<std::vector<double>>> read_sets_csv(std::istream& in) {
  const auto rows = read_csv_rows(in);
  std::vector<std::vector<std::vector<double>>> sets;
  double current_id = 0;
  for (const auto& row : rows) {
    if (row.size() < 2) fail(Errc::format_error, "set rows need an id and at least one value");
    if (sets.empty() || row[0] != current_id) {
      sets.emplace_back();
      current_id = row[0];
    }
    sets.back().emplace_back(row.begin() + 1, row.end());
  }
  return sets;
}

}  // namespace exemplar::io
