#include "ccd/array_io.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace ccd {

namespace {

template <class T>
void put_le(std::string& out, T value) {
  auto bits = std::bit_cast<std::uint64_t>(value);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xffu));
}

template <class T>
T get_le(const std::string& in, std::size_t offset) {
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) {
    bits = (bits << 8) | static_cast<unsigned char>(in[offset + static_cast<std::size_t>(i)]);
  }
  return std::bit_cast<T>(bits);
}

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArrayFormatError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_all(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ArrayFormatError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ArrayFormatError("short write to " + path.string());
}

}  // namespace

std::string encode_array(const std::vector<std::uint64_t>& dims, const Vector& values) {
  std::uint64_t count = 1;
  for (auto d : dims) count *= d;
  if (dims.empty() || count != static_cast<std::uint64_t>(values.size())) {
    throw ArrayFormatError("array dims do not match the number of values");
  }
  std::string out(kArrayMagic, sizeof(kArrayMagic));
  out.reserve(out.size() + 8 * (1 + dims.size() + static_cast<std::size_t>(values.size())));
  put_le(out, static_cast<std::uint64_t>(dims.size()));
  for (auto d : dims) put_le(out, d);
  for (Index i = 0; i < values.size(); ++i) put_le(out, values[i]);
  return out;
}

Array decode_array(const std::string& bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kArrayMagic, sizeof(kArrayMagic)) != 0) {
    throw ArrayFormatError("not a float64 array file (bad magic)");
  }
  const auto rank = get_le<std::uint64_t>(bytes, 8);
  if (rank == 0 || rank > 8 || bytes.size() < 16 + 8 * rank) {
    throw ArrayFormatError("array header is truncated or has a bad rank");
  }
  Array out;
  std::uint64_t count = 1;
  for (std::uint64_t i = 0; i < rank; ++i) {
    out.dims.push_back(get_le<std::uint64_t>(bytes, 16 + 8 * i));
    count *= out.dims.back();
  }
  const std::size_t data_offset = 16 + 8 * rank;
  if (bytes.size() != data_offset + 8 * count) {
    throw ArrayFormatError("array payload size does not match its dims");
  }
  out.values.resize(static_cast<Index>(count));
  for (std::uint64_t i = 0; i < count; ++i) {
    out.values[static_cast<Index>(i)] = get_le<double>(bytes, data_offset + 8 * i);
  }
  return out;
}

void write_array(const std::filesystem::path& path, const std::vector<std::uint64_t>& dims,
                 const Vector& values) {
  write_all(path, encode_array(dims, values));
}

Array read_array(const std::filesystem::path& path) { return decode_array(read_all(path)); }

void write_pgm16(const std::filesystem::path& path, const Vector& values, Index rows, Index cols) {
  if (rows < 1 || cols < 1 || rows * cols != values.size()) {
    throw ArrayFormatError("pgm: image shape does not match the number of values");
  }
  const double lo = values.minCoeff();
  const double hi = values.maxCoeff();
  const double span = hi - lo;
  std::string out = "P5\n" + std::to_string(cols) + " " + std::to_string(rows) + "\n65535\n";
  for (Index i = 0; i < values.size(); ++i) {
    const double t = span > 0.0 ? (values[i] - lo) / span : 0.0;
    const auto level = static_cast<std::uint16_t>(std::lround(std::clamp(t, 0.0, 1.0) * 65535.0));
    out.push_back(static_cast<char>(level >> 8));
    out.push_back(static_cast<char>(level & 0xffu));
  }
  write_all(path, out);
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace ccd
