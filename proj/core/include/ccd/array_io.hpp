#pragma once

#include "ccd/linear_operator.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace ccd {

/// Binary array file: 8-byte magic, u64 rank, rank u64 dims, then the
/// values as row-major float64. Every integer and value is little-endian.
inline constexpr char kArrayMagic[8] = {'C', 'C', 'D', 'F', '6', '4', 'v', '1'};

class ArrayFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Array {
  std::vector<std::uint64_t> dims;
  Vector values;
};

void write_array(const std::filesystem::path& path, const std::vector<std::uint64_t>& dims,
                 const Vector& values);
Array read_array(const std::filesystem::path& path);

/// Serialized bytes of write_array, for hashing without touching disk.
std::string encode_array(const std::vector<std::uint64_t>& dims, const Vector& values);
Array decode_array(const std::string& bytes);

/// 16-bit binary PGM, min-max scaled; a constant image maps to 0.
/// `values` is row-major with `rows` rows.
void write_pgm16(const std::filesystem::path& path, const Vector& values, Index rows, Index cols);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t value);

}  // namespace ccd
