// Copyright 2026 The GridCast Authors
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

// GRD1 grid tensor files.
//
// 32-byte header, all integers little-endian:
//   [0, 4)   magic "GRD1"
//   [4, 6)   format version (u16) = 1
//   [6, 8)   dtype (u16): 1 = f32 LE, 2 = u8
//   [8, 24)  dims T, C, H, W (u32 each, unused dims = 1)
//   [24, 32) reserved, zero
// followed by the row-major payload.

#ifndef GRIDCAST__GRD1_HPP_
#define GRIDCAST__GRD1_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace gridcast
{

class FormatError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

enum class GrdType : std::uint16_t { kFloat32 = 1, kUInt8 = 2 };

inline constexpr std::size_t kGrdHeaderBytes = 32;

struct GrdTensor
{
  GrdType dtype = GrdType::kFloat32;
  std::array<std::uint32_t, 4> dims{1, 1, 1, 1};  // T, C, H, W
  std::vector<float> f32;
  std::vector<std::uint8_t> u8;

  std::size_t element_count() const;
  std::size_t payload_bytes() const;

  static GrdTensor make_f32(std::array<std::uint32_t, 4> dims, std::vector<float> values);
  static GrdTensor make_u8(std::array<std::uint32_t, 4> dims, std::vector<std::uint8_t> values);

  /// Value at flat index as float regardless of dtype.
  float at(std::size_t i) const;
};

void write_grd1(std::ostream & os, const GrdTensor & t);
GrdTensor read_grd1(std::istream & is);

void save_grd1(const std::filesystem::path & path, const GrdTensor & t);
GrdTensor load_grd1(const std::filesystem::path & path);

}  // namespace gridcast

#endif  // GRIDCAST__GRD1_HPP_
