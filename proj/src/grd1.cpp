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

#include "gridcast/grd1.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace gridcast
{

namespace
{

constexpr char kMagic[4] = {'G', 'R', 'D', '1'};
constexpr std::uint16_t kVersion = 1;

void put_u16(unsigned char * p, std::uint16_t v)
{
  p[0] = static_cast<unsigned char>(v & 0xFF);
  p[1] = static_cast<unsigned char>(v >> 8);
}

void put_u32(unsigned char * p, std::uint32_t v)
{
  for (int i = 0; i < 4; ++i) {
    p[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
  }
}

std::uint16_t get_u16(const unsigned char * p)
{
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32(const unsigned char * p)
{
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  }
  return v;
}

}  // namespace

std::size_t GrdTensor::element_count() const
{
  std::size_t n = 1;
  for (auto d : dims) {
    n *= d;
  }
  return n;
}

std::size_t GrdTensor::payload_bytes() const
{
  return element_count() * (dtype == GrdType::kFloat32 ? 4 : 1);
}

GrdTensor GrdTensor::make_f32(std::array<std::uint32_t, 4> dims, std::vector<float> values)
{
  GrdTensor t;
  t.dtype = GrdType::kFloat32;
  t.dims = dims;
  t.f32 = std::move(values);
  if (t.f32.size() != t.element_count()) {
    throw std::invalid_argument("GRD1: value count does not match dims");
  }
  return t;
}

GrdTensor GrdTensor::make_u8(std::array<std::uint32_t, 4> dims, std::vector<std::uint8_t> values)
{
  GrdTensor t;
  t.dtype = GrdType::kUInt8;
  t.dims = dims;
  t.u8 = std::move(values);
  if (t.u8.size() != t.element_count()) {
    throw std::invalid_argument("GRD1: value count does not match dims");
  }
  return t;
}

float GrdTensor::at(std::size_t i) const
{
  return dtype == GrdType::kFloat32 ? f32[i] : static_cast<float>(u8[i]);
}

void write_grd1(std::ostream & os, const GrdTensor & t)
{
  unsigned char header[kGrdHeaderBytes] = {};
  std::memcpy(header, kMagic, 4);
  put_u16(header + 4, kVersion);
  put_u16(header + 6, static_cast<std::uint16_t>(t.dtype));
  for (int i = 0; i < 4; ++i) {
    put_u32(header + 8 + 4 * i, t.dims[i]);
  }
  os.write(reinterpret_cast<const char *>(header), kGrdHeaderBytes);

  if (t.dtype == GrdType::kUInt8) {
    os.write(reinterpret_cast<const char *>(t.u8.data()), static_cast<std::streamsize>(t.u8.size()));
  } else if constexpr (std::endian::native == std::endian::little) {
    os.write(reinterpret_cast<const char *>(t.f32.data()),
             static_cast<std::streamsize>(t.f32.size() * sizeof(float)));
  } else {
    std::vector<unsigned char> buf(t.f32.size() * 4);
    for (std::size_t i = 0; i < t.f32.size(); ++i) {
      put_u32(buf.data() + 4 * i, std::bit_cast<std::uint32_t>(t.f32[i]));
    }
    os.write(reinterpret_cast<const char *>(buf.data()), static_cast<std::streamsize>(buf.size()));
  }
  if (!os) {
    throw FormatError("GRD1: write failed");
  }
}

GrdTensor read_grd1(std::istream & is)
{
  unsigned char header[kGrdHeaderBytes];
  if (!is.read(reinterpret_cast<char *>(header), kGrdHeaderBytes)) {
    throw FormatError("GRD1: truncated header");
  }
  if (std::memcmp(header, kMagic, 4) != 0) {
    throw FormatError("GRD1: bad magic");
  }
  if (get_u16(header + 4) != kVersion) {
    throw FormatError("GRD1: unsupported version " + std::to_string(get_u16(header + 4)));
  }
  const std::uint16_t dtype = get_u16(header + 6);
  if (dtype != 1 && dtype != 2) {
    throw FormatError("GRD1: unknown dtype code " + std::to_string(dtype));
  }
  for (int i = 24; i < 32; ++i) {
    if (header[i] != 0) {
      throw FormatError("GRD1: reserved header bytes are not zero");
    }
  }
  GrdTensor t;
  t.dtype = static_cast<GrdType>(dtype);
  for (int i = 0; i < 4; ++i) {
    t.dims[i] = get_u32(header + 8 + 4 * i);
  }
  const std::size_t n = t.element_count();
  if (t.dtype == GrdType::kUInt8) {
    t.u8.resize(n);
    is.read(reinterpret_cast<char *>(t.u8.data()), static_cast<std::streamsize>(n));
  } else {
    std::vector<unsigned char> buf(n * 4);
    is.read(reinterpret_cast<char *>(buf.data()), static_cast<std::streamsize>(buf.size()));
    t.f32.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      t.f32[i] = std::bit_cast<float>(get_u32(buf.data() + 4 * i));
    }
  }
  if (!is) {
    throw FormatError("GRD1: truncated payload");
  }
  return t;
}

void save_grd1(const std::filesystem::path & path, const GrdTensor & t)
{
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) {
    throw FormatError("cannot open " + path.string() + " for writing");
  }
  write_grd1(os, t);
}

GrdTensor load_grd1(const std::filesystem::path & path)
{
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw FormatError("cannot open " + path.string());
  }
  try {
    return read_grd1(is);
  } catch (const FormatError & e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace gridcast
