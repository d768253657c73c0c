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


#include <doctest.h>

#include <cstring>
#include <stdexcept>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

#include "gridcast/grd1.hpp"

using namespace gridcast;

TEST_CASE("GRD1 header layout")
{
  const GrdTensor t = GrdTensor::make_f32({2, 4, 3, 5}, std::vector<float>(120, 1.5F));
  std::ostringstream os;
  write_grd1(os, t);
  const std::string bytes = os.str();
  REQUIRE(bytes.size() == kGrdHeaderBytes + 120 * 4);
  CHECK(bytes.substr(0, 4) == "GRD1");
  const auto u8 = [&](std::size_t i) { return static_cast<unsigned char>(bytes[i]); };
  CHECK(u8(4) == 1);
  CHECK(u8(5) == 0);
  CHECK(u8(6) == 1);
  CHECK(u8(7) == 0);
  CHECK(u8(8) == 2);
  CHECK(u8(12) == 4);
  CHECK(u8(16) == 3);
  CHECK(u8(20) == 5);
  for (std::size_t i = 24; i < 32; ++i) {
    CHECK(u8(i) == 0);
  }
  // 1.5f = 0x3FC00000 little-endian
  CHECK(u8(32) == 0x00);
  CHECK(u8(34) == 0xC0);
  CHECK(u8(35) == 0x3F);
}

TEST_CASE("GRD1 bit-exact round trip")
{
  std::mt19937 rng(1);
  std::uniform_real_distribution<float> u(-1e6F, 1e6F);
  std::vector<float> v(3 * 7 * 11);
  for (float & x : v) {
    x = u(rng);
  }
  v[0] = -0.0F;
  v[1] = std::numeric_limits<float>::denorm_min();
  v[2] = std::numeric_limits<float>::infinity();
  const GrdTensor t = GrdTensor::make_f32({1, 3, 7, 11}, v);
  std::stringstream ss;
  write_grd1(ss, t);
  const GrdTensor back = read_grd1(ss);
  CHECK(back.dims == t.dims);
  REQUIRE(back.f32.size() == v.size());
  CHECK(std::memcmp(back.f32.data(), v.data(), v.size() * sizeof(float)) == 0);

  std::vector<std::uint8_t> labels(64);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    labels[i] = static_cast<std::uint8_t>(i % 2);
  }
  const auto path = std::filesystem::temp_directory_path() / "gridcast_test_u8.grd";
  save_grd1(path, GrdTensor::make_u8({1, 1, 8, 8}, labels));
  const GrdTensor lb = load_grd1(path);
  CHECK(lb.dtype == GrdType::kUInt8);
  CHECK(lb.u8 == labels);
  CHECK(lb.at(3) == 1.0F);
  std::filesystem::remove(path);
}

TEST_CASE("GRD1 rejects corrupt input")
{
  const GrdTensor t = GrdTensor::make_u8({1, 1, 2, 2}, {1, 0, 0, 1});
  std::ostringstream os;
  write_grd1(os, t);
  const std::string good = os.str();
  auto read = [](std::string s) {
    std::istringstream is(s);
    return read_grd1(is);
  };
  CHECK_NOTHROW(read(good));
  std::string bad = good;
  bad[0] = 'X';
  CHECK_THROWS_AS(read(bad), FormatError);
  bad = good;
  bad[4] = 2;
  CHECK_THROWS_AS(read(bad), FormatError);
  bad = good;
  bad[6] = 9;
  CHECK_THROWS_AS(read(bad), FormatError);
  bad = good;
  bad[27] = 1;
  CHECK_THROWS_AS(read(bad), FormatError);
  CHECK_THROWS_AS(read(good.substr(0, good.size() - 1)), FormatError);
  CHECK_THROWS_AS(read(good.substr(0, 10)), FormatError);
  CHECK_THROWS_AS(load_grd1("/nonexistent/dir/file.grd"), FormatError);
  CHECK_THROWS_AS(GrdTensor::make_u8({1, 1, 2, 2}, {1, 0}), std::invalid_argument);
}
