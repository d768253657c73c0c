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

#include <fstream>
#include <set>
#include <tuple>

#include "../support/temp_dir.hpp"
#include "gridcast/grd1.hpp"
#include "gridcast/render.hpp"

using namespace gridcast;
using gridcast::testing::TempDir;

namespace
{

GridSpec spec_of(int side) { return GridSpec(Pose2D{}, side, 1.0); }

DogmFrame all_unknown(int side)
{
  DogmFrame f(spec_of(side));
  for (int ch = 0; ch < 4; ++ch) {
    std::fill(f.planes[static_cast<std::size_t>(ch)].begin(), f.planes[static_cast<std::size_t>(ch)].end(),
              ch == kUnknown ? 1.0F : 0.0F);
  }
  return f;
}

std::tuple<int, int, int> key(Rgb8 c) { return {c.r, c.g, c.b}; }

}  // namespace

TEST_CASE("all-unknown DOGM renders all red")
{
  TempDir dir("gc_render");
  const auto path = dir / "unknown.png";
  write_png(path, render_dogm(all_unknown(8), 3));
  const Image img = read_png(path);
  CHECK(img.width == 24);
  CHECK(img.height == 24);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      CHECK(img.at(x, y) == Rgb8{255, 0, 0});
    }
  }
}

TEST_CASE("row zero is drawn at the bottom")
{
  DogmFrame f = all_unknown(4);
  const std::size_t i = f.spec.flat({0, 1});  // row 0, column 1
  f.plane(kUnknown)[i] = 0.0F;
  f.plane(kDynamic)[i] = 1.0F;
  const Image img = render_dogm(f, 2);
  CHECK(img.at(2, 7) == Rgb8{0, 255, 0});
  CHECK(img.at(2, 0) == Rgb8{255, 0, 0});
}

TEST_CASE("step ramp colours are distinct and run blue to red")
{
  for (int n : {2, 6, 11}) {
    const auto ramp = step_ramp(n);
    std::set<std::tuple<int, int, int>> seen;
    for (const auto & c : ramp) {
      seen.insert(key(c));
    }
    CHECK(seen.size() == static_cast<std::size_t>(n));
    CHECK(ramp.front() == Rgb8{0, 0, 255});
    CHECK(ramp.back() == Rgb8{255, 0, 0});
  }
}

TEST_CASE("six-step prediction shows six legend colours")
{
  const GridSpec spec = spec_of(12);
  std::vector<VehicleGrid> steps(6, VehicleGrid(spec));
  for (int k = 0; k < 6; ++k) {
    steps[static_cast<std::size_t>(k)].occupancy[spec.flat({5, 2 * k})] = 1.0F;
    steps[static_cast<std::size_t>(k)].occupancy[spec.flat({8, 2 * k})] = 0.5F;
  }
  const PredictionRender r = render_prediction(steps, 4);
  CHECK(r.legend.size() == 6);

  TempDir dir("gc_pred");
  write_png(dir / "pred.png", r.image);
  const Image img = read_png(dir / "pred.png");
  std::set<std::tuple<int, int, int>> legend;
  for (int x = 0; x < img.width; ++x) {
    legend.insert(key(img.at(x, r.legend_top + 1)));
  }
  CHECK(legend.size() == 6);
  for (const auto & c : r.legend) {
    CHECK(legend.count(key(c)) == 1);
  }

  // full probability shows the step colour; half probability is dimmer
  const int y_full = (12 - 1 - 5) * 4 + 1;
  const int y_half = (12 - 1 - 8) * 4 + 1;
  for (int k = 0; k < 6; ++k) {
    const Rgb8 full = img.at(2 * k * 4 + 1, y_full);
    CHECK(full == r.legend[static_cast<std::size_t>(k)]);
    const Rgb8 half = img.at(2 * k * 4 + 1, y_half);
    CHECK(half.r + half.g + half.b < full.r + full.g + full.b);
    CHECK(half.r + half.g + half.b > 0);
  }
  CHECK(img.at(1, 1) == Rgb8{0, 0, 0});
}

TEST_CASE("retention curve svg spans the horizon")
{
  const std::string csv =
      "system,time_s,static_retained,static_total,static_percent,dynamic_retained,dynamic_total,dynamic_percent,"
      "excluded\n"
      "model,0.500000,4,4,100.000000,3,3,100.000000,0\n"
      "model,1.000000,4,4,100.000000,3,3,100.000000,0\n"
      "model,1.500000,4,4,100.000000,2,3,66.666667,0\n"
      "model,2.000000,4,4,100.000000,2,3,66.666667,0\n"
      "model,2.500000,4,4,100.000000,1,3,33.333333,0\n";
  const auto series = retention_series_from_csv(csv);
  REQUIRE(series.size() == 2);
  CHECK(series[0].label == "model static");
  CHECK(series[1].label == "model dynamic");
  CHECK(series[1].percent.back() == doctest::Approx(33.333333));

  const std::string svg = retention_svg(series);
  CHECK(svg.find("data-min=\"0.5\"") != std::string::npos);
  CHECK(svg.find("data-max=\"2.5\"") != std::string::npos);
  CHECK(svg.find(">0.5</text>") != std::string::npos);
  CHECK(svg.find(">2.5</text>") != std::string::npos);
  CHECK(svg.find(">0.0</text>") == std::string::npos);
  CHECK(std::count(svg.begin(), svg.end(), '\n') > 10);
  CHECK(svg.find("<polyline") != std::string::npos);

  CHECK_THROWS_AS(retention_series_from_csv("time,x\n1,2\n"), FormatError);
  CHECK_THROWS_AS(retention_series_from_csv(csv + "model,abc,1,1,1,1,1,1,0\n"), FormatError);
}

TEST_CASE("render_file dispatches on the input type")
{
  TempDir dir("gc_render_file");
  const std::uint32_t S = 6;
  std::vector<float> dogm(2 * 4 * S * S, 0.0F);
  for (std::size_t i = 3 * S * S; i < 4 * S * S; ++i) {
    dogm[i] = 1.0F;  // frame 0 unknown
  }
  for (std::size_t i = (4 + 0) * S * S; i < (4 + 1) * S * S; ++i) {
    dogm[i] = 1.0F;  // frame 1 free
  }
  save_grd1(dir / "dogm.grd", GrdTensor::make_f32({2, 4, S, S}, dogm));
  const auto pngs = render_file(dir / "dogm.grd", dir / "out", 2);
  REQUIRE(pngs.size() == 2);
  CHECK(read_png(pngs[0]).at(0, 0) == Rgb8{255, 0, 0});
  CHECK(read_png(pngs[1]).at(0, 0) == Rgb8{0, 0, 0});

  save_grd1(dir / "targets.grd", GrdTensor::make_u8({6, 1, S, S}, std::vector<std::uint8_t>(6 * S * S, 0)));
  const auto pred = render_file(dir / "targets.grd", dir / "out", 2);
  REQUIRE(pred.size() == 1);
  CHECK(read_png(pred[0]).height > read_png(pred[0]).width);

  std::ofstream(dir / "curve.csv") << "system,time_s,static_percent,dynamic_percent\nm,0.5,100,90\nm,2.5,100,50\n";
  const auto svg = render_file(dir / "curve.csv", dir / "out");
  REQUIRE(svg.size() == 1);
  CHECK(svg[0].extension() == ".svg");

  std::ofstream(dir / "notes.txt") << "hello";
  CHECK_THROWS_AS(render_file(dir / "notes.txt", dir / "out"), UnsupportedInput);
  save_grd1(dir / "odd.grd", GrdTensor::make_f32({1, 3, S, S}, std::vector<float>(3 * S * S, 0.0F)));
  CHECK_THROWS_AS(render_file(dir / "odd.grd", dir / "out"), UnsupportedInput);
  std::ofstream(dir / "other.json") << R"({"a": 1})";
  CHECK_THROWS_AS(render_file(dir / "other.json", dir / "out"), UnsupportedInput);
}

TEST_CASE("png round trip")
{
  Image img(3, 2);
  img.set(0, 0, {1, 2, 3});
  img.set(2, 1, {250, 128, 7});
  TempDir dir("gc_png");
  write_png(dir / "a.png", img);
  const Image back = read_png(dir / "a.png");
  CHECK(back.width == 3);
  CHECK(back.height == 2);
  CHECK(back.rgb == img.rgb);
  std::ofstream(dir / "bad.png") << "not a png";
  CHECK_THROWS_AS(read_png(dir / "bad.png"), FormatError);
}
