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

// PNG and SVG rendering of grids, predictions and retention curves.

#ifndef GRIDCAST__RENDER_HPP_
#define GRIDCAST__RENDER_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridcast/grid.hpp"

namespace gridcast
{

/// Input that no renderer understands.
class UnsupportedInput : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

struct Rgb8
{
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  bool operator==(const Rgb8 &) const = default;
};

/// 8-bit RGB raster, top row first.
struct Image
{
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  Image() = default;
  Image(int w, int h) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3, 0) {}

  Rgb8 at(int x, int y) const;
  void set(int x, int y, Rgb8 c);
};

void write_png(const std::filesystem::path & path, const Image & image);
Image read_png(const std::filesystem::path & path);

/// Grid row 0 ends up at the bottom of the image; each cell is `scale` pixels.
Image render_rgb(const RgbImage & grid, int scale = 4);
Image render_dogm(const DogmFrame & frame, int scale = 4);

/// `steps` colours from blue (present) to red (last step), all distinct.
std::vector<Rgb8> step_ramp(int steps);

struct PredictionRender
{
  Image image;  // composite above a legend strip
  std::vector<Rgb8> legend;
  int legend_top = 0;  // first image row of the legend strip
};

/// Steps are painted in order over black; each cell blends towards the
/// step colour by its probability.
PredictionRender render_prediction(std::span<const VehicleGrid> steps, int scale = 4);

struct RetentionSeries
{
  std::string label;
  std::vector<double> time_s;
  std::vector<double> percent;
};

/// Static and dynamic series per system from a retention CSV.
std::vector<RetentionSeries> retention_series_from_csv(const std::string & csv);
/// The same series from an evaluation report.
std::vector<RetentionSeries> retention_series_from_report(const nlohmann::json & report);

/// Line chart, x over the observed horizon, y over 0..100 %.
std::string retention_svg(const std::vector<RetentionSeries> & series);

/// Renders a DOGM or prediction GRD1 file to PNG, a retention CSV or an
/// evaluation report to SVG. Returns the files written.
std::vector<std::filesystem::path> render_file(const std::filesystem::path & input,
                                               const std::filesystem::path & out_dir, int scale = 4);

}  // namespace gridcast

#endif  // GRIDCAST__RENDER_HPP_
