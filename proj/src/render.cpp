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

#include "gridcast/render.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "gridcast/grd1.hpp"

namespace gridcast
{

Rgb8 Image::at(int x, int y) const
{
  const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
  return {rgb[i], rgb[i + 1], rgb[i + 2]};
}

void Image::set(int x, int y, Rgb8 c)
{
  const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
  rgb[i] = c.r;
  rgb[i + 1] = c.g;
  rgb[i + 2] = c.b;
}

void write_png(const std::filesystem::path & path, const Image & image)
{
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width);
  png.height = static_cast<png_uint_32>(image.height);
  png.format = PNG_FORMAT_RGB;
  if (png_image_write_to_file(&png, path.c_str(), 0, image.rgb.data(), 0, nullptr) == 0) {
    throw std::runtime_error("cannot write " + path.string() + ": " + png.message);
  }
}

Image read_png(const std::filesystem::path & path)
{
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (png_image_begin_read_from_file(&png, path.c_str()) == 0) {
    throw FormatError("cannot read " + path.string() + ": " + png.message);
  }
  png.format = PNG_FORMAT_RGB;
  Image img(static_cast<int>(png.width), static_cast<int>(png.height));
  if (png_image_finish_read(&png, nullptr, img.rgb.data(), 0, nullptr) == 0) {
    throw FormatError("cannot decode " + path.string() + ": " + png.message);
  }
  return img;
}

namespace
{

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); }

void fill_cell(Image & img, int side, int row, int col, int scale, Rgb8 c)
{
  const int y0 = (side - 1 - row) * scale;
  for (int y = y0; y < y0 + scale; ++y) {
    for (int x = col * scale; x < (col + 1) * scale; ++x) {
      img.set(x, y, c);
    }
  }
}

}  // namespace

Image render_rgb(const RgbImage & grid, int scale)
{
  const int side = grid.side;
  Image img(side * scale, side * scale);
  for (int row = 0; row < side; ++row) {
    for (int col = 0; col < side; ++col) {
      const std::size_t i = static_cast<std::size_t>(row) * side + col;
      fill_cell(img, side, row, col, scale,
                {to_byte(grid.channels[0][i]), to_byte(grid.channels[1][i]), to_byte(grid.channels[2][i])});
    }
  }
  return img;
}

Image render_dogm(const DogmFrame & frame, int scale) { return render_rgb(dogm_to_rgb(frame), scale); }

std::vector<Rgb8> step_ramp(int steps)
{
  std::vector<Rgb8> out;
  for (int k = 0; k < steps; ++k) {
    // hue 240 (blue) down to 0 (red) at full saturation and value
    const double hue = steps > 1 ? 240.0 * (1.0 - static_cast<double>(k) / (steps - 1)) : 240.0;
    const double h = hue / 60.0;
    const double x = 1.0 - std::fabs(std::fmod(h, 2.0) - 1.0);
    double r = 0;
    double g = 0;
    double b = 0;
    if (h < 1) {
      r = 1, g = x;
    } else if (h < 2) {
      r = x, g = 1;
    } else if (h < 3) {
      g = 1, b = x;
    } else if (h < 4) {
      g = x, b = 1;
    } else {
      r = x, b = 1;
    }
    out.push_back({to_byte(r), to_byte(g), to_byte(b)});
  }
  return out;
}

PredictionRender render_prediction(std::span<const VehicleGrid> steps, int scale)
{
  if (steps.empty()) {
    throw std::invalid_argument("render_prediction: no steps");
  }
  const int side = steps.front().spec.cells_per_side();
  const int n = static_cast<int>(steps.size());
  PredictionRender out;
  out.legend = step_ramp(n);
  const int map_px = side * scale;
  const int legend_h = std::max(4, 2 * scale);
  out.legend_top = map_px;
  out.image = Image(map_px, map_px + legend_h);

  std::vector<std::array<double, 3>> acc(static_cast<std::size_t>(side) * side, {0.0, 0.0, 0.0});
  for (int k = 0; k < n; ++k) {
    const auto & g = steps[static_cast<std::size_t>(k)];
    if (g.spec.cells_per_side() != side) {
      throw std::invalid_argument("render_prediction: steps differ in size");
    }
    const Rgb8 c = out.legend[static_cast<std::size_t>(k)];
    const std::array<double, 3> col{c.r / 255.0, c.g / 255.0, c.b / 255.0};
    for (std::size_t i = 0; i < acc.size(); ++i) {
      const double p = std::clamp(static_cast<double>(g.occupancy[i]), 0.0, 1.0);
      for (int ch = 0; ch < 3; ++ch) {
        acc[i][ch] = acc[i][ch] * (1.0 - p) + col[ch] * p;
      }
    }
  }
  for (int row = 0; row < side; ++row) {
    for (int col = 0; col < side; ++col) {
      const auto & a = acc[static_cast<std::size_t>(row) * side + col];
      fill_cell(out.image, side, row, col, scale, {to_byte(a[0]), to_byte(a[1]), to_byte(a[2])});
    }
  }
  for (int x = 0; x < map_px; ++x) {
    const int k = std::min(n - 1, x * n / map_px);
    for (int y = map_px; y < out.image.height; ++y) {
      out.image.set(x, y, out.legend[static_cast<std::size_t>(k)]);
    }
  }
  return out;
}

std::vector<RetentionSeries> retention_series_from_csv(const std::string & csv)
{
  std::istringstream is(csv);
  std::string line;
  if (!std::getline(is, line)) {
    throw FormatError("retention CSV is empty");
  }
  std::vector<std::string> header;
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) {
      header.push_back(cell);
    }
  }
  auto column = [&](const std::string & name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw FormatError("retention CSV lacks column '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_sys = column("system");
  const std::size_t c_t = column("time_s");
  const std::size_t c_stat = column("static_percent");
  const std::size_t c_dyn = column("dynamic_percent");

  std::vector<RetentionSeries> out;
  std::map<std::string, std::size_t> index;
  while (std::getline(is, line)) {
    if (line.empty()) {
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      cells.push_back(cell);
    }
    if (cells.size() != header.size()) {
      throw FormatError("retention CSV row has " + std::to_string(cells.size()) + " fields: " + line);
    }
    for (const auto & [suffix, col] : {std::pair{"static", c_stat}, std::pair{"dynamic", c_dyn}}) {
      const std::string label = cells[c_sys] + " " + suffix;
      auto [it, added] = index.emplace(label, out.size());
      if (added) {
        out.push_back({label, {}, {}});
      }
      try {
        out[it->second].time_s.push_back(std::stod(cells[c_t]));
        out[it->second].percent.push_back(std::stod(cells[col]));
      } catch (const std::logic_error &) {
        throw FormatError("retention CSV has a non-numeric field: " + line);
      }
    }
  }
  return out;
}

std::vector<RetentionSeries> retention_series_from_report(const nlohmann::json & report)
{
  if (!report.is_object() || !report.contains("systems")) {
    throw UnsupportedInput("JSON input is not an evaluation report");
  }
  std::vector<RetentionSeries> out;
  for (const auto & [name, sys] : report.at("systems").items()) {
    for (const char * kind : {"static", "dynamic"}) {
      RetentionSeries s{name + " " + kind, {}, {}};
      for (const auto & e : sys.at("retention").at(kind)) {
        s.time_s.push_back(e.at("time_s").get<double>());
        s.percent.push_back(e.at("percent").get<double>());
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

std::string retention_svg(const std::vector<RetentionSeries> & series)
{
  double t0 = 0.0;
  double t1 = 0.0;
  bool any = false;
  for (const auto & s : series) {
    for (double t : s.time_s) {
      t0 = any ? std::min(t0, t) : t;
      t1 = any ? std::max(t1, t) : t;
      any = true;
    }
  }
  if (!any) {
    throw std::invalid_argument("retention_svg: no data points");
  }
  if (t1 <= t0) {
    t1 = t0 + 1.0;
  }
  constexpr double kW = 640;
  constexpr double kH = 400;
  constexpr double kLeft = 60;
  constexpr double kRight = 180;
  constexpr double kTop = 20;
  constexpr double kBottom = 50;
  const double pw = kW - kLeft - kRight;
  const double ph = kH - kTop - kBottom;
  auto px = [&](double t) { return kLeft + (t - t0) / (t1 - t0) * pw; };
  auto py = [&](double pct) { return kTop + (1.0 - std::clamp(pct, 0.0, 100.0) / 100.0) * ph; };

  std::vector<double> ticks;
  for (const auto & s : series) {
    ticks.insert(ticks.end(), s.time_s.begin(), s.time_s.end());
  }
  std::sort(ticks.begin(), ticks.end());
  ticks.erase(std::unique(ticks.begin(), ticks.end(), [](double a, double b) { return std::fabs(a - b) < 1e-9; }),
              ticks.end());

  char buf[256];
  std::ostringstream os;
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
                kW, kH, kW, kH);
  os << buf << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof(buf), "<g id=\"x-axis\" data-min=\"%.1f\" data-max=\"%.1f\">\n", t0, t1);
  os << buf;
  std::snprintf(buf, sizeof(buf), "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>\n", kLeft,
                kTop + ph, kLeft + pw, kTop + ph);
  os << buf;
  for (double t : ticks) {
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.2f\" y=\"%.2f\" font-size=\"11\" text-anchor=\"middle\">%.1f</text>\n", px(t),
                  kTop + ph + 16, t);
    os << buf;
  }
  std::snprintf(buf, sizeof(buf), "<text x=\"%.2f\" y=\"%.2f\" font-size=\"12\" text-anchor=\"middle\">time (s)</text>\n",
                kLeft + pw / 2, kH - 10);
  os << buf << "</g>\n<g id=\"y-axis\">\n";
  std::snprintf(buf, sizeof(buf), "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>\n", kLeft,
                kTop, kLeft, kTop + ph);
  os << buf;
  for (int pct = 0; pct <= 100; pct += 20) {
    std::snprintf(buf, sizeof(buf), "<text x=\"%.2f\" y=\"%.2f\" font-size=\"11\" text-anchor=\"end\">%d</text>\n",
                  kLeft - 6, py(pct) + 4, pct);
    os << buf;
  }
  std::snprintf(buf, sizeof(buf),
                "<text x=\"14\" y=\"%.2f\" font-size=\"12\" transform=\"rotate(-90 14 %.2f)\" "
                "text-anchor=\"middle\">retention (%%)</text>\n",
                kTop + ph / 2, kTop + ph / 2);
  os << buf << "</g>\n";

  const auto colours = step_ramp(std::max<int>(2, static_cast<int>(series.size())));
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto & s = series[i];
    const Rgb8 c = colours[i];
    const bool dashed = s.label.find("static") != std::string::npos;
    std::snprintf(buf, sizeof(buf), "<polyline fill=\"none\" stroke=\"#%02x%02x%02x\" stroke-width=\"2\"%s points=\"",
                  c.r, c.g, c.b, dashed ? " stroke-dasharray=\"6 3\"" : "");
    os << buf;
    for (std::size_t k = 0; k < s.time_s.size(); ++k) {
      std::snprintf(buf, sizeof(buf), "%s%.2f,%.2f", k ? " " : "", px(s.time_s[k]), py(s.percent[k]));
      os << buf;
    }
    os << "\"/>\n";
    const double ly = kTop + 14.0 * static_cast<double>(i) + 6;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#%02x%02x%02x\" stroke-width=\"2\"/>"
                  "<text x=\"%.2f\" y=\"%.2f\" font-size=\"11\">",
                  kLeft + pw + 10, ly, kLeft + pw + 30, ly, c.r, c.g, c.b, kLeft + pw + 36, ly + 4);
    os << buf << s.label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

namespace
{

std::string read_text(const std::filesystem::path & p)
{
  std::ifstream is(p, std::ios::binary);
  if (!is) {
    throw std::runtime_error("cannot open " + p.string());
  }
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

void write_text(const std::filesystem::path & p, const std::string & s)
{
  std::ofstream os(p, std::ios::binary);
  os << s;
  if (!os) {
    throw std::runtime_error("cannot write " + p.string());
  }
}

GridSpec render_spec(std::uint32_t side) { return GridSpec({}, static_cast<double>(side), 1.0); }

}  // namespace

std::vector<std::filesystem::path> render_file(const std::filesystem::path & input,
                                               const std::filesystem::path & out_dir, int scale)
{
  if (!std::filesystem::exists(input)) {
    throw std::runtime_error("no such file: " + input.string());
  }
  std::filesystem::create_directories(out_dir);
  const std::string ext = input.extension().string();
  const std::string stem = input.stem().string();
  std::vector<std::filesystem::path> written;

  if (ext == ".csv" || ext == ".json") {
    const std::string text = read_text(input);
    std::vector<RetentionSeries> series;
    if (ext == ".csv") {
      series = retention_series_from_csv(text);
    } else {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(text);
      } catch (const nlohmann::json::parse_error & e) {
        throw FormatError(input.string() + ": " + e.what());
      }
      series = retention_series_from_report(j);
    }
    const auto out = out_dir / (stem + ".svg");
    write_text(out, retention_svg(series));
    written.push_back(out);
    return written;
  }
  if (ext != ".grd") {
    throw UnsupportedInput("cannot render '" + input.string() + "' (expected .grd, .csv or .json)");
  }

  const GrdTensor t = load_grd1(input);
  const auto [n, c, h, w] = t.dims;
  if (h != w) {
    throw UnsupportedInput(input.string() + ": grids must be square");
  }
  const GridSpec spec = render_spec(h);
  const std::size_t plane = spec.cell_count();
  if (c == 4) {
    for (std::uint32_t f = 0; f < n; ++f) {
      DogmFrame frame(spec);
      for (int ch = 0; ch < 4; ++ch) {
        for (std::size_t i = 0; i < plane; ++i) {
          frame.planes[static_cast<std::size_t>(ch)][i] = t.at((static_cast<std::size_t>(f) * 4 + ch) * plane + i);
        }
      }
      char name[64];
      std::snprintf(name, sizeof(name), "_%03u.png", f);
      const auto out = out_dir / (stem + name);
      write_png(out, render_dogm(frame, scale));
      written.push_back(out);
    }
    return written;
  }
  if (c == 1) {
    std::vector<VehicleGrid> steps;
    for (std::uint32_t f = 0; f < n; ++f) {
      VehicleGrid g(spec);
      for (std::size_t i = 0; i < plane; ++i) {
        g.occupancy[i] = t.at(static_cast<std::size_t>(f) * plane + i);
      }
      steps.push_back(std::move(g));
    }
    const auto out = out_dir / (stem + ".png");
    write_png(out, render_prediction(steps, scale).image);
    written.push_back(out);
    return written;
  }
  throw UnsupportedInput(input.string() + ": expected 4 (DOGM) or 1 (prediction) channels, got " + std::to_string(c));
}

}  // namespace gridcast
