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

#include "gridcast/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace gridcast
{

namespace
{

void require_same_size(std::span<const float> a, std::span<const float> b, const char * op)
{
  if (a.size() != b.size()) {
    throw std::invalid_argument(std::string(op) + ": prediction has " + std::to_string(a.size()) +
                                " cells, ground truth " + std::to_string(b.size()));
  }
}

void require_same_spec(const VehicleGrid & a, const VehicleGrid & b, const char * op)
{
  if (!(a.spec == b.spec)) {
    throw std::invalid_argument(std::string(op) + ": prediction and ground truth grids differ");
  }
}

bool positive(float g) { return g > 0.5F; }

}  // namespace

double soft_iou(std::span<const float> pred, std::span<const float> gt)
{
  require_same_size(pred, gt, "soft_iou");
  double inter = 0.0;
  double uni = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double p = pred[i];
    const double g = gt[i];
    if (g != 0.0 && g != 1.0) {
      throw std::invalid_argument("soft_iou: ground truth must be binary");
    }
    inter += p * g;
    uni += p + g - p * g;
  }
  return uni > 0.0 ? inter / uni : 1.0;
}

double soft_iou(const VehicleGrid & pred, const VehicleGrid & gt)
{
  require_same_spec(pred, gt, "soft_iou");
  return soft_iou(std::span<const float>(pred.occupancy), std::span<const float>(gt.occupancy));
}

double iou_binary(std::span<const float> pred, std::span<const float> gt, double threshold)
{
  require_same_size(pred, gt, "iou_binary");
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred[i] > threshold;
    const bool g = positive(gt[i]);
    inter += (p && g) ? 1 : 0;
    uni += (p || g) ? 1 : 0;
  }
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 1.0;
}

double iou_binary(const VehicleGrid & pred, const VehicleGrid & gt, double threshold)
{
  require_same_spec(pred, gt, "iou_binary");
  return iou_binary(std::span<const float>(pred.occupancy), std::span<const float>(gt.occupancy), threshold);
}

std::vector<PrPoint> pr_curve(std::span<const float> pred, std::span<const float> gt)
{
  require_same_size(pred, gt, "pr_curve");
  // histogram of predictions by the number of thresholds they exceed
  std::vector<std::size_t> pos_hist(kAucThresholds + 1, 0);
  std::vector<std::size_t> neg_hist(kAucThresholds + 1, 0);
  std::size_t positives = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    int above = 0;
    while (above < kAucThresholds && pred[i] > 0.01 * above) {
      ++above;
    }
    if (positive(gt[i])) {
      ++positives;
      ++pos_hist[static_cast<std::size_t>(above)];
    } else {
      ++neg_hist[static_cast<std::size_t>(above)];
    }
  }
  std::vector<PrPoint> curve(kAucThresholds);
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (int k = kAucThresholds - 1; k >= 0; --k) {
    // cells exceeding threshold k are those exceeding at least k + 1 thresholds
    tp += pos_hist[static_cast<std::size_t>(k) + 1];
    fp += neg_hist[static_cast<std::size_t>(k) + 1];
    PrPoint & pt = curve[static_cast<std::size_t>(k)];
    pt.threshold = 0.01 * k;
    pt.has_predictions = tp + fp > 0;
    pt.precision = pt.has_predictions ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 1.0;
    pt.recall = positives > 0 ? static_cast<double>(tp) / static_cast<double>(positives) : 0.0;
  }
  return curve;
}

std::optional<double> auc_pr(std::span<const float> pred, std::span<const float> gt)
{
  require_same_size(pred, gt, "auc_pr");
  if (std::none_of(gt.begin(), gt.end(), positive)) {
    return std::nullopt;
  }
  const auto curve = pr_curve(pred, gt);
  std::vector<PrPoint> pts;
  for (auto it = curve.rbegin(); it != curve.rend(); ++it) {
    if (it->has_predictions) {
      pts.push_back(*it);
    }
  }
  if (pts.empty()) {
    return 0.0;
  }
  std::stable_sort(pts.begin(), pts.end(), [](const PrPoint & a, const PrPoint & b) { return a.recall < b.recall; });
  double area = pts.front().recall * pts.front().precision;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    area += (pts[i].recall - pts[i - 1].recall) * 0.5 * (pts[i].precision + pts[i - 1].precision);
  }
  return area;
}

std::optional<double> auc_pr(const VehicleGrid & pred, const VehicleGrid & gt)
{
  require_same_spec(pred, gt, "auc_pr");
  return auc_pr(std::span<const float>(pred.occupancy), std::span<const float>(gt.occupancy));
}

std::vector<std::size_t> footprint_cells(const GridSpec & spec, const OrientedBox & box)
{
  std::vector<std::size_t> cells;
  for_each_cell_in_box(spec, box, 0.0, [&](CellIndex, std::size_t flat) { cells.push_back(flat); });
  if (cells.empty()) {
    if (const auto c = world_to_cell(box.pose.position(), spec)) {
      cells.push_back(spec.flat(*c));
    }
  }
  return cells;
}

std::vector<RetentionStep> retention(std::span<const VehicleGrid> preds, const Scenario & scenario,
                                     const std::set<int> & perceived, std::span<const int> frames,
                                     double threshold)
{
  if (preds.size() != frames.size()) {
    throw std::invalid_argument("retention: " + std::to_string(preds.size()) + " predictions for " +
                                std::to_string(frames.size()) + " frames");
  }
  std::vector<RetentionStep> out(preds.size());
  for (std::size_t k = 0; k < preds.size(); ++k) {
    const VehicleGrid & pred = preds[k];
    const float limit = static_cast<float>(threshold);
    for (int id : perceived) {
      const VehicleTrack * v = find_vehicle(scenario, id);
      if (!v) {
        throw std::invalid_argument("retention: unknown vehicle id " + std::to_string(id));
      }
      const auto cells = footprint_cells(pred.spec, v->box_at(frames[k]));
      if (cells.empty()) {
        ++out[k].excluded;
        continue;
      }
      const bool kept = std::any_of(cells.begin(), cells.end(),
                                    [&](std::size_t i) { return pred.occupancy[i] > limit; });
      RetentionCounts & counts = v->motion_class == MotionClass::kDynamic ? out[k].dyn : out[k].stat;
      ++counts.total;
      counts.retained += kept ? 1 : 0;
    }
  }
  return out;
}

VehicleGrid occupancy_of(const DogmFrame & frame)
{
  VehicleGrid g(frame.spec);
  for (std::size_t i = 0; i < g.occupancy.size(); ++i) {
    g.occupancy[i] = frame.occupied(i);
  }
  return g;
}

VehicleGrid ogm_cleanup(const VehicleGrid & occupancy, const RasterMap & raster, std::span<const OrientedBox> boxes,
                        double tolerance)
{
  if (!(occupancy.spec == raster.spec)) {
    throw std::invalid_argument("ogm_cleanup: occupancy and raster map grids differ");
  }
  const GridSpec & spec = occupancy.spec;
  const int n = spec.cells_per_side();
  VehicleGrid out(spec);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const std::size_t i = spec.flat({r, c});
      if (occupancy.occupancy[i] <= 0.0F || raster.channels[0][i] < 0.5F) {
        continue;
      }
      const Vec2 p = cell_to_world({r, c}, spec);
      const bool near = std::any_of(boxes.begin(), boxes.end(),
                                    [&](const OrientedBox & b) { return b.distance(p) <= tolerance; });
      if (near) {
        out.occupancy[i] = occupancy.occupancy[i];
      }
    }
  }
  return out;
}

VehicleGrid ogm_cleanup(const DogmFrame & frame, const RasterMap & raster, std::span<const OrientedBox> boxes,
                        double tolerance)
{
  return ogm_cleanup(occupancy_of(frame), raster, boxes, tolerance);
}

std::vector<VehicleGrid> baseline_persistence(std::span<const DogmFrame> inputs, int steps)
{
  if (inputs.empty() || steps < 0) {
    throw std::invalid_argument("baseline_persistence: need at least one input frame");
  }
  return std::vector<VehicleGrid>(static_cast<std::size_t>(steps) + 1, occupancy_of(inputs.back()));
}

namespace
{

struct Cluster
{
  std::vector<std::size_t> cells;
  double row = 0.0;  // mass-weighted centroid, cell units
  double col = 0.0;
};

std::vector<Cluster> dynamic_clusters(const DogmFrame & frame, double threshold)
{
  const int n = frame.spec.cells_per_side();
  const auto & dyn = frame.plane(kDynamic);
  std::vector<int> label(dyn.size(), -1);
  std::vector<Cluster> clusters;
  for (std::size_t seed = 0; seed < dyn.size(); ++seed) {
    if (label[seed] >= 0 || dyn[seed] <= threshold) {
      continue;
    }
    Cluster cl;
    const int id = static_cast<int>(clusters.size());
    std::vector<std::size_t> stack{seed};
    label[seed] = id;
    double mass = 0.0;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      cl.cells.push_back(i);
      const int r = static_cast<int>(i) / n;
      const int c = static_cast<int>(i) % n;
      mass += dyn[i];
      cl.row += dyn[i] * r;
      cl.col += dyn[i] * c;
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          const int rr = r + dr;
          const int cc = c + dc;
          if (rr < 0 || rr >= n || cc < 0 || cc >= n) {
            continue;
          }
          const std::size_t j = static_cast<std::size_t>(rr) * n + cc;
          if (label[j] < 0 && dyn[j] > threshold) {
            label[j] = id;
            stack.push_back(j);
          }
        }
      }
    }
    cl.row /= mass;
    cl.col /= mass;
    std::sort(cl.cells.begin(), cl.cells.end());
    clusters.push_back(std::move(cl));
  }
  return clusters;
}

// Adds `mass` at fractional cell position (r, c) by bilinear splatting.
void splat(std::vector<float> & grid, int n, double r, double c, double mass)
{
  const double r0 = std::floor(r);
  const double c0 = std::floor(c);
  const double fr = r - r0;
  const double fc = c - c0;
  const double w[2][2] = {{(1 - fr) * (1 - fc), (1 - fr) * fc}, {fr * (1 - fc), fr * fc}};
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const double rr = r0 + a;
      const double cc = c0 + b;
      if (w[a][b] <= 0.0 || rr < 0 || rr >= n || cc < 0 || cc >= n) {
        continue;
      }
      grid[static_cast<std::size_t>(rr) * n + static_cast<std::size_t>(cc)] += static_cast<float>(mass * w[a][b]);
    }
  }
}

}  // namespace

std::vector<VehicleGrid> baseline_const_velocity(std::span<const DogmFrame> inputs, int steps,
                                                 const ConstVelocityParams & params)
{
  if (inputs.size() < 2 || steps < 0) {
    throw std::invalid_argument("baseline_const_velocity: need at least two input frames");
  }
  const DogmFrame & last = inputs.back();
  const DogmFrame & prev = inputs[inputs.size() - 2];
  const GridSpec & spec = last.spec;
  const int n = spec.cells_per_side();
  const auto now = dynamic_clusters(last, params.dynamic_threshold);
  const auto before = dynamic_clusters(prev, params.dynamic_threshold);
  const double max_cells = params.max_match_distance / spec.resolution();

  std::vector<std::pair<double, double>> velocity(now.size(), {0.0, 0.0});
  for (std::size_t i = 0; i < now.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (const Cluster & b : before) {
      const double d = std::hypot(now[i].row - b.row, now[i].col - b.col);
      if (d < best && d <= max_cells) {
        best = d;
        velocity[i] = {now[i].row - b.row, now[i].col - b.col};
      }
    }
  }

  std::vector<float> base(spec.cell_count());
  std::vector<bool> moving(spec.cell_count(), false);
  for (const Cluster & cl : now) {
    for (std::size_t i : cl.cells) {
      moving[i] = true;
    }
  }
  const auto & stat = last.plane(kStatic);
  const auto & dyn = last.plane(kDynamic);
  for (std::size_t i = 0; i < base.size(); ++i) {
    base[i] = stat[i] + (moving[i] ? 0.0F : dyn[i]);
  }

  std::vector<VehicleGrid> out;
  for (int k = 0; k <= steps; ++k) {
    VehicleGrid g(spec);
    g.occupancy = base;
    const double frames = static_cast<double>(params.frames_per_step) * k;
    for (std::size_t ci = 0; ci < now.size(); ++ci) {
      const auto [vr, vc] = velocity[ci];
      for (std::size_t i : now[ci].cells) {
        const int r = static_cast<int>(i) / n;
        const int c = static_cast<int>(i) % n;
        splat(g.occupancy, n, r + vr * frames, c + vc * frames, dyn[i]);
      }
    }
    for (float & v : g.occupancy) {
      v = std::min(v, 1.0F);
    }
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace gridcast
