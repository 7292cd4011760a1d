#include "socnav/world.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace socnav {

const char* to_string(BehaviorStatus s) {
    switch (s) {
        case BehaviorStatus::Idle: return "idle";
        case BehaviorStatus::Navigating: return "navigating";
        case BehaviorStatus::Waiting: return "waiting";
        case BehaviorStatus::Interacting: return "interacting";
    }
    return "idle";
}

std::optional<BehaviorStatus> behavior_status_from_string(const std::string& s) {
    if (s == "idle") return BehaviorStatus::Idle;
    if (s == "navigating") return BehaviorStatus::Navigating;
    if (s == "waiting") return BehaviorStatus::Waiting;
    if (s == "interacting") return BehaviorStatus::Interacting;
    return std::nullopt;
}

const AgentState* WorldSnapshot::find_agent(int id) const {
    for (const auto& a : agents)
        if (a.id == id) return &a;
    return nullptr;
}

OccupancyGrid::OccupancyGrid(int width, int height, double resolution, Pose2D origin,
                             std::vector<std::uint8_t> occupied)
    : width_(width), height_(height), resolution_(resolution), origin_(origin),
      occupied_(std::move(occupied)) {
    if (width_ <= 0 || height_ <= 0) throw std::invalid_argument("grid dimensions must be positive");
    if (resolution_ <= 0.0) throw std::invalid_argument("grid resolution must be positive");
    if (origin_.yaw != 0.0) throw std::invalid_argument("rotated maps are not supported (origin yaw must be 0)");
    if (occupied_.size() != static_cast<std::size_t>(width_) * height_)
        throw std::invalid_argument("grid cell count does not match dimensions");
    build_distance_field();
}

std::shared_ptr<OccupancyGrid> OccupancyGrid::from_ascii(const std::string& art, double resolution,
                                                         Pose2D origin) {
    std::vector<std::string> rows;
    std::istringstream in(art);
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        rows.push_back(line);
    }
    if (rows.empty()) throw std::invalid_argument("inline grid is empty");
    const std::size_t w = rows.front().size();
    for (const auto& r : rows)
        if (r.size() != w) throw std::invalid_argument("inline grid rows differ in length");
    const int width = static_cast<int>(w);
    const int height = static_cast<int>(rows.size());
    std::vector<std::uint8_t> cells(static_cast<std::size_t>(width) * height, 0);
    // First text line is the top of the map; storage row 0 is the bottom.
    for (int cy = 0; cy < height; ++cy) {
        const std::string& r = rows[static_cast<std::size_t>(height - 1 - cy)];
        for (int cx = 0; cx < width; ++cx) {
            const char c = r[static_cast<std::size_t>(cx)];
            if (c == '#')
                cells[static_cast<std::size_t>(cy) * width + cx] = 1;
            else if (c != '.')
                throw std::invalid_argument(std::string("inline grid: unexpected character '") + c + "'");
        }
    }
    return std::make_shared<OccupancyGrid>(width, height, resolution, origin, std::move(cells));
}

bool OccupancyGrid::in_bounds(const Vec2& p) const {
    const double lx = p.x - origin_.x;
    const double ly = p.y - origin_.y;
    return lx >= 0.0 && ly >= 0.0 && lx < width_ * resolution_ && ly < height_ * resolution_;
}

void OccupancyGrid::cell_of(const Vec2& p, int& cx, int& cy) const {
    cx = static_cast<int>(std::floor((p.x - origin_.x) / resolution_));
    cy = static_cast<int>(std::floor((p.y - origin_.y) / resolution_));
    cx = std::clamp(cx, 0, width_ - 1);
    cy = std::clamp(cy, 0, height_ - 1);
}

Vec2 OccupancyGrid::cell_center(int cx, int cy) const {
    return {origin_.x + (cx + 0.5) * resolution_, origin_.y + (cy + 0.5) * resolution_};
}

double OccupancyGrid::distance_field(int cx, int cy) const {
    const std::int32_t n = nearest_[index(cx, cy)];
    if (n < 0) return std::numeric_limits<double>::infinity();
    const int nx = n % width_;
    const int ny = n / width_;
    const double dx = static_cast<double>(cx - nx);
    const double dy = static_cast<double>(cy - ny);
    return std::sqrt(dx * dx + dy * dy) * resolution_;
}

// Exact Euclidean distance transform (Felzenszwalb-Huttenlocher), extended to
// keep the argmin cell so obstacle-force directions come for free. Column pass
// finds the nearest occupied row per column; the row pass takes the lower
// envelope of the parabolas and records which column won.
void OccupancyGrid::build_distance_field() {
    const int w = width_, h = height_;
    constexpr std::int32_t kNone = -1;
    const double kInf = std::numeric_limits<double>::infinity();

    nearest_.assign(static_cast<std::size_t>(w) * h, kNone);
    any_occupied_ = std::any_of(occupied_.begin(), occupied_.end(), [](std::uint8_t c) { return c != 0; });
    if (!any_occupied_) return;

    // nearest occupied row per (column, row), -1 when the column is empty
    std::vector<std::int32_t> col_nearest(static_cast<std::size_t>(w) * h, kNone);
    for (int x = 0; x < w; ++x) {
        int last = -1;
        for (int y = 0; y < h; ++y) {
            if (occupied_[index(x, y)]) last = y;
            if (last >= 0) col_nearest[index(x, y)] = last;
        }
        last = -1;
        for (int y = h - 1; y >= 0; --y) {
            if (occupied_[index(x, y)]) last = y;
            if (last >= 0) {
                const std::int32_t up = col_nearest[index(x, y)];
                if (up < 0 || std::abs(last - y) < std::abs(up - y)) col_nearest[index(x, y)] = last;
            }
        }
    }

    std::vector<int> v(static_cast<std::size_t>(w));      // parabola sites
    std::vector<double> z(static_cast<std::size_t>(w) + 1);  // envelope boundaries
    std::vector<double> f(static_cast<std::size_t>(w));    // squared column distances
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::int32_t r = col_nearest[index(x, y)];
            f[static_cast<std::size_t>(x)] = r < 0 ? kInf : static_cast<double>((y - r)) * (y - r);
        }
        int k = 0;
        v[0] = 0;
        z[0] = -kInf;
        z[1] = kInf;
        for (int q = 1; q < w; ++q) {
            if (f[static_cast<std::size_t>(q)] == kInf) continue;
            if (f[static_cast<std::size_t>(v[0])] == kInf && k == 0) {
                v[0] = q;
                continue;
            }
            double s;
            for (;;) {
                const int p = v[static_cast<std::size_t>(k)];
                s = (f[static_cast<std::size_t>(q)] + static_cast<double>(q) * q -
                     f[static_cast<std::size_t>(p)] - static_cast<double>(p) * p) /
                    (2.0 * (q - p));
                if (s > z[static_cast<std::size_t>(k)]) break;
                if (--k < 0) { k = 0; v[0] = q; s = -kInf; break; }
            }
            if (v[static_cast<std::size_t>(k)] != q) {
                ++k;
                v[static_cast<std::size_t>(k)] = q;
            }
            z[static_cast<std::size_t>(k)] = s;
            z[static_cast<std::size_t>(k) + 1] = kInf;
        }
        if (f[static_cast<std::size_t>(v[0])] == kInf && k == 0) continue;  // row sees no obstacle anywhere
        int j = 0;
        for (int x = 0; x < w; ++x) {
            while (z[static_cast<std::size_t>(j) + 1] < static_cast<double>(x)) ++j;
            const int best_col = v[static_cast<std::size_t>(j)];
            const std::int32_t best_row = col_nearest[index(best_col, y)];
            nearest_[index(x, y)] = static_cast<std::int32_t>(index(best_col, best_row));
        }
    }
}

ObstacleQuery distance_to_nearest_obstacle(const OccupancyGrid& grid, const Vec2& p) {
    if (!grid.in_bounds(p)) throw std::out_of_range("distance_to_nearest_obstacle: point outside map");
    ObstacleQuery q;
    if (!grid.any_occupied()) return q;  // +inf sentinel, zero direction
    int cx, cy;
    grid.cell_of(p, cx, cy);
    if (grid.occupied(cx, cy)) {
        q.distance = 0.0;
        return q;
    }
    const int n = grid.nearest_occupied_index(cx, cy);
    const Vec2 obstacle = grid.cell_center(n % grid.width(), n / grid.width());
    q.distance = (p - obstacle).norm();
    q.direction_away = (p - obstacle).normalized();
    return q;
}

namespace {

// Amanatides-Woo traversal; visits every cell the segment passes through.
bool segment_clear(const OccupancyGrid& grid, const Vec2& a, const Vec2& b) {
    int cx, cy, ex, ey;
    grid.cell_of(a, cx, cy);
    grid.cell_of(b, ex, ey);
    if (grid.occupied(cx, cy)) return false;

    const Vec2 d = b - a;
    const double res = grid.resolution();
    const int step_x = d.x > 0.0 ? 1 : (d.x < 0.0 ? -1 : 0);
    const int step_y = d.y > 0.0 ? 1 : (d.y < 0.0 ? -1 : 0);
    const double inf = std::numeric_limits<double>::infinity();

    auto boundary = [&](int cell, int step, double origin_c) {
        return origin_c + (cell + (step > 0 ? 1 : 0)) * res;
    };
    double t_max_x = step_x == 0 ? inf : (boundary(cx, step_x, grid.origin().x) - a.x) / d.x;
    double t_max_y = step_y == 0 ? inf : (boundary(cy, step_y, grid.origin().y) - a.y) / d.y;
    const double t_delta_x = step_x == 0 ? inf : res / std::abs(d.x);
    const double t_delta_y = step_y == 0 ? inf : res / std::abs(d.y);

    while (cx != ex || cy != ey) {
        if (t_max_x < t_max_y) {
            cx += step_x;
            t_max_x += t_delta_x;
        } else {
            cy += step_y;
            t_max_y += t_delta_y;
        }
        if (!grid.cell_in_bounds(cx, cy)) break;  // numerical corner case: treat as arrived
        if (grid.occupied(cx, cy)) return false;
    }
    return true;
}

}  // namespace

bool line_of_sight(const OccupancyGrid& grid, const Vec2& a, const Vec2& b) {
    if (!grid.in_bounds(a) || !grid.in_bounds(b))
        throw std::out_of_range("line_of_sight: endpoint outside map");
    if (a == b) return true;
    // Canonical endpoint order makes the traversal, and thus the result,
    // symmetric in a and b.
    const bool swap = (b.x < a.x) || (b.x == a.x && b.y < a.y);
    return swap ? segment_clear(grid, b, a) : segment_clear(grid, a, b);
}

bool in_fov(const Pose2D& observer, const Vec2& target, double fov) {
    if (fov <= 0.0 || fov > 2.0 * kPi) throw std::invalid_argument("in_fov: fov must be in (0, 2*pi]");
    const Vec2 obs = observer.position();
    if (obs == target) return true;
    const double rel = wrap_angle(bearing(obs, target) - observer.yaw);
    return std::abs(rel) <= fov / 2.0;
}

}  // namespace socnav
