#pragma once

// Headless rasteriser: draws arena, zones, tiles, markers, and robot discs
// into an RGB framebuffer and writes binary PPM frames. No window system or
// image library involved, so rendering runs anywhere the tests run.

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "mrsim/scenario.hpp"

namespace mrsim {

struct Color {
    std::uint8_t r = 0, g = 0, b = 0;
};

namespace palette {
inline constexpr Color kWhite{255, 255, 255};
inline constexpr Color kBlack{20, 20, 20};
inline constexpr Color kGray{170, 170, 170};
inline constexpr Color kLightGray{215, 215, 215};
inline constexpr Color kGreen{60, 170, 60};
inline constexpr Color kDarkGreen{20, 110, 20};
inline constexpr Color kRed{200, 50, 50};
inline constexpr Color kPurple{150, 80, 190};
inline constexpr Color kIce{170, 215, 240};
inline constexpr Color kWater{60, 110, 200};
inline constexpr Color kOrange{235, 150, 40};
inline constexpr Color kBlue{70, 100, 220};
inline constexpr Color kYellow{230, 210, 60};
} // namespace palette

class Framebuffer {
public:
    Framebuffer(int width, int height, Color fill = palette::kWhite)
        : width_(width), height_(height), pixels_(static_cast<std::size_t>(width) * height * 3) {
        clear(fill);
    }

    int width() const { return width_; }
    int height() const { return height_; }

    void clear(Color c) {
        for (int y = 0; y < height_; ++y)
            for (int x = 0; x < width_; ++x) set(x, y, c);
    }

    void set(int x, int y, Color c) {
        if (x < 0 || y < 0 || x >= width_ || y >= height_) return;
        std::size_t i = (static_cast<std::size_t>(y) * width_ + x) * 3;
        pixels_[i] = c.r;
        pixels_[i + 1] = c.g;
        pixels_[i + 2] = c.b;
    }

    Color get(int x, int y) const {
        std::size_t i = (static_cast<std::size_t>(y) * width_ + x) * 3;
        return {pixels_[i], pixels_[i + 1], pixels_[i + 2]};
    }

    void fill_rect(int x0, int y0, int x1, int y1, Color c) {
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) set(x, y, c);
    }

    void fill_circle(int cx, int cy, int radius, Color c) {
        for (int y = cy - radius; y <= cy + radius; ++y)
            for (int x = cx - radius; x <= cx + radius; ++x)
                if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= radius * radius) set(x, y, c);
    }

    void draw_line(int x0, int y0, int x1, int y1, Color c) {
        int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
        int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
        int err = dx + dy;
        while (true) {
            set(x0, y0, c);
            if (x0 == x1 && y0 == y1) break;
            int e2 = 2 * err;
            if (e2 >= dy) { err += dy; x0 += sx; }
            if (e2 <= dx) { err += dx; y0 += sy; }
        }
    }

    void save_ppm(const std::string& path) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("render: cannot open '" + path + "'");
        f << "P6\n" << width_ << " " << height_ << "\n255\n";
        f.write(reinterpret_cast<const char*>(pixels_.data()),
                static_cast<std::streamsize>(pixels_.size()));
        if (!f) throw std::runtime_error("render: failed writing '" + path + "'");
    }

private:
    int width_, height_;
    std::vector<std::uint8_t> pixels_;
};

/// World (meters) to pixel transform over the arena plus a border.
class WorldView {
public:
    WorldView(const SimParams& params, int pixels_per_meter = 160, int border = 12)
        : ppm_(pixels_per_meter), border_(border), arena_(params.arena()) {}

    int width() const {
        return 2 * border_ + static_cast<int>((arena_.xmax - arena_.xmin) * ppm_);
    }
    int height() const {
        return 2 * border_ + static_cast<int>((arena_.ymax - arena_.ymin) * ppm_);
    }
    int px(double x) const { return border_ + static_cast<int>((x - arena_.xmin) * ppm_); }
    int py(double y) const { return border_ + static_cast<int>((arena_.ymax - y) * ppm_); }
    int scale(double meters) const { return std::max(1, static_cast<int>(meters * ppm_)); }

    void fill_rect(Framebuffer& fb, const Rect& r, Color c) const {
        fb.fill_rect(px(r.xmin), py(r.ymax), px(r.xmax), py(r.ymin), c);
    }
    void outline_rect(Framebuffer& fb, const Rect& r, Color c) const {
        fb.draw_line(px(r.xmin), py(r.ymax), px(r.xmax), py(r.ymax), c);
        fb.draw_line(px(r.xmin), py(r.ymin), px(r.xmax), py(r.ymin), c);
        fb.draw_line(px(r.xmin), py(r.ymax), px(r.xmin), py(r.ymin), c);
        fb.draw_line(px(r.xmax), py(r.ymax), px(r.xmax), py(r.ymin), c);
    }

private:
    int ppm_;
    int border_;
    Rect arena_;
};

namespace renderdetail {

inline Color robot_color(const ScenarioConfig& cfg, int robot) {
    static constexpr Color cycle[] = {palette::kBlue, palette::kOrange, palette::kDarkGreen,
                                      palette::kRed, palette::kPurple, palette::kYellow};
    if (cfg.heterogeneity.kind == HetKind::ClassId &&
        static_cast<int>(cfg.heterogeneity.values.size()) > robot) {
        const auto& row = cfg.heterogeneity.values[static_cast<std::size_t>(robot)];
        for (std::size_t k = 0; k < row.size(); ++k)
            if (row[k] == 1.0) return cycle[k % 6];
    }
    return cycle[robot % 6];
}

inline void draw_robots(Framebuffer& fb, const WorldView& view, const EnvState& state,
                        const ScenarioConfig& cfg) {
    const int body = view.scale(cfg.params.collision_radius / 2.0);
    for (std::size_t i = 0; i < state.poses.size(); ++i) {
        const auto& p = state.poses[i];
        int cx = view.px(p.x), cy = view.py(p.y);
        fb.fill_circle(cx, cy, body, robot_color(cfg, static_cast<int>(i)));
        // heading tick
        int hx = view.px(p.x + std::cos(p.theta) * cfg.params.collision_radius);
        int hy = view.py(p.y + std::sin(p.theta) * cfg.params.collision_radius);
        fb.draw_line(cx, cy, hx, hy, palette::kBlack);
    }
}

} // namespace renderdetail

/// Draw one environment state: background zones first, then entities, then
/// the robots with heading ticks.
inline void draw_env(Framebuffer& fb, const WorldView& view, const EnvState& state,
                     const ScenarioConfig& cfg) {
    using namespace palette;
    fb.clear(kWhite);
    const Layout& layout = cfg.layout;

    if (const auto* s = std::get_if<ArcticState>(&state.scenario)) {
        const Rect arena = cfg.params.arena();
        double cw = (arena.xmax - arena.xmin) / s->cols;
        double ch = (arena.ymax - arena.ymin) / s->rows;
        for (int r = 0; r < s->rows; ++r)
            for (int c = 0; c < s->cols; ++c) {
                int tile = s->tiles[static_cast<std::size_t>(r) * s->cols + c];
                Color col = tile == ArcticTransportScenario::kIce
                                ? kIce
                                : tile == ArcticTransportScenario::kWater ? kWater : kWhite;
                Rect cell{arena.xmin + c * cw, arena.xmin + (c + 1) * cw, arena.ymin + r * ch,
                          arena.ymin + (r + 1) * ch};
                view.fill_rect(fb, cell, col);
            }
        view.fill_rect(fb, s->goal_zone, kGreen);
    } else if (const auto* s = std::get_if<DiscoveryState>(&state.scenario)) {
        for (std::size_t k = 0; k < s->landmarks.size(); ++k) {
            if (s->tagged[k]) continue;  // tagged landmarks disappear
            Color c = s->sensed[k] ? kGreen : kBlack;
            fb.fill_circle(view.px(s->landmarks[k].x), view.py(s->landmarks[k].y), view.scale(0.04),
                           c);
        }
    } else if (const auto* s = std::get_if<ForagingState>(&state.scenario)) {
        for (std::size_t r = 0; r < s->resources.size(); ++r) {
            if (s->foraged[r]) continue;
            fb.fill_circle(view.px(s->resources[r].x), view.py(s->resources[r].y),
                           view.scale(0.03 + 0.015 * s->levels[r]), kBlack);
        }
    } else if (std::get_if<MaterialTransportState>(&state.scenario)) {
        Circle cz = layout.circle("mt.circle_zone");
        view.fill_rect(fb, layout.rect("mt.dropoff_zone"), kPurple);
        view.fill_rect(fb, layout.rect("mt.rect_zone"), kGreen);
        fb.fill_circle(view.px(cz.center.x), view.py(cz.center.y), view.scale(cz.radius), kGreen);
    } else if (const auto* s = std::get_if<NavigationState>(&state.scenario)) {
        for (std::size_t i = 0; i < s->goals.size(); ++i) {
            int x = view.px(s->goals[i].x), y = view.py(s->goals[i].y);
            int r = view.scale(0.05);
            fb.draw_line(x - r, y - r, x + r, y + r, kBlack);
            fb.draw_line(x - r, y + r, x + r, y - r, kBlack);
        }
    } else if (const auto* s = std::get_if<PredatorPreyState>(&state.scenario)) {
        Color c = s->flash_timer > 0 ? kRed : kGreen;  // flashes red when tagged
        fb.fill_circle(view.px(s->prey.x), view.py(s->prey.y), view.scale(0.05), c);
    } else if (const auto* s = std::get_if<RwareState>(&state.scenario)) {
        view.fill_rect(fb, layout.rect("rware.dropoff_zone"), kPurple);
        auto slots = layout.points("rware.slots");
        double half = layout.scalar("rware.slot_half");
        for (std::size_t i = 0; i < slots.size(); ++i) {
            Rect slot{slots[i].x - half, slots[i].x + half, slots[i].y - half, slots[i].y + half};
            view.fill_rect(fb, slot, kLightGray);
            if (i < s->slot_shelf.size() && s->slot_shelf[i] != 0)
                view.fill_rect(fb, shrink(slot, half * 0.3), kGray);
        }
        for (std::size_t i = 0; i < s->carried.size(); ++i)
            if (s->carried[i] != 0) {
                const auto& p = state.poses[i];
                fb.fill_circle(view.px(p.x), view.py(p.y),
                               view.scale(layout.scalar("rware.shelf_radius")), kGray);
            }
    } else if (std::get_if<WarehouseState>(&state.scenario)) {
        view.fill_rect(fb, layout.rect("warehouse.green_right"), kGreen);
        view.fill_rect(fb, layout.rect("warehouse.green_left"), kGreen);
        view.fill_rect(fb, layout.rect("warehouse.red_right"), kRed);
        view.fill_rect(fb, layout.rect("warehouse.red_left"), kRed);
    } else if (const auto* s = std::get_if<RandomWaypointState>(&state.scenario)) {
        for (const auto& t : s->targets)
            fb.fill_circle(view.px(t.x), view.py(t.y), view.scale(0.03), kGray);
    }

    view.outline_rect(fb, cfg.params.arena(), kBlack);
    renderdetail::draw_robots(fb, view, state, cfg);
}

} // namespace mrsim
