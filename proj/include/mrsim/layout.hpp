#pragma once

// Scenario geometry and per-scenario constants: zone rectangles, staging
// grids, radii, counts. Everything lives in one key -> numbers table so the
// whole layout can be shipped as a versioned text file and overridden
// without recompiling. See data/default_layout.txt for the field-by-field
// documentation.

#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mrsim/core.hpp"

namespace mrsim {

inline constexpr int kLayoutFormatVersion = 1;

class Layout {
public:
    using Table = std::map<std::string, std::vector<double>>;

    Layout() : table_(defaults()) {}
    explicit Layout(Table table) : table_(std::move(table)) {}

    static const Table& defaults() {
        static const Table t = {
            // Spawning
            {"spawn.margin", {0.25}},
            {"spawn.separation_slack", {0.05}},  // added to safety_radius
            // Arctic transport: 8x5 tile grid over the arena; outermost
            // columns are ground, the rest drawn ice/water per cell.
            {"arctic.grid_cols", {8}},
            {"arctic.grid_rows", {5}},
            {"arctic.ground_cols_left", {1}},
            {"arctic.ground_cols_right", {1}},
            {"arctic.goal_zone", {1.2, 1.6, -1.0, 1.0}},
            {"arctic.spawn_zone", {-1.55, -1.25, -0.9, 0.9}},
            {"arctic.normal_step", {0.2}},
            {"arctic.fast_step", {0.3}},
            {"arctic.slow_step", {0.1}},
            // Discovery
            {"discovery.num_landmarks", {6}},
            {"discovery.landmark_margin", {0.3}},
            {"discovery.sentinel", {-10.0, -10.0}},
            // Foraging
            {"foraging.num_resources", {2}},
            {"foraging.radius", {0.3}},
            {"foraging.resource_margin", {0.3}},
            // Material transport: circle zone is the near/full one, the
            // rectangle zone sits across the arena.
            {"mt.circle_zone", {0.2, 0.0, 0.3}},  // cx cy radius
            {"mt.rect_zone", {1.1, 1.55, -0.4, 0.4}},
            {"mt.dropoff_zone", {-1.55, -1.05, -0.4, 0.4}},
            {"mt.circle_mean", {75}},
            {"mt.circle_variance", {10}},
            {"mt.rect_mean", {15}},
            {"mt.rect_variance", {4}},
            // Navigation
            {"navigation.goal_margin", {0.3}},
            {"navigation.goal_separation", {0.4}},
            {"navigation.on_goal_radius", {0.1}},
            // Predator-prey
            {"pp.tag_radius", {0.25}},
            {"pp.prey_agility", {1.3}},  // prey step = agility * robot step
            {"pp.prey_spawn_clearance", {0.35}},
            {"pp.flash_steps", {2}},
            // Continuous RWARE: six staging slots in a 2x3 grid.
            {"rware.slots", {-0.2, -0.3, 0.25, -0.3, 0.7, -0.3, -0.2, 0.3, 0.25, 0.3, 0.7, 0.3}},
            {"rware.slot_half", {0.12}},
            {"rware.shelf_radius", {0.12}},
            {"rware.num_shelves", {6}},
            {"rware.request_size", {3}},
            {"rware.dropoff_zone", {-1.55, -1.15, -0.4, 0.4}},
            // Warehouse: pickup zones on the right, dropoff on the left.
            {"warehouse.green_right", {1.15, 1.55, 0.15, 0.85}},
            {"warehouse.red_right", {1.15, 1.55, -0.85, -0.15}},
            {"warehouse.green_left", {-1.55, -1.15, 0.15, 0.85}},
            {"warehouse.red_left", {-1.55, -1.15, -0.85, -0.15}},
            // Random waypoint navigation
            {"rwp.waypoint_margin", {0.2}},
            {"rwp.arrival_tolerance", {0.05}},
        };
        return t;
    }

    bool has(const std::string& key) const { return table_.count(key) > 0; }

    const std::vector<double>& values(const std::string& key) const {
        auto it = table_.find(key);
        if (it == table_.end())
            throw std::invalid_argument("layout: missing key '" + key + "'");
        return it->second;
    }

    double scalar(const std::string& key) const {
        const auto& v = values(key);
        if (v.size() != 1)
            throw std::invalid_argument("layout: key '" + key + "' is not a scalar");
        return v[0];
    }

    int integer(const std::string& key) const { return static_cast<int>(scalar(key)); }

    Rect rect(const std::string& key) const {
        const auto& v = values(key);
        if (v.size() != 4)
            throw std::invalid_argument("layout: key '" + key + "' is not a rectangle");
        return {v[0], v[1], v[2], v[3]};
    }

    Circle circle(const std::string& key) const {
        const auto& v = values(key);
        if (v.size() != 3)
            throw std::invalid_argument("layout: key '" + key + "' is not a circle");
        return {{v[0], v[1]}, v[2]};
    }

    std::vector<Vec2> points(const std::string& key) const {
        const auto& v = values(key);
        if (v.size() % 2 != 0)
            throw std::invalid_argument("layout: key '" + key + "' is not a point list");
        std::vector<Vec2> pts;
        for (std::size_t i = 0; i + 1 < v.size(); i += 2) pts.push_back({v[i], v[i + 1]});
        return pts;
    }

    void set(const std::string& key, std::vector<double> v) { table_[key] = std::move(v); }

    const Table& table() const { return table_; }

    /// Serialise in the shipped file format.
    std::string to_text() const {
        std::ostringstream os;
        os << "format_version = " << kLayoutFormatVersion << "\n";
        for (const auto& [key, vals] : table_) {
            os << key << " =";
            for (double v : vals) {
                char buf[40];
                std::snprintf(buf, sizeof buf, " %.17g", v);
                os << buf;
            }
            os << "\n";
        }
        return os.str();
    }

    /// Parse the file format produced by to_text(). Unknown keys are kept
    /// (scenarios validate what they use); a missing or wrong
    /// format_version is an error.
    static Layout from_text(const std::string& text) {
        Table t;
        std::istringstream is(text);
        std::string line;
        bool saw_version = false;
        int lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            std::size_t hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            std::size_t eq = line.find('=');
            if (eq == std::string::npos) {
                // blank or comment-only line
                bool blank = line.find_first_not_of(" \t\r") == std::string::npos;
                if (!blank)
                    throw std::invalid_argument("layout: malformed line " + std::to_string(lineno));
                continue;
            }
            std::string key = line.substr(0, eq);
            key.erase(0, key.find_first_not_of(" \t"));
            key.erase(key.find_last_not_of(" \t") + 1);
            std::istringstream vs(line.substr(eq + 1));
            std::vector<double> vals;
            double v;
            while (vs >> v) vals.push_back(v);
            if (key == "format_version") {
                if (vals.size() != 1 || static_cast<int>(vals[0]) != kLayoutFormatVersion)
                    throw std::invalid_argument("layout: unsupported format_version");
                saw_version = true;
                continue;
            }
            if (key.empty() || vals.empty())
                throw std::invalid_argument("layout: malformed line " + std::to_string(lineno));
            t[key] = std::move(vals);
        }
        if (!saw_version) throw std::invalid_argument("layout: missing format_version");
        // Overrides sit on top of the defaults.
        Table merged = defaults();
        for (auto& [k, v] : t) merged[k] = std::move(v);
        return Layout(std::move(merged));
    }

private:
    Table table_;
};

} // namespace mrsim
