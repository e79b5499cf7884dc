#pragma once

// On-disk trajectory format: a '#'-prefixed key=value header carrying the
// full run configuration plus its hash, then one CSV row per
// (episode, step, robot). Floats are rendered with 17 significant digits so
// a write/read round trip is bit-exact.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mrsim/core.hpp"

namespace mrsim {

inline constexpr int kTrajectoryFormatVersion = 1;

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// FNV-1a over the canonical header text.
inline std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

struct TrajectoryRow {
    int env = 0;  // global episode index
    int step = 0;
    int robot = 0;
    double x = 0, y = 0, theta = 0;
    int action = 0;
    double reward = 0;
    bool done = false;
    long long collisions = 0;  // cumulative within the episode
    double metric = 0;         // scenario headline metric snapshot

    std::string to_csv() const {
        std::ostringstream os;
        os << env << ',' << step << ',' << robot << ',' << format_double(x) << ','
           << format_double(y) << ',' << format_double(theta) << ',' << action << ','
           << format_double(reward) << ',' << (done ? 1 : 0) << ',' << collisions << ','
           << format_double(metric);
        return os.str();
    }

    static TrajectoryRow from_csv(const std::string& line) {
        TrajectoryRow r;
        std::istringstream is(line);
        std::string tok;
        auto next = [&]() -> std::string {
            if (!std::getline(is, tok, ',')) throw std::invalid_argument("trajectory: short row");
            return tok;
        };
        r.env = std::stoi(next());
        r.step = std::stoi(next());
        r.robot = std::stoi(next());
        r.x = std::stod(next());
        r.y = std::stod(next());
        r.theta = std::stod(next());
        r.action = std::stoi(next());
        r.reward = std::stod(next());
        r.done = std::stoi(next()) != 0;
        r.collisions = std::stoll(next());
        r.metric = std::stod(next());
        return r;
    }
};

inline constexpr const char* kTrajectoryColumns =
    "env,step,robot,x,y,theta,action,reward,done,collisions,metric";

/// Ordered key=value header; the hash covers every line except itself.
struct TrajectoryHeader {
    std::vector<std::pair<std::string, std::string>> fields;

    const std::string& get(const std::string& key) const {
        for (const auto& [k, v] : fields)
            if (k == key) return v;
        throw std::invalid_argument("trajectory header: missing field '" + key + "'");
    }
    bool has(const std::string& key) const {
        for (const auto& [k, v] : fields)
            if (k == key) return true;
        return false;
    }
    void set(const std::string& key, const std::string& value) {
        fields.emplace_back(key, value);
    }

    std::string canonical_text() const {
        std::string text;
        for (const auto& [k, v] : fields) text += k + " = " + v + "\n";
        return text;
    }
    std::uint64_t hash() const { return fnv1a(canonical_text()); }
};

struct TrajectoryFile {
    TrajectoryHeader header;
    std::vector<std::string> row_lines;  // verbatim, for byte-exact checks
    std::vector<TrajectoryRow> rows;
};

inline void write_trajectory(std::ostream& os, const TrajectoryHeader& header,
                             const std::vector<TrajectoryRow>& rows) {
    char hex[24];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(header.hash()));
    os << "# mrsim-trajectory " << kTrajectoryFormatVersion << "\n";
    os << "# config-hash " << hex << "\n";
    for (const auto& [k, v] : header.fields) os << "# " << k << " = " << v << "\n";
    os << kTrajectoryColumns << "\n";
    for (const auto& r : rows) os << r.to_csv() << "\n";
}

inline void write_trajectory(const std::string& path, const TrajectoryHeader& header,
                             const std::vector<TrajectoryRow>& rows) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_trajectory(f, header, rows);
    if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

inline TrajectoryFile read_trajectory(std::istream& is) {
    TrajectoryFile file;
    std::string line;
    if (!std::getline(is, line) || line.rfind("# mrsim-trajectory", 0) != 0)
        throw std::invalid_argument("trajectory: missing magic line");
    {
        std::istringstream ls(line.substr(2));
        std::string word;
        int version = 0;
        ls >> word >> version;
        if (version != kTrajectoryFormatVersion)
            throw std::invalid_argument("trajectory: unsupported format version");
    }
    if (!std::getline(is, line) || line.rfind("# config-hash ", 0) != 0)
        throw std::invalid_argument("trajectory: missing config-hash");
    const std::string stored_hash = line.substr(14);

    while (std::getline(is, line)) {
        if (line.rfind("# ", 0) == 0) {
            std::size_t eq = line.find(" = ");
            if (eq == std::string::npos)
                throw std::invalid_argument("trajectory: malformed header line: " + line);
            file.header.set(line.substr(2, eq - 2), line.substr(eq + 3));
            continue;
        }
        if (line == kTrajectoryColumns) break;
        throw std::invalid_argument("trajectory: unexpected line before columns: " + line);
    }

    char hex[24];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(file.header.hash()));
    if (stored_hash != hex)
        throw std::invalid_argument("trajectory: config-hash mismatch (file corrupt or edited)");

    while (std::getline(is, line)) {
        if (line.empty()) continue;
        file.row_lines.push_back(line);
        file.rows.push_back(TrajectoryRow::from_csv(line));
    }
    return file;
}

inline TrajectoryFile read_trajectory(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "'");
    return read_trajectory(f);
}

} // namespace mrsim
