#include "fightgen/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>
#include <vector>

#include "fightgen/text.hpp"

namespace fightgen {

namespace {

constexpr double kWidth = 800.0;
constexpr double kFloorHeight = 500.0;
constexpr double kLaneHeight = 24.0;
constexpr double kMargin = 20.0;
constexpr std::array<const char*, 2> kColors{"#1f77b4", "#d62728"};

std::string num(double v) {
    // Two decimals keep the file small; the geometry is only illustrative.
    return text::format_double(std::round(v * 100.0) / 100.0);
}

struct Bar {
    int begin = 0;
    int end = 0;
    bool reaction = false;
    ActionId action = 0;
};

}  // namespace

void write_svg(std::ostream& out, std::span<const FightEvent> trace) {
    std::array<std::vector<Vec2>, 2> paths;
    std::vector<Vec2> hits;
    std::array<std::vector<Bar>, 2> bars;
    int last_frame = 0;
    double lo_x = std::numeric_limits<double>::infinity(), hi_x = -lo_x;
    double lo_y = lo_x, hi_y = -lo_x;
    auto extend = [&](Vec2 p) {
        lo_x = std::min(lo_x, p.x);
        hi_x = std::max(hi_x, p.x);
        lo_y = std::min(lo_y, p.y);
        hi_y = std::max(hi_y, p.y);
    };
    for (const auto& e : trace) {
        last_frame = std::max({last_frame, e.frame, e.end});
        extend(e.pose.pos);
        auto& lane = bars[index(e.fighter)];
        switch (e.kind) {
            case EventKind::Hit: hits.push_back(e.pose.pos); break;
            case EventKind::ActionStart:
            case EventKind::Reaction:
                paths[index(e.fighter)].push_back(e.pose.pos);
                lane.push_back({e.frame, e.end, e.kind == EventKind::Reaction, e.action});
                break;
            case EventKind::ActionEnd:
                paths[index(e.fighter)].push_back(e.pose.pos);
                if (!lane.empty() && lane.back().end > e.frame) lane.back().end = e.frame;
                break;
        }
    }
    const double height = kFloorHeight + 2.0 * kLaneHeight + 3.0 * kMargin;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\"" << num(height)
        << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(height) << "\">\n";
    out << "<rect class=\"canvas\" x=\"0\" y=\"0\" width=\"" << num(kWidth) << "\" height=\"" << num(height)
        << "\" fill=\"white\"/>\n";
    if (!trace.empty()) {
        const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1.0});
        const double scale = std::min(kWidth - 2.0 * kMargin, kFloorHeight - kMargin) / span;
        const double cx = 0.5 * (lo_x + hi_x), cy = 0.5 * (lo_y + hi_y);
        auto sx = [&](double x) { return 0.5 * kWidth + (x - cx) * scale; };
        auto sy = [&](double y) { return kMargin + 0.5 * (kFloorHeight - kMargin) - (y - cy) * scale; };
        for (Side s : kSides) {
            const auto& p = paths[index(s)];
            if (p.empty()) continue;
            out << "<polyline class=\"trajectory\" data-fighter=\"" << to_string(s) << "\" fill=\"none\" stroke=\""
                << kColors[index(s)] << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < p.size(); ++i) {
                out << (i ? " " : "") << num(sx(p[i].x)) << ',' << num(sy(p[i].y));
            }
            out << "\"/>\n";
        }
        for (const auto& h : hits) {
            out << "<circle class=\"hit\" cx=\"" << num(sx(h.x)) << "\" cy=\"" << num(sy(h.y))
                << "\" r=\"5\" fill=\"none\" stroke=\"black\"/>\n";
        }
        const double tscale = (kWidth - 2.0 * kMargin) / std::max(1, last_frame);
        for (Side s : kSides) {
            const double y = kFloorHeight + kMargin + static_cast<double>(index(s)) * (kLaneHeight + kMargin);
            out << "<text x=\"2\" y=\"" << num(y + 0.7 * kLaneHeight) << "\" font-size=\"12\">" << to_string(s)
                << "</text>\n";
            for (const auto& b : bars[index(s)]) {
                out << "<rect class=\"" << (b.reaction ? "reaction" : "action") << "\" data-action=\"" << b.action
                    << "\" x=\"" << num(kMargin + b.begin * tscale) << "\" y=\"" << num(y) << "\" width=\""
                    << num(std::max(0, b.end - b.begin) * tscale) << "\" height=\"" << num(kLaneHeight)
                    << "\" fill=\"" << (b.reaction ? "#999999" : kColors[index(s)])
                    << "\" stroke=\"white\" stroke-width=\"0.5\"/>\n";
            }
        }
    }
    out << "</svg>\n";
}

}  // namespace fightgen
