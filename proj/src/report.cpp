#include "mmplan/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "mmplan/optimizer.hpp"

namespace mmplan::report {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string fixed(double v, int digits = 6) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

// Maps world metres to SVG pixels with y pointing up.
struct View {
    double x_min, y_max, scale, margin;
    double px(double x) const { return margin + (x - x_min) * scale; }
    double py(double y) const { return margin + (y_max - y) * scale; }
};

void rotated_rect(std::ostringstream& os, const View& v, double cx, double cy, double l, double w, double theta,
                  const std::string& style) {
    os << "<rect x=\"" << num(-0.5 * l * v.scale) << "\" y=\"" << num(-0.5 * w * v.scale) << "\" width=\""
       << num(l * v.scale) << "\" height=\"" << num(w * v.scale) << "\" transform=\"translate(" << num(v.px(cx))
       << ' ' << num(v.py(cy)) << ") rotate(" << num(-theta * 180.0 / kPi) << ")\" " << style << "/>\n";
}

const char* kKappaColors[] = {"#4caf50", "#cddc39", "#ffc107", "#ff5722", "#b71c1c"};

std::string kappa_color(int kappa) {
    return kKappaColors[std::clamp(kappa, 0, static_cast<int>(std::size(kKappaColors)) - 1)];
}

std::string distance_cell(double d) { return std::isinf(d) ? std::string{} : fixed(d); }

}  // namespace

std::string layout_svg(const Scenario& sc, const packing::PlacementLayout& layout) {
    double x_min = kInf, x_max = -kInf, y_min = kInf, y_max = -kInf;
    auto grow = [&](double x, double y, double r) {
        x_min = std::min(x_min, x - r);
        x_max = std::max(x_max, x + r);
        y_min = std::min(y_min, y - r);
        y_max = std::max(y_max, y + r);
    };
    for (const auto& item : sc.items) {
        for (const auto& p : item.pick_poses) grow(p.x, p.y, std::max(item.dims.l, item.dims.w));
    }
    for (const auto& box : sc.boxes) {
        const auto far = packing::box_to_world(box, box.dims.l, box.dims.w, 0.0);
        grow(box.pose.x, box.pose.y, 0.05);
        grow(far.x, far.y, 0.05);
        const auto c1 = packing::box_to_world(box, box.dims.l, 0.0, 0.0);
        const auto c2 = packing::box_to_world(box, 0.0, box.dims.w, 0.0);
        grow(c1.x, c1.y, 0.05);
        grow(c2.x, c2.y, 0.05);
    }
    const auto& rail = sc.robot.base;
    if (!rail.limits.empty() && !rail.axes.empty()) {
        for (double s : {rail.limits[0].min, rail.limits[0].max}) {
            const Eigen::Vector3d p = rail.mount + s * rail.axes[0];
            grow(p.x(), p.y(), 0.1);
        }
    }
    if (!std::isfinite(x_min)) x_min = y_min = -1.0, x_max = y_max = 1.0;

    const View v{x_min, y_max, 300.0, 20.0};
    const double width = 2 * v.margin + (x_max - x_min) * v.scale;
    const double height = 2 * v.margin + (y_max - y_min) * v.scale + 20.0;

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
       << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    if (!rail.limits.empty() && !rail.axes.empty()) {
        const Eigen::Vector3d a = rail.mount + rail.limits[0].min * rail.axes[0];
        const Eigen::Vector3d b = rail.mount + rail.limits[0].max * rail.axes[0];
        os << "<line x1=\"" << num(v.px(a.x())) << "\" y1=\"" << num(v.py(a.y())) << "\" x2=\"" << num(v.px(b.x()))
           << "\" y2=\"" << num(v.py(b.y())) << "\" stroke=\"#555\" stroke-width=\"6\" stroke-linecap=\"round\"/>\n";
    }

    for (std::size_t i = 0; i < sc.items.size(); ++i) {
        const auto& item = sc.items[i];
        for (std::size_t s = 0; s < item.pick_poses.size(); ++s) {
            const auto& p = item.pick_poses[s];
            rotated_rect(os, v, p.x, p.y, item.dims.l, item.dims.w, p.theta,
                         "fill=\"#90caf9\" stroke=\"#1565c0\"");
            os << "<text x=\"" << num(v.px(p.x)) << "\" y=\"" << num(v.py(p.y) + 4) << "\" text-anchor=\"middle\">"
               << i << ',' << s << "</text>\n";
        }
    }

    for (std::size_t b = 0; b < sc.boxes.size(); ++b) {
        const auto& box = sc.boxes[b];
        const auto centre = packing::box_to_world(box, 0.5 * box.dims.l, 0.5 * box.dims.w, 0.0);
        rotated_rect(os, v, centre.x, centre.y, box.dims.l, box.dims.w, box.pose.theta,
                     "fill=\"none\" stroke=\"#6d4c41\" stroke-width=\"2\"");
        os << "<circle cx=\"" << num(v.px(box.pose.x)) << "\" cy=\"" << num(v.py(box.pose.y))
           << "\" r=\"3\" fill=\"#2e7d32\"/>\n";
        const auto& item = sc.items.at(static_cast<std::size_t>(box.item_type)).dims;
        if (b < layout.spots.size()) {
            for (std::size_t k = 0; k < layout.spots[b].size(); ++k) {
                const auto& s = layout.spots[b][k];
                rotated_rect(os, v, s.x, s.y, item.l, item.w, s.theta,
                             "fill=\"#ffe082\" fill-opacity=\"0.7\" stroke=\"#ef6c00\"");
                os << "<text x=\"" << num(v.px(s.x)) << "\" y=\"" << num(v.py(s.y) + 4)
                   << "\" text-anchor=\"middle\">" << k << "</text>\n";
            }
            os << "<text x=\"" << num(v.px(box.pose.x)) << "\" y=\"" << num(v.py(box.pose.y) + 14) << "\">box " << b
               << " alpha=" << layout.alpha[b] << "</text>\n";
        }
    }
    os << "<text x=\"" << num(v.margin) << "\" y=\"" << num(height - 6) << "\">" << escape(sc.name) << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

std::string gantt_svg(const Plan& plan, const human::HumanSchedule& schedule) {
    double horizon = plan.total_time;
    for (const auto& t : schedule.tasks) horizon = std::max(horizon, t.start);
    horizon = std::max(horizon * 1.05, 1.0);

    const double left = 70.0, chart = 900.0, row_h = 40.0, top = 20.0;
    const double sx = chart / horizon;
    auto x = [&](double t) { return left + t * sx; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(left + chart + 20) << "\" height=\""
       << num(top + 2 * row_h + 70) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"4\" y=\"" << num(top + 0.6 * row_h) << "\">robot</text>\n";
    os << "<text x=\"4\" y=\"" << num(top + 1.6 * row_h + 10) << "\">operator</text>\n";

    auto bar = [&](double t0, double t1, double y, const std::string& fill, const std::string& title) {
        if (t1 <= t0) return;
        os << "<rect x=\"" << num(x(t0)) << "\" y=\"" << num(y) << "\" width=\"" << num((t1 - t0) * sx)
           << "\" height=\"" << num(row_h - 8) << "\" fill=\"" << fill << "\" stroke=\"#333\" stroke-width=\"0.5\">"
           << "<title>" << escape(title) << "</title></rect>\n";
    };

    for (const auto& t : plan.tasks) {
        const double t1 = t.start + t.travel;
        const double t2 = t1 + t.wait;
        const std::string name = "P&P_" + std::to_string(t.type) + "," + std::to_string(t.item);
        bar(t.start, t1, top, "#9e9e9e", name + " travel " + fixed(t.travel, 3) + " s");
        bar(t1, t2, top, "#ffffff", name + " wait " + fixed(t.wait, 3) + " s");
        bar(t2, t.end, top, kappa_color(t.kappa), name + " kappa=" + std::to_string(t.kappa));
        os << "<text x=\"" << num(x(0.5 * (t2 + t.end))) << "\" y=\"" << num(top + row_h - 12)
           << "\" text-anchor=\"middle\" font-size=\"9\">" << t.type << ',' << t.item << "</text>\n";
    }

    const double hy = top + row_h + 10;
    for (std::size_t c = 0; c < schedule.tasks.size(); ++c) {
        const auto& h = schedule.tasks[c];
        const double end = c + 1 < schedule.tasks.size() ? schedule.tasks[c + 1].start : horizon;
        const std::string fill = h.position ? "#ce93d8" : "#eeeeee";
        bar(h.start, end, hy, fill, h.kind + (h.station.empty() ? "" : " @" + h.station));
        os << "<text x=\"" << num(x(h.start) + 2) << "\" y=\"" << num(hy + row_h - 12) << "\" font-size=\"9\">"
           << escape(h.kind) << "</text>\n";
    }

    const double axis_y = top + 2 * row_h + 20;
    os << "<line x1=\"" << num(left) << "\" y1=\"" << num(axis_y) << "\" x2=\"" << num(left + chart) << "\" y2=\""
       << num(axis_y) << "\" stroke=\"black\"/>\n";
    const double step = horizon > 100 ? 20.0 : horizon > 40 ? 10.0 : horizon > 10 ? 5.0 : 1.0;
    for (double t = 0.0; t <= horizon; t += step) {
        os << "<text x=\"" << num(x(t)) << "\" y=\"" << num(axis_y + 14) << "\" text-anchor=\"middle\">" << num(t)
           << "</text>\n";
    }
    os << "<text x=\"" << num(left) << "\" y=\"" << num(axis_y + 34) << "\">total " << fixed(plan.total_time, 3)
       << " s; kappa colours 0..4 green to red</text>\n";
    os << "</svg>\n";
    return os.str();
}

std::string dmin_timeline_csv(const Scenario& sc, const Plan& plan, const human::HumanSchedule& schedule,
                              double dt) {
    if (!(dt > 0.0)) throw Error("timeline step must be positive");
    std::ostringstream os;
    os << "t,task,phase,kappa,d_pick,d_place,d_min\n";
    std::size_t w = 0;
    const auto steps = static_cast<long>(std::floor(plan.total_time / dt + 1e-9));
    for (long n = 0; n <= steps && !plan.tasks.empty(); ++n) {
        const double t = static_cast<double>(n) * dt;
        while (w + 1 < plan.tasks.size() && t >= plan.tasks[w].end) ++w;
        const auto& task = plan.tasks[w];
        const char* phase = t < task.start + task.travel                ? "travel"
                            : t < task.start + task.travel + task.wait ? "wait"
                                                                        : "pnp";
        const auto pos = human::human_position_at(schedule, t);
        const double d_pick = human::distance_to(pos, opt::work_point(sc, task.pick));
        const double d_place = human::distance_to(pos, opt::work_point(sc, task.place));
        os << fixed(t, 3) << ',' << w << ',' << phase << ',' << task.kappa << ',' << distance_cell(d_pick) << ','
           << distance_cell(d_place) << ',' << distance_cell(std::min(d_pick, d_place)) << '\n';
    }
    return os.str();
}

std::string trace_csv(int task, double t0, const sim::SimResult& result) {
    std::ostringstream os;
    for (const auto& s : result.trace) {
        const auto seg = static_cast<std::size_t>(s.segment);
        const std::string primitive = seg < result.segments.size() ? result.segments[seg].primitive : "";
        os << task << ',' << fixed(t0 + s.t, 4) << ',' << s.segment << ',' << primitive << ',' << fixed(s.tcp.x())
           << ',' << fixed(s.tcp.y()) << ',' << fixed(s.tcp.z()) << ',' << fixed(s.yaw) << ','
           << fixed(s.inverse_manipulability) << '\n';
    }
    return os.str();
}

}  // namespace mmplan::report
