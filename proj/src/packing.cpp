#include "mmplan/packing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

namespace mmplan::packing {

namespace {

constexpr double kEps = 1e-9;
constexpr double kHalfPi = std::numbers::pi / 2.0;

bool overlaps(const Rect& a, const Rect& b) {
    return std::min(a.x1, b.x1) - std::max(a.x0, b.x0) > kEps &&
           std::min(a.y1, b.y1) - std::max(a.y0, b.y0) > kEps;
}

struct Candidate {
    double x = 0.0;
    double y = 0.0;
    int rotation = 0;  // 0 or 1 (quarter turn)
    double short_leftover = 0.0;
    double long_leftover = 0.0;
};

// Strict weak order: tightest short-side leftover, then long side, then x, y, rotation.
bool better(const Candidate& a, const Candidate& b) {
    auto key = [](const Candidate& c) {
        return std::make_tuple(c.short_leftover, c.long_leftover, c.x, c.y, c.rotation);
    };
    return key(a) < key(b);
}

}  // namespace

std::vector<Rect> pack_box(const Dims& item, const Dims& box, double margin) {
    std::vector<Rect> placed;  // inflated by the margin on the +x/+y sides
    if (item.h > box.h) return {};

    // Inflated footprints live in [0, L - m] x [0, W - m]; each item sits at anchor + m.
    const double cl = box.l - margin;
    const double cw = box.w - margin;
    const std::array<std::pair<double, double>, 2> sizes{
        std::pair{item.l + margin, item.w + margin}, std::pair{item.w + margin, item.l + margin}};

    for (;;) {
        std::vector<std::pair<double, double>> anchors{{0.0, 0.0}};
        for (const auto& r : placed) {
            anchors.emplace_back(r.x1, r.y0);
            anchors.emplace_back(r.x0, r.y1);
            anchors.emplace_back(r.x1, r.y1);
        }

        std::optional<Candidate> best;
        for (const auto& [ax, ay] : anchors) {
            for (int rot = 0; rot < 2; ++rot) {
                const auto [sw, sh] = sizes[static_cast<std::size_t>(rot)];
                const Rect r{ax, ay, ax + sw, ay + sh};
                if (r.x1 > cl + kEps || r.y1 > cw + kEps) continue;
                if (std::any_of(placed.begin(), placed.end(),
                                [&](const Rect& p) { return overlaps(p, r); })) {
                    continue;
                }
                // Free run from the anchor along +x within the row band, and along +y.
                double free_x = cl;
                double free_y = cw;
                for (const auto& p : placed) {
                    if (p.y0 < r.y1 - kEps && p.y1 > r.y0 + kEps && p.x0 >= ax - kEps) {
                        free_x = std::min(free_x, p.x0);
                    }
                    if (p.x0 < r.x1 - kEps && p.x1 > r.x0 + kEps && p.y0 >= ay - kEps) {
                        free_y = std::min(free_y, p.y0);
                    }
                }
                const double lx = free_x - r.x1;
                const double ly = free_y - r.y1;
                Candidate c{ax, ay, rot, std::min(lx, ly), std::max(lx, ly)};
                if (!best || better(c, *best)) best = c;
            }
        }
        if (!best) break;
        const auto [sw, sh] = sizes[static_cast<std::size_t>(best->rotation)];
        placed.push_back({best->x, best->y, best->x + sw, best->y + sh, best->rotation == 1});
    }

    std::vector<Rect> items;
    items.reserve(placed.size());
    for (const auto& p : placed) {
        items.push_back({p.x0 + margin, p.y0 + margin, p.x1, p.y1, p.turned});
    }
    return items;
}

Pose2 box_to_world(const BoxSpec& box, double x, double y, double theta) {
    const double c = std::cos(box.pose.theta);
    const double s = std::sin(box.pose.theta);
    return {box.pose.x + c * x - s * y, box.pose.y + s * x + c * y,
            normalize_angle(box.pose.theta + theta)};
}

PlacementLayout pack_boxes(std::span<const ItemType> items, std::span<const BoxSpec> boxes,
                           double margin) {
    PlacementLayout layout;
    for (std::size_t b = 0; b < boxes.size(); ++b) {
        const auto& box = boxes[b];
        const auto& item = items[static_cast<std::size_t>(box.item_type)].dims;
        std::vector<Pose2> spots;
        for (const auto& r : pack_box(item, box.dims, margin)) {
            spots.push_back(box_to_world(box, 0.5 * (r.x0 + r.x1), 0.5 * (r.y0 + r.y1),
                                         r.turned ? kHalfPi : 0.0));
        }
        if (spots.empty()) {
            layout.warnings.push_back("EmptyBox: box " + std::to_string(b) + " holds no item of type " +
                                      std::to_string(box.item_type));
        }
        layout.alpha.push_back(static_cast<int>(spots.size()));
        layout.spots.push_back(std::move(spots));
    }
    return layout;
}

PlacementLayout compute_layout(std::span<const ItemType> items, std::span<const BoxSpec> boxes,
                               double margin) {
    auto layout = pack_boxes(items, boxes, margin);
    std::vector<int> capacity(items.size(), 0);
    for (std::size_t b = 0; b < boxes.size(); ++b) {
        capacity[static_cast<std::size_t>(boxes[b].item_type)] += layout.alpha[b];
    }
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (items[i].count > capacity[i]) {
            throw LayoutInfeasible("item type " + std::to_string(i) + " has " +
                                   std::to_string(items[i].count) + " items but its boxes hold " +
                                   std::to_string(capacity[i]));
        }
    }
    return layout;
}

bool verify_layout(const PlacementLayout& layout, std::span<const ItemType> items,
                   std::span<const BoxSpec> boxes) {
    if (layout.alpha.size() != boxes.size() || layout.spots.size() != boxes.size()) return false;
    for (std::size_t b = 0; b < boxes.size(); ++b) {
        const auto& box = boxes[b];
        if (layout.alpha[b] < 0 || static_cast<std::size_t>(layout.alpha[b]) != layout.spots[b].size()) {
            return false;
        }
        const auto& item = items[static_cast<std::size_t>(box.item_type)].dims;
        const double c = std::cos(box.pose.theta);
        const double s = std::sin(box.pose.theta);

        std::vector<Rect> rects;
        for (const auto& spot : layout.spots[b]) {
            const double dx = spot.x - box.pose.x;
            const double dy = spot.y - box.pose.y;
            const double lx = c * dx + s * dy;
            const double ly = -s * dx + c * dy;
            const double rel = normalize_angle(spot.theta - box.pose.theta);
            const double cr = std::abs(std::cos(rel));
            const double sr = std::abs(std::sin(rel));
            if (std::min(cr, sr) > kEps) return false;  // only axis-aligned spots
            const double ex = cr > sr ? item.l : item.w;
            const double ey = cr > sr ? item.w : item.l;
            const Rect r{lx - ex / 2, ly - ey / 2, lx + ex / 2, ly + ey / 2};
            if (r.x0 < -kEps || r.y0 < -kEps || r.x1 > box.dims.l + kEps || r.y1 > box.dims.w + kEps) {
                return false;
            }
            for (const auto& other : rects) {
                if (overlaps(other, r)) return false;
            }
            rects.push_back(r);
        }
    }
    return true;
}

std::vector<std::vector<int>> PlacementLayout::alpha_by_type(std::span<const BoxSpec> boxes,
                                                             int types) const {
    std::vector<std::vector<int>> out(static_cast<std::size_t>(types));
    for (std::size_t b = 0; b < boxes.size(); ++b) {
        out[static_cast<std::size_t>(boxes[b].item_type)].push_back(alpha[b]);
    }
    return out;
}

}  // namespace mmplan::packing
