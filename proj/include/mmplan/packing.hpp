#pragma once

#include <span>
#include <string>
#include <vector>

#include "mmplan/core.hpp"

namespace mmplan::packing {

/// Place-side layout. Boxes are addressed by their index in Scenario::boxes;
/// `alpha[b]` and `spots[b]` describe box b (its item type is boxes[b].item_type).
struct PlacementLayout {
    std::vector<int> alpha;
    std::vector<std::vector<Pose2>> spots;  // world frame, footprint centroid
    std::vector<std::string> warnings;

    /// alpha grouped per item type, boxes in declaration order.
    std::vector<std::vector<int>> alpha_by_type(std::span<const BoxSpec> boxes, int types) const;
};

class LayoutInfeasible : public Error {
public:
    using Error::Error;
};

/// Footprint of an item inside the packing frame of a box (box corner at origin).
struct Rect {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
    bool turned = false;  // quarter turn about z
};

/// Single-layer greedy best-fit of one item type into one box, in the box frame.
/// Returned rectangles are the item footprints (margin excluded), in placement order.
std::vector<Rect> pack_box(const Dims& item, const Dims& box, double margin);

/// Runs pack_box for every box. Does not check whether the counts are covered.
PlacementLayout pack_boxes(std::span<const ItemType> items, std::span<const BoxSpec> boxes,
                           double margin);

/// pack_boxes, then throws LayoutInfeasible when some type cannot be completed.
PlacementLayout compute_layout(std::span<const ItemType> items, std::span<const BoxSpec> boxes,
                               double margin = 0.001);

/// Exact containment and pairwise non-overlap check (tolerance 1e-9 m).
bool verify_layout(const PlacementLayout& layout, std::span<const ItemType> items,
                   std::span<const BoxSpec> boxes);

/// World pose of a point given in a box's packing frame.
Pose2 box_to_world(const BoxSpec& box, double x, double y, double theta);

}  // namespace mmplan::packing
