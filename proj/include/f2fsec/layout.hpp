#pragma once

#include "f2fsec/netlist.hpp"
#include "f2fsec/partition.hpp"

#include <json.hpp>

#include <compare>
#include <cstdint>
#include <optional>
#include <vector>

namespace f2fsec {

// Grid location in units of the routing-track pitch.
struct TrackPoint {
    int row = 0;
    int track = 0;

    auto operator<=>(const TrackPoint&) const = default;
};

double distance(TrackPoint a, TrackPoint b);

// Die outline shared by both tiers.
struct Outline {
    int rows = 1;
    int tracks = 1;

    std::size_t slots() const noexcept { return static_cast<std::size_t>(rows) * static_cast<std::size_t>(tracks); }
    bool contains(TrackPoint p) const noexcept { return p.row >= 0 && p.row < rows && p.track >= 0 && p.track < tracks; }
    // Corner-to-corner distance between the outermost track points; never 0.
    double diagonal() const;
    std::size_t index(TrackPoint p) const { return static_cast<std::size_t>(p.row) * static_cast<std::size_t>(tracks) + static_cast<std::size_t>(p.track); }
    TrackPoint point(std::size_t index) const { return {static_cast<int>(index / static_cast<std::size_t>(tracks)), static_cast<int>(index % static_cast<std::size_t>(tracks))}; }

    auto operator<=>(const Outline&) const = default;
};

inline constexpr double kDefaultUtilization = 0.7;

// Smallest square outline holding `cells` at the given utilization.
Outline fit_outline(std::size_t cells, double utilization = kDefaultUtilization);

class Occupancy {
public:
    explicit Occupancy(Outline outline) : outline_(outline), used_(outline.slots(), 0) {}

    const Outline& outline() const noexcept { return outline_; }
    bool occupied(TrackPoint p) const { return used_[outline_.index(p)] != 0; }
    void occupy(TrackPoint p);
    void release(TrackPoint p);
    std::size_t free_count() const noexcept { return outline_.slots() - used_count_; }

private:
    Outline outline_;
    std::vector<std::uint8_t> used_;
    std::size_t used_count_ = 0;
};

// Nearest free point to `target` by Euclidean distance, ties broken by
// (row, track). The target is clamped into the outline first. Marks the result
// occupied. Throws LegalizationError when nothing is free within radius_limit.
TrackPoint legalize_on_track(TrackPoint target, Occupancy& occupancy, double radius_limit);

struct Placement {
    Outline outline;
    Tier tier = Tier::Bottom;
    std::vector<std::optional<TrackPoint>> slot; // per gate; empty for the other tier

    const std::optional<TrackPoint>& of(GateId g) const { return slot[static_cast<std::size_t>(g)]; }
};

inline constexpr int kDefaultPlaceIterations = 10;

// Random initial placement followed by `iterations` centroid passes. Only this
// tier's gates and their intra-tier connections are consulted.
Placement place_tier(const Netlist& netlist, const Partition& partition, Tier tier, const Outline& outline,
                     std::uint64_t seed, int iterations = kDefaultPlaceIterations);

// Half-perimeter wirelength over the intra-tier part of every net.
double hpwl(const Netlist& netlist, const Placement& placement);

nlohmann::ordered_json placement_json(const Netlist& netlist, const Placement& bottom, const Placement& top);

nlohmann::ordered_json to_json(TrackPoint p);
TrackPoint track_point_from_json(const nlohmann::ordered_json& j);

} // namespace f2fsec
