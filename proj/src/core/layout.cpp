#include "f2fsec/layout.hpp"

#include "f2fsec/error.hpp"
#include "f2fsec/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace f2fsec {

double distance(TrackPoint a, TrackPoint b)
{
    return std::hypot(static_cast<double>(a.row - b.row), static_cast<double>(a.track - b.track));
}

double Outline::diagonal() const
{
    const double d = std::hypot(static_cast<double>(rows - 1), static_cast<double>(tracks - 1));
    return d > 0.0 ? d : 1.0;
}

Outline fit_outline(std::size_t cells, double utilization)
{
    const double area = static_cast<double>(std::max<std::size_t>(cells, 1)) / utilization;
    const int side = std::max(2, static_cast<int>(std::ceil(std::sqrt(area))));
    return Outline{side, side};
}

void Occupancy::occupy(TrackPoint p)
{
    auto& cell = used_[outline_.index(p)];
    if (!cell) {
        cell = 1;
        ++used_count_;
    }
}

void Occupancy::release(TrackPoint p)
{
    auto& cell = used_[outline_.index(p)];
    if (cell) {
        cell = 0;
        --used_count_;
    }
}

TrackPoint legalize_on_track(TrackPoint target, Occupancy& occupancy, double radius_limit)
{
    if (radius_limit < 0.0)
        throw InvalidArgument("radius limit must be >= 0");
    const Outline& o = occupancy.outline();
    target.row = std::clamp(target.row, 0, o.rows - 1);
    target.track = std::clamp(target.track, 0, o.tracks - 1);

    const long limit2 = static_cast<long>(std::floor(radius_limit * radius_limit + 1e-9));
    const int max_ring = std::min(static_cast<int>(std::ceil(radius_limit)), std::max(o.rows, o.tracks));
    std::optional<TrackPoint> best;
    long best_d2 = std::numeric_limits<long>::max();

    auto consider = [&](int row, int track) {
        if (row < 0 || row >= o.rows || track < 0 || track >= o.tracks)
            return;
        const TrackPoint p{row, track};
        const long dr = row - target.row, dt = track - target.track;
        const long d2 = dr * dr + dt * dt;
        if (d2 > limit2 || occupancy.occupied(p))
            return;
        if (d2 < best_d2 || (d2 == best_d2 && p < *best)) {
            best = p;
            best_d2 = d2;
        }
    };

    for (int r = 0; r <= max_ring; ++r) {
        if (best && best_d2 < static_cast<long>(r) * r)
            break;
        if (r == 0) {
            consider(target.row, target.track);
            continue;
        }
        for (int t = target.track - r; t <= target.track + r; ++t) {
            consider(target.row - r, t);
            consider(target.row + r, t);
        }
        for (int row = target.row - r + 1; row <= target.row + r - 1; ++row) {
            consider(row, target.track - r);
            consider(row, target.track + r);
        }
    }
    if (!best)
        throw LegalizationError("no free track point within radius " + std::to_string(radius_limit) + " of ("
                                + std::to_string(target.row) + ", " + std::to_string(target.track) + ")");
    occupancy.occupy(*best);
    return *best;
}

namespace {

std::vector<std::vector<GateId>> intra_tier_neighbors(const Netlist& netlist, const Partition& partition, Tier tier)
{
    std::vector<std::vector<GateId>> nbrs(netlist.gate_count());
    for (std::size_t g = 0; g < netlist.gate_count(); ++g) {
        if (partition.tier[g] != tier)
            continue;
        const auto& gate = netlist.gate(static_cast<GateId>(g));
        for (NetId in : gate.inputs)
            if (const GateId d = netlist.net_at(in).driver; d != kNoGate && partition.of(d) == tier)
                nbrs[g].push_back(d);
        for (GateId s : netlist.net_at(gate.output).sinks)
            if (partition.of(s) == tier)
                nbrs[g].push_back(s);
    }
    return nbrs;
}

} // namespace

Placement place_tier(const Netlist& netlist, const Partition& partition, Tier tier, const Outline& outline,
                     std::uint64_t seed, int iterations)
{
    Placement pl{outline, tier, std::vector<std::optional<TrackPoint>>(netlist.gate_count())};
    std::vector<GateId> members;
    for (std::size_t g = 0; g < netlist.gate_count(); ++g)
        if (partition.tier[g] == tier)
            members.push_back(static_cast<GateId>(g));
    if (members.size() > outline.slots())
        throw LegalizationError("grid of " + std::to_string(outline.slots()) + " slots cannot hold "
                                + std::to_string(members.size()) + " gates");

    Rng rng(seed);
    std::vector<std::size_t> slots(outline.slots());
    std::iota(slots.begin(), slots.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(slots));
    Occupancy occ(outline);
    for (std::size_t i = 0; i < members.size(); ++i) {
        const TrackPoint p = outline.point(slots[i]);
        pl.slot[static_cast<std::size_t>(members[i])] = p;
        occ.occupy(p);
    }

    const auto nbrs = intra_tier_neighbors(netlist, partition, tier);
    const double unlimited = outline.diagonal() + 1.0;
    for (int it = 0; it < iterations; ++it) {
        for (GateId g : members) {
            const auto& around = nbrs[static_cast<std::size_t>(g)];
            if (around.empty())
                continue;
            double row = 0.0, track = 0.0;
            for (GateId m : around) {
                row += pl.of(m)->row;
                track += pl.of(m)->track;
            }
            const double k = static_cast<double>(around.size());
            const TrackPoint target{static_cast<int>(std::lround(row / k)), static_cast<int>(std::lround(track / k))};
            auto& cur = pl.slot[static_cast<std::size_t>(g)];
            occ.release(*cur);
            cur = legalize_on_track(target, occ, unlimited);
        }
    }
    return pl;
}

double hpwl(const Netlist& netlist, const Placement& placement)
{
    double total = 0.0;
    for (const auto& net : netlist.nets()) {
        int rmin = std::numeric_limits<int>::max(), rmax = std::numeric_limits<int>::min();
        int tmin = rmin, tmax = rmax;
        int pins = 0;
        auto add = [&](GateId g) {
            const auto& p = placement.of(g);
            if (!p)
                return;
            rmin = std::min(rmin, p->row);
            rmax = std::max(rmax, p->row);
            tmin = std::min(tmin, p->track);
            tmax = std::max(tmax, p->track);
            ++pins;
        };
        if (net.driver != kNoGate)
            add(net.driver);
        for (GateId s : net.sinks)
            add(s);
        if (pins >= 2)
            total += (rmax - rmin) + (tmax - tmin);
    }
    return total;
}

nlohmann::ordered_json to_json(TrackPoint p) { return nlohmann::ordered_json::array({p.row, p.track}); }

TrackPoint track_point_from_json(const nlohmann::ordered_json& j)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
        throw SchemaError("track point must be [row, track]");
    return TrackPoint{j[0].get<int>(), j[1].get<int>()};
}

nlohmann::ordered_json placement_json(const Netlist& netlist, const Placement& bottom, const Placement& top)
{
    nlohmann::ordered_json j;
    j["design"] = netlist.name();
    j["outline"] = {{"rows", bottom.outline.rows}, {"tracks", bottom.outline.tracks}};
    nlohmann::ordered_json slots = nlohmann::ordered_json::array();
    for (std::size_t g = 0; g < netlist.gate_count(); ++g) {
        const Placement& pl = bottom.slot[g] ? bottom : top;
        if (!pl.slot[g])
            continue;
        slots.push_back({{"gate", netlist.gate_name(static_cast<GateId>(g))},
                         {"tier", to_string(pl.tier)},
                         {"at", to_json(*pl.slot[g])}});
    }
    j["slots"] = std::move(slots);
    return j;
}

} // namespace f2fsec
