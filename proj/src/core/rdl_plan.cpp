#include "f2fsec/rdl_plan.hpp"

#include "f2fsec/error.hpp"
#include "f2fsec/rng.hpp"
#include "f2fsec/timing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>

namespace f2fsec {

namespace {

enum SeedStream : std::uint64_t { kPartitionStream = 0, kBottomStream, kTopStream, kPortStream, kStubStream, kBoxStream };

TrackPoint centroid(const std::vector<TrackPoint>& points)
{
    double row = 0.0, track = 0.0;
    for (const auto& p : points) {
        row += p.row;
        track += p.track;
    }
    const auto k = static_cast<double>(points.size());
    return {static_cast<int>(std::lround(row / k)), static_cast<int>(std::lround(track / k))};
}

// Uniform draws from the free points of an occupancy grid.
class FreePool {
public:
    explicit FreePool(const Occupancy& occ) : outline_(occ.outline()), where_(occ.outline().slots(), kAbsent)
    {
        for (std::size_t i = 0; i < outline_.slots(); ++i)
            if (!occ.occupied(outline_.point(i))) {
                where_[i] = points_.size();
                points_.push_back(i);
            }
    }

    std::size_t size() const noexcept { return points_.size(); }

    // Uniform over free points other than `avoid`, unless `avoid` is the only one.
    TrackPoint take(Rng& rng, TrackPoint avoid)
    {
        const std::size_t avoid_index = outline_.index(avoid);
        std::size_t pick;
        do {
            pick = points_[rng.below(points_.size())];
        } while (pick == avoid_index && points_.size() > 1);
        remove(pick);
        return outline_.point(pick);
    }

    void remove(std::size_t index)
    {
        const std::size_t at = where_[index];
        if (at == kAbsent)
            return;
        const std::size_t last = points_.back();
        points_[at] = last;
        where_[last] = at;
        points_.pop_back();
        where_[index] = kAbsent;
    }

private:
    static constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);
    Outline outline_;
    std::vector<std::size_t> points_;
    std::vector<std::size_t> where_;
};

} // namespace

std::size_t RdlPlan::box_count(Direction dir) const
{
    return static_cast<std::size_t>(
        std::count_if(boxes.begin(), boxes.end(), [dir](const SwitchBox& b) { return b.direction == dir; }));
}

RdlPlan build_plan(const Netlist& netlist, const Partition& partition, const Placement& bottom, const Placement& top,
                   const PlanOptions& options)
{
    if (bottom.outline != top.outline)
        throw InvalidArgument("tiers must share one outline");
    if (!(options.radius_fraction >= 0.0))
        throw InvalidArgument("radius fraction must be >= 0");

    RdlPlan plan{netlist, partition, bottom, top, cut_size(netlist, partition), bottom.outline, options, {}, {}, {}};
    const Outline& outline = plan.outline;
    const double radius = options.radius_fraction * outline.diagonal();
    const std::size_t m = plan.cut.size();
    if (m > outline.slots())
        throw LegalizationError("outline has " + std::to_string(outline.slots()) + " track points for "
                                + std::to_string(m) + " F2F ports");

    auto where = [&](GateId g) {
        const auto& p = partition.of(g) == Tier::Bottom ? bottom.of(g) : top.of(g);
        if (!p)
            throw InvalidArgument("gate '" + netlist.gate_name(g) + "' has no placement");
        return *p;
    };

    Occupancy bottom_face(outline);
    plan.ports.reserve(m);
    for (const auto& crossing : plan.cut.nets) {
        const Net& net = netlist.net_at(crossing.net);
        std::vector<TrackPoint> pins{where(net.driver)};
        for (GateId s : net.sinks)
            pins.push_back(where(s));
        TrackPoint at;
        try {
            at = legalize_on_track(centroid(pins), bottom_face, radius);
        } catch (const LegalizationError& e) {
            throw LegalizationError("F2F port for net '" + net.name + "': " + e.what());
        }
        plan.ports.push_back(F2FPort{crossing.net, crossing.direction, at, at, 0.0, -1, -1});
    }

    Occupancy top_face(outline);
    if (options.randomize) {
        Rng rng(mix_seed(options.seed, kPortStream));
        FreePool pool(top_face);
        for (auto& port : plan.ports) {
            port.top = pool.take(rng, port.bottom);
            port.displacement = distance(port.bottom, port.top) / outline.diagonal();
        }
    }

    std::vector<int> driver_ids(m), sink_ids(m);
    std::iota(driver_ids.begin(), driver_ids.end(), 0);
    std::iota(sink_ids.begin(), sink_ids.end(), 0);
    Rng stub_rng(mix_seed(options.seed, kStubStream));
    stub_rng.shuffle(std::span<int>(driver_ids));
    stub_rng.shuffle(std::span<int>(sink_ids));
    plan.key.driver_of_sink.assign(m, -1);
    for (std::size_t i = 0; i < m; ++i) {
        plan.ports[i].driver_stub = driver_ids[i];
        plan.ports[i].sink_stub = sink_ids[i];
        plan.key.driver_of_sink[static_cast<std::size_t>(sink_ids[i])] = driver_ids[i];
    }

    if (options.use_switchboxes) {
        Rng rng(mix_seed(options.seed, kBoxStream));
        Occupancy box_grid(outline);
        const double unlimited = outline.diagonal() + 1.0;
        for (Direction dir : {Direction::BottomToTop, Direction::TopToBottom}) {
            std::vector<std::size_t> members;
            for (std::size_t i = 0; i < m; ++i)
                if (plan.ports[i].direction == dir)
                    members.push_back(i);
            rng.shuffle(std::span<std::size_t>(members));
            for (std::size_t first = 0; first < members.size(); first += kSwitchBoxSize) {
                const std::size_t k = std::min<std::size_t>(kSwitchBoxSize, members.size() - first);
                SwitchBox box{static_cast<int>(plan.boxes.size()), dir, std::vector<int>(k), std::vector<int>(k),
                              std::vector<int>(k), {}};
                std::iota(box.perm.begin(), box.perm.end(), 0);
                rng.shuffle(std::span<int>(box.perm));
                std::vector<TrackPoint> pins;
                for (std::size_t i = 0; i < k; ++i) {
                    const auto& port = plan.ports[members[first + i]];
                    box.driver_slots[i] = port.driver_stub;
                    box.sink_slots[static_cast<std::size_t>(box.perm[i])] = port.sink_stub;
                    pins.push_back(port.bottom);
                    pins.push_back(port.top);
                }
                box.location = legalize_on_track(centroid(pins), box_grid, unlimited);
                plan.boxes.push_back(std::move(box));
            }
        }
    }
    return plan;
}

std::vector<double> distance_histogram(const RdlPlan& plan)
{
    std::vector<double> values;
    values.reserve(plan.ports.size());
    for (const auto& p : plan.ports)
        values.push_back(p.displacement);
    return values;
}

std::string histogram_csv(const RdlPlan& plan)
{
    std::string out = "port,net,direction,normalized_distance\n";
    char buf[64];
    for (std::size_t i = 0; i < plan.ports.size(); ++i) {
        const auto& p = plan.ports[i];
        std::snprintf(buf, sizeof buf, "%.6f", p.displacement);
        out += std::to_string(i) + ',' + plan.netlist.net_at(p.net).name + ',' + std::string(to_string(p.direction))
               + ',' + buf + '\n';
    }
    return out;
}

nlohmann::ordered_json to_json(const ProtectConfig& config)
{
    return {{"strategy", to_string(config.strategy)},
            {"fraction", config.move_fraction},
            {"balance_eps", config.balance_eps},
            {"balance_iterations", config.balance_iterations},
            {"place_iterations", config.place_iterations},
            {"randomize", config.plan.randomize},
            {"switchboxes", config.plan.use_switchboxes},
            {"radius_fraction", config.plan.radius_fraction},
            {"seed", config.plan.seed}};
}

nlohmann::ordered_json plan_json(const RdlPlan& plan)
{
    nlohmann::ordered_json j;
    j["kind"] = "rdl_plan";
    j["version"] = 1;
    j["design"] = plan.netlist.name();
    j["options"] = {{"randomize", plan.options.randomize},
                    {"switchboxes", plan.options.use_switchboxes},
                    {"seed", plan.options.seed},
                    {"radius_fraction", plan.options.radius_fraction}};
    j["outline"] = {{"rows", plan.outline.rows}, {"tracks", plan.outline.tracks}};
    auto ports = nlohmann::ordered_json::array();
    for (const auto& p : plan.ports)
        ports.push_back({{"net", plan.netlist.net_at(p.net).name},
                         {"direction", to_string(p.direction)},
                         {"bottom", to_json(p.bottom)},
                         {"top", to_json(p.top)},
                         {"displacement", p.displacement},
                         {"driver_stub", p.driver_stub},
                         {"sink_stub", p.sink_stub}});
    j["ports"] = std::move(ports);
    auto boxes = nlohmann::ordered_json::array();
    for (const auto& b : plan.boxes)
        boxes.push_back({{"id", b.id},
                         {"direction", to_string(b.direction)},
                         {"at", to_json(b.location)},
                         {"drivers", b.driver_slots},
                         {"sinks", b.sink_slots},
                         {"perm", b.perm}});
    j["boxes"] = std::move(boxes);
    j["key"] = plan.key.driver_of_sink;
    return j;
}

RdlPlan protect_design(const Netlist& netlist, const ProtectConfig& config)
{
    const std::uint64_t seed = config.plan.seed;
    const std::uint64_t partition_seed = mix_seed(seed, kPartitionStream);
    Partition partition;
    switch (config.strategy) {
    case Strategy::Random:
        partition = partition_random(netlist, config.move_fraction, partition_seed);
        break;
    case Strategy::MaxCut:
        partition = partition_maxcut(netlist, compute_timing(netlist), config.move_fraction, partition_seed);
        break;
    case Strategy::TimingAware:
        partition = partition_timing_aware(netlist, compute_timing(netlist), config.balance_eps,
                                           config.balance_iterations);
        break;
    }
    partition.seed = seed;

    const std::size_t top_gates = partition.top_count();
    const std::size_t bottom_gates = netlist.gate_count() - top_gates;
    const std::size_t crossings = cut_size(netlist, partition).size();
    // Ports crowd around net centroids, so the die must let the legalization
    // disk (about 2*pi*f^2 of a square outline) hold all of them.
    const double f = config.plan.radius_fraction;
    const double disk_share = std::min(1.0, 2.0 * std::numbers::pi * f * f);
    const auto port_cells = disk_share > 0.0
                                ? static_cast<std::size_t>(std::ceil(static_cast<double>(crossings) * kDefaultUtilization / disk_share))
                                : crossings;
    Outline outline = fit_outline(std::max({top_gates, bottom_gates, crossings, port_cells}));
    // On small dies the lattice holds fewer points than the disk area
    // suggests; grow the outline until every port finds a track.
    constexpr int kMaxGrowth = 64;
    for (int growth = 0;; ++growth) {
        const Placement bottom = place_tier(netlist, partition, Tier::Bottom, outline, mix_seed(seed, kBottomStream),
                                            config.place_iterations);
        const Placement top =
            place_tier(netlist, partition, Tier::Top, outline, mix_seed(seed, kTopStream), config.place_iterations);
        try {
            return build_plan(netlist, partition, bottom, top, config.plan);
        } catch (const LegalizationError&) {
            if (growth == kMaxGrowth)
                throw;
        }
        ++outline.rows;
        ++outline.tracks;
    }
}

} // namespace f2fsec
