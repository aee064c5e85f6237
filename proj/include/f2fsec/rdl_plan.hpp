#pragma once

#include "f2fsec/layout.hpp"
#include "f2fsec/netlist.hpp"
#include "f2fsec/partition.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace f2fsec {

inline constexpr int kSwitchBoxSize = 4;
inline constexpr double kDefaultRadiusFraction = 0.25;

struct PlanOptions {
    bool randomize = true;
    bool use_switchboxes = true;
    std::uint64_t seed = 1;
    // Legalization search radius as a fraction of the die diagonal.
    double radius_fraction = kDefaultRadiusFraction;
};

// One F2F via pair per crossing net. The driver stub sits on the driver's tier
// face and the sink stub on the other face; with randomization the top-face
// point is drawn away from the bottom-face point.
struct F2FPort {
    NetId net;
    Direction direction;
    TrackPoint bottom;
    TrackPoint top;
    double displacement; // |bottom - top| / die diagonal
    int driver_stub;
    int sink_stub;

    TrackPoint driver_point() const { return direction == Direction::BottomToTop ? bottom : top; }
    TrackPoint sink_point() const { return direction == Direction::BottomToTop ? top : bottom; }
};

// Driver slot i feeds sink slot perm[i].
struct SwitchBox {
    int id;
    Direction direction;
    std::vector<int> driver_slots; // driver stub ids
    std::vector<int> sink_slots;   // sink stub ids
    std::vector<int> perm;
    TrackPoint location;

    std::size_t size() const noexcept { return driver_slots.size(); }
};

// Secret sink-to-driver pairing, indexed by sink stub id.
struct ConnectionKey {
    std::vector<int> driver_of_sink;

    bool operator==(const ConnectionKey&) const = default;
};

struct RdlPlan {
    Netlist netlist;
    Partition partition;
    Placement bottom;
    Placement top;
    CutSet cut;
    Outline outline;
    PlanOptions options;
    std::vector<F2FPort> ports; // ascending crossing-net id
    std::vector<SwitchBox> boxes;
    ConnectionKey key;

    std::size_t box_count(Direction dir) const;
};

RdlPlan build_plan(const Netlist& netlist, const Partition& partition, const Placement& bottom, const Placement& top,
                   const PlanOptions& options);

// Normalized port displacements, one per port in port order.
std::vector<double> distance_histogram(const RdlPlan& plan);
std::string histogram_csv(const RdlPlan& plan);

// Private artifact: carries the permutations and the pairing key.
nlohmann::ordered_json plan_json(const RdlPlan& plan);

struct ProtectConfig {
    Strategy strategy = Strategy::TimingAware;
    double move_fraction = 0.5;
    double balance_eps = kDefaultBalanceEps;
    int balance_iterations = kDefaultBalanceIterations;
    int place_iterations = kDefaultPlaceIterations;
    PlanOptions plan;
};

// Whole defense flow: partition, size the shared outline, place each tier
// independently, then plan the F2F interconnect. The partition, bottom
// placement, and top placement draw from separate seed streams.
RdlPlan protect_design(const Netlist& netlist, const ProtectConfig& config);

nlohmann::ordered_json to_json(const ProtectConfig& config);

} // namespace f2fsec
