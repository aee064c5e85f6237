#pragma once

#include "f2fsec/rdl_plan.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace f2fsec {

// Conservative: switchbox membership is known and only in-box permutations
// stay secret. Full: only port coordinates and box locations are visible.
enum class ViewMode : std::uint8_t { Conservative, Full };

std::string_view to_string(ViewMode mode);
std::optional<ViewMode> parse_view_mode(std::string_view name);

struct ViewGate {
    std::string name;
    GateType type;
    Tier tier;
    std::vector<std::string> inputs; // sink stubs appear under their stub net name
    TrackPoint at;
};

struct DriverStub {
    int id;
    Direction direction;
    std::string net; // the driving net inside its tier
    TrackPoint at;
};

struct SinkStub {
    int id;
    Direction direction;
    std::string net; // anonymous dangling net read by the sink-tier gates
    TrackPoint at;
};

struct PublicBox {
    int id;
    Direction direction;
    TrackPoint at;
    std::vector<int> drivers; // slot order; empty in full mode
    std::vector<int> sinks;
};

// What an untrusted foundry holding both tier layouts sees: no pairing, no
// permutations, no seed.
struct PublicView {
    std::string design;
    ViewMode mode = ViewMode::Conservative;
    Outline outline;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::vector<ViewGate> gates;
    std::vector<DriverStub> drivers; // indexed by stub id
    std::vector<SinkStub> sinks;     // indexed by stub id
    std::vector<PublicBox> boxes;

    // Box holding the sink stub, when membership is visible.
    std::vector<std::optional<int>> sink_box() const;
    std::vector<std::optional<int>> driver_box() const;
};

PublicView public_view(const RdlPlan& plan, ViewMode mode);

nlohmann::ordered_json view_json(const PublicView& view);

// Throws SchemaError on unknown or missing fields; key material never passes.
void validate_view_json(const nlohmann::ordered_json& j);
PublicView view_from_json(const nlohmann::ordered_json& j);

// Resolves every sink stub onto a driver and returns the merged netlist.
// Throws KeyError for malformed or non-bijective keys, direction mismatches,
// in-box violations (when membership is known) and keys inducing a
// combinational cycle.
Netlist apply_key(const PublicView& view, const ConnectionKey& key, bool require_bijective = true);

// Reads the true pairing off the original netlist: each sink stub's readers
// are looked up in the oracle and their fanin net names the driver.
ConnectionKey derive_true_key(const PublicView& view, const Netlist& oracle);

} // namespace f2fsec
