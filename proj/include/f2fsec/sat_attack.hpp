#pragma once

#include "f2fsec/keyed_circuit.hpp"

#include <json.hpp>

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace f2fsec {

enum class SatOutcome : std::uint8_t { KeyFound, Timeout };

std::string_view to_string(SatOutcome outcome);

struct SatAttackOptions {
    std::optional<double> timeout_seconds;
    // Stop after this many distinguishing inputs; 0 means no limit. Hitting
    // the limit reports a timeout.
    std::size_t max_dips = 0;
};

struct SatAttackStats {
    std::size_t dips = 0;
    std::size_t solver_calls = 0;
    std::size_t cycles_blocked = 0;
    std::uint64_t conflicts = 0;
    int key_width = 0;
    double seconds = 0.0;
    SatOutcome outcome = SatOutcome::Timeout;
};

struct SatAttackResult {
    std::optional<ConnectionKey> key; // set iff outcome is KeyFound
    SatAttackStats stats;
    // Distinguishing inputs (view input order) with the oracle's outputs
    // (view output order).
    std::vector<std::pair<Pattern, Response>> observations;
};

// Oracle-guided key recovery: finds distinguishing inputs on a miter of two
// keyed copies, constrains both copies with the oracle response, and stops
// once no two remaining keys disagree. Keys that close a combinational loop
// are blocked as they surface. The oracle must expose the view's input and
// output names.
SatAttackResult run_sat_attack(const KeyedCircuit& circuit, const Netlist& oracle, const SatAttackOptions& options = {});

nlohmann::ordered_json to_json(const SatAttackStats& stats);

} // namespace f2fsec
