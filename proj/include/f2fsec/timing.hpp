#pragma once

#include "f2fsec/netlist.hpp"

#include <json.hpp>

#include <vector>

namespace f2fsec {

// Unit-delay timing: every gate costs one, wires are free.
struct TimingInfo {
    std::vector<int> arrival;
    std::vector<int> required;
    std::vector<int> slack;
    int critical_delay = 0;
};

TimingInfo compute_timing(const Netlist& netlist);

// A PI-to-PO chain. `source` is the primary (or pseudo) input feeding the first
// gate; length counts gates.
struct TimingPath {
    NetId source = -1;
    std::vector<GateId> gates;

    int length() const noexcept { return static_cast<int>(gates.size()); }
};

inline constexpr int kDefaultPathVisitCap = 16;

// Up to k paths, longest first; equal lengths ordered by gate names, then by
// source name. Enumeration walks backwards from output-driving gates and
// expands each gate at most visit_cap times.
std::vector<TimingPath> extract_paths(const Netlist& netlist, const TimingInfo& timing, std::size_t k,
                                      int visit_cap = kDefaultPathVisitCap);

nlohmann::ordered_json timing_report_json(const Netlist& netlist, const TimingInfo& timing);

} // namespace f2fsec
