#pragma once

#include "f2fsec/netlist.hpp"
#include "f2fsec/rdl_plan.hpp"

#include <cstdint>

namespace f2fsec {

inline constexpr std::size_t kDefaultPatterns = 10'000;

// Correct connection rate in percent: share of sinks assigned their true driver.
double ccr(const ConnectionKey& truth, const ConnectionKey& recovered);

// Percentage of output bits that differ between the two netlists over
// n_patterns uniform random input patterns drawn from seed. The netlists must
// expose identical input and output names in the same order.
double hamming_distance(const Netlist& oracle, const Netlist& candidate, std::size_t n_patterns, std::uint64_t seed);

struct SolutionSpace {
    std::size_t d_bot = 0;
    std::size_t d_top = 0;
    bool with_switchboxes = false;
    double log10_count = 0.0;
    // Switchbox variant that charges 4! per box instead of once:
    // (4!)^((d_bot + d_top) / 4) * (d_bot / 4)! * (d_top / 4)!.
    double log10_count_per_box = 0.0;
};

// Without switchboxes: d_bot! * d_top!. With switchboxes:
// 4! * (d_bot / 4)! * (d_top / 4)!, which needs both counts divisible by 4.
SolutionSpace solution_space(std::size_t d_bot, std::size_t d_top, bool with_switchboxes);

double log10_factorial(std::size_t n);

} // namespace f2fsec
