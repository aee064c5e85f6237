#pragma once

#include "f2fsec/corpus.hpp"
#include "f2fsec/netlist.hpp"
#include "f2fsec/public_view.hpp"
#include "f2fsec/rdl_plan.hpp"
#include "f2fsec/rng.hpp"

#include <string>
#include <vector>

namespace fixtures {

using namespace f2fsec;

// Tiers given per gate in declaration order.
inline Partition manual_partition(const Netlist& n, const std::vector<Tier>& tiers)
{
    Partition p;
    p.strategy = Strategy::Random;
    p.tier = tiers;
    p.tier.resize(n.gate_count(), Tier::Bottom);
    return p;
}

inline RdlPlan manual_plan(const Netlist& n, const std::vector<Tier>& tiers, PlanOptions options)
{
    const Partition p = manual_partition(n, tiers);
    const std::size_t crossings = cut_size(n, p).size();
    const Outline outline = fit_outline(std::max<std::size_t>({n.gate_count(), 4 * crossings, 4}));
    const Placement bottom = place_tier(n, p, Tier::Bottom, outline, mix_seed(options.seed, 1));
    const Placement top = place_tier(n, p, Tier::Top, outline, mix_seed(options.seed, 2));
    return build_plan(n, p, bottom, top, options);
}

// n PI-to-PO wires, each a bottom buffer feeding a top buffer. With `tied`,
// the first two wires read the same input.
inline std::string wires_bench(int n, bool tied = false)
{
    std::string s;
    for (int i = 0; i < n; ++i)
        s += "INPUT(a" + std::to_string(i) + ")\n";
    for (int i = 0; i < n; ++i)
        s += "OUTPUT(t" + std::to_string(i) + ")\n";
    for (int i = 0; i < n; ++i) {
        const int src = tied && i == 1 ? 0 : i;
        s += "b" + std::to_string(i) + " = BUFF(a" + std::to_string(src) + ")\n";
    }
    for (int i = 0; i < n; ++i)
        s += "t" + std::to_string(i) + " = BUFF(b" + std::to_string(i) + ")\n";
    return s;
}

// Bottom gates first, then top gates, as laid out by wires_bench.
inline std::vector<Tier> wires_tiers(int n)
{
    std::vector<Tier> t(static_cast<std::size_t>(2 * n), Tier::Bottom);
    for (int i = n; i < 2 * n; ++i)
        t[static_cast<std::size_t>(i)] = Tier::Top;
    return t;
}

inline PlanOptions options(bool randomize, bool boxes, std::uint64_t seed = 1)
{
    PlanOptions o;
    o.randomize = randomize;
    o.use_switchboxes = boxes;
    o.seed = seed;
    return o;
}

inline int sink_read_by(const PublicView& v, const std::string& gate)
{
    for (const auto& g : v.gates)
        if (g.name == gate)
            for (const auto& in : g.inputs)
                for (const auto& s : v.sinks)
                    if (s.net == in)
                        return s.id;
    return -1;
}

inline int driver_on(const PublicView& v, const std::string& net)
{
    for (const auto& d : v.drivers)
        if (d.net == net)
            return d.id;
    return -1;
}

} // namespace fixtures
