#include "f2fsec/partition.hpp"

#include "f2fsec/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace f2fsec {

std::string_view to_string(Tier tier) { return tier == Tier::Bottom ? "bottom" : "top"; }

std::string_view to_string(Direction dir) { return dir == Direction::BottomToTop ? "bottom_to_top" : "top_to_bottom"; }

std::string_view to_string(Strategy strategy)
{
    switch (strategy) {
    case Strategy::Random: return "random";
    case Strategy::MaxCut: return "maxcut";
    case Strategy::TimingAware: return "timing";
    }
    return "?";
}

std::optional<Strategy> parse_strategy(std::string_view name)
{
    if (name == "random")
        return Strategy::Random;
    if (name == "maxcut")
        return Strategy::MaxCut;
    if (name == "timing")
        return Strategy::TimingAware;
    return std::nullopt;
}

std::optional<Direction> parse_direction(std::string_view name)
{
    if (name == "bottom_to_top")
        return Direction::BottomToTop;
    if (name == "top_to_bottom")
        return Direction::TopToBottom;
    return std::nullopt;
}

std::size_t Partition::top_count() const
{
    return static_cast<std::size_t>(std::count(tier.begin(), tier.end(), Tier::Top));
}

std::size_t CutSet::count(Direction dir) const
{
    return static_cast<std::size_t>(
        std::count_if(nets.begin(), nets.end(), [dir](const CrossingNet& c) { return c.direction == dir; }));
}

namespace {

std::size_t top_quota(double fraction, std::size_t gates)
{
    return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(gates) + 1e-9));
}

void check_fraction(double fraction, double upper)
{
    if (!(fraction >= 0.0 && fraction <= upper))
        throw InvalidArgument("move fraction " + std::to_string(fraction) + " outside [0, " + std::to_string(upper)
                              + "]");
}

} // namespace

Partition partition_random(const Netlist& netlist, double move_fraction, std::uint64_t seed)
{
    check_fraction(move_fraction, 1.0);
    const std::size_t n = netlist.gate_count();
    Partition p{Strategy::Random, std::vector<Tier>(n, Tier::Bottom), move_fraction, seed};
    std::vector<GateId> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(std::span<GateId>(order));
    const std::size_t quota = top_quota(move_fraction, n);
    for (std::size_t i = 0; i < quota; ++i)
        p.tier[static_cast<std::size_t>(order[i])] = Tier::Top;
    return p;
}

Partition partition_maxcut(const Netlist& netlist, const TimingInfo& timing, double move_fraction, std::uint64_t seed)
{
    check_fraction(move_fraction, 0.5);
    const std::size_t n = netlist.gate_count();
    Partition p{Strategy::MaxCut, std::vector<Tier>(n, Tier::Bottom), move_fraction, seed};
    const std::size_t quota = top_quota(move_fraction, n);
    if (quota == 0)
        return p;

    Rng rng(seed);
    std::vector<std::optional<Tier>> assigned(n);
    std::size_t top = 0;
    const auto paths = extract_paths(netlist, timing, std::numeric_limits<std::size_t>::max());
    for (const auto& path : paths) {
        if (top == quota)
            break;
        const Tier start = rng.coin() ? Tier::Top : Tier::Bottom;
        std::optional<Tier> prev;
        for (GateId g : path.gates) {
            auto& slot = assigned[static_cast<std::size_t>(g)];
            if (!slot) {
                Tier want = prev ? (*prev == Tier::Top ? Tier::Bottom : Tier::Top) : start;
                if (want == Tier::Top && top == quota)
                    want = Tier::Bottom;
                slot = want;
                top += want == Tier::Top;
            }
            prev = slot;
        }
    }
    for (std::size_t g = 0; g < n; ++g)
        p.tier[g] = assigned[g].value_or(Tier::Bottom);

    // Short of the quota once every path is walked: lift random bottom gates.
    if (top < quota) {
        std::vector<GateId> bottom;
        for (std::size_t g = 0; g < n; ++g)
            if (p.tier[g] == Tier::Bottom)
                bottom.push_back(static_cast<GateId>(g));
        rng.shuffle(std::span<GateId>(bottom));
        for (std::size_t i = 0; top < quota; ++i, ++top)
            p.tier[static_cast<std::size_t>(bottom[i])] = Tier::Top;
    }
    return p;
}

Partition partition_timing_aware(const Netlist& netlist, const TimingInfo& timing, double balance_eps, int max_iter)
{
    if (!(balance_eps > 0.0 && balance_eps < 0.5))
        throw InvalidArgument("balance_eps must lie in (0, 0.5)");
    if (max_iter < 1)
        throw InvalidArgument("max_iter must be >= 1");
    const std::size_t n = netlist.gate_count();
    Partition p{Strategy::TimingAware, std::vector<Tier>(n, Tier::Bottom), 0.0, 0};
    if (n == 0)
        return p;

    const auto total = static_cast<long>(n);
    // Odd gate counts can never split evenly; one gate of imbalance is the floor.
    const double allowed = std::max(balance_eps * static_cast<double>(n), static_cast<double>(n % 2));
    auto imbalance = [&](long top) { return static_cast<double>(std::labs(2 * top - total)); };
    auto top_above = [&](int threshold) {
        return static_cast<long>(
            std::count_if(timing.slack.begin(), timing.slack.end(), [threshold](int s) { return s > threshold; }));
    };
    auto assign = [&](int threshold) {
        for (std::size_t g = 0; g < n; ++g)
            p.tier[g] = timing.slack[g] > threshold ? Tier::Top : Tier::Bottom;
        p.move_fraction = static_cast<double>(p.top_count()) / static_cast<double>(n);
    };

    const auto [min_it, max_it] = std::minmax_element(timing.slack.begin(), timing.slack.end());
    int lo = *min_it - 1; // every gate above: all Top
    int hi = *max_it;     // none above: all Bottom
    int best_threshold = hi;
    double best_imbalance = imbalance(0);

    for (int iter = 0; iter < max_iter; ++iter) {
        if (hi - lo <= 1) {
            // Slack ties: threshold hi leaves Bottom too full; lift gates whose
            // slack equals hi in ascending name order.
            assign(hi);
            std::vector<GateId> tied;
            for (std::size_t g = 0; g < n; ++g)
                if (timing.slack[g] == hi)
                    tied.push_back(static_cast<GateId>(g));
            std::sort(tied.begin(), tied.end(),
                      [&](GateId a, GateId b) { return netlist.gate_name(a) < netlist.gate_name(b); });
            long top = static_cast<long>(p.top_count());
            for (GateId g : tied) {
                if (imbalance(top) <= allowed)
                    break;
                p.tier[static_cast<std::size_t>(g)] = Tier::Top;
                ++top;
            }
            p.move_fraction = static_cast<double>(top) / static_cast<double>(n);
            return p;
        }
        const int mid = lo + (hi - lo) / 2;
        const long top = top_above(mid);
        if (imbalance(top) < best_imbalance) {
            best_imbalance = imbalance(top);
            best_threshold = mid;
        }
        if (imbalance(top) <= allowed) {
            assign(mid);
            return p;
        }
        if (2 * top > total)
            lo = mid;
        else
            hi = mid;
    }
    assign(best_threshold);
    throw BalanceError("timing-aware partitioning did not balance within " + std::to_string(max_iter)
                           + " iterations",
                       p);
}

CutSet cut_size(const Netlist& netlist, const Partition& partition)
{
    CutSet cut;
    const auto nets = netlist.nets();
    for (std::size_t id = 0; id < nets.size(); ++id) {
        const auto& net = nets[id];
        if (net.driver == kNoGate)
            continue;
        const Tier driver = partition.of(net.driver);
        const bool crosses =
            std::any_of(net.sinks.begin(), net.sinks.end(), [&](GateId s) { return partition.of(s) != driver; });
        if (crosses)
            cut.nets.push_back(CrossingNet{static_cast<NetId>(id), direction_from(driver)});
    }
    return cut;
}

double lifting_fraction(double area_ratio)
{
    if (!(area_ratio > 0.0))
        throw InvalidArgument("area ratio must be positive");
    return 1.0 / (1.0 + area_ratio);
}

nlohmann::ordered_json partition_json(const Netlist& netlist, const Partition& partition, const CutSet& cut)
{
    nlohmann::ordered_json j;
    j["design"] = netlist.name();
    j["strategy"] = to_string(partition.strategy);
    j["seed"] = partition.seed;
    j["fraction"] = partition.move_fraction;
    nlohmann::ordered_json assignments = nlohmann::ordered_json::object();
    for (std::size_t g = 0; g < netlist.gate_count(); ++g)
        assignments[netlist.gate_name(static_cast<GateId>(g))] = to_string(partition.tier[g]);
    j["assignments"] = std::move(assignments);
    j["cut_size"] = cut.size();
    j["directions"] = {{"bottom_to_top", cut.count(Direction::BottomToTop)},
                       {"top_to_bottom", cut.count(Direction::TopToBottom)}};
    return j;
}

} // namespace f2fsec
