#pragma once

#include "f2fsec/error.hpp"
#include "f2fsec/netlist.hpp"
#include "f2fsec/timing.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace f2fsec {

enum class Tier : std::uint8_t { Bottom, Top };
enum class Direction : std::uint8_t { BottomToTop, TopToBottom };
enum class Strategy : std::uint8_t { Random, MaxCut, TimingAware };

std::string_view to_string(Tier tier);
std::string_view to_string(Direction dir);
std::string_view to_string(Strategy strategy);
std::optional<Strategy> parse_strategy(std::string_view name);
std::optional<Direction> parse_direction(std::string_view name);

inline Direction direction_from(Tier driver) { return driver == Tier::Bottom ? Direction::BottomToTop : Direction::TopToBottom; }

struct Partition {
    Strategy strategy = Strategy::Random;
    std::vector<Tier> tier; // indexed by gate
    double move_fraction = 0.0;
    std::uint64_t seed = 0;

    std::size_t top_count() const;
    Tier of(GateId g) const { return tier[static_cast<std::size_t>(g)]; }
};

// A net whose driver gate sits in a different tier than at least one sink gate.
// Nets driven by primary inputs never cross: those enter each tier through
// boundary I/O.
struct CrossingNet {
    NetId net;
    Direction direction;
};

struct CutSet {
    std::vector<CrossingNet> nets; // ascending net id

    std::size_t size() const noexcept { return nets.size(); }
    std::size_t count(Direction dir) const;
};

Partition partition_random(const Netlist& netlist, double move_fraction, std::uint64_t seed);

// Alternates tiers along timing paths, most critical path first, until
// floor(move_fraction * gates) gates sit in Top. move_fraction in [0, 0.5].
Partition partition_maxcut(const Netlist& netlist, const TimingInfo& timing, double move_fraction,
                           std::uint64_t seed);

// Carries the closest partition found when bisection runs out of iterations.
class BalanceError : public Error {
public:
    BalanceError(const std::string& message, Partition best) : Error(message), best_(std::move(best)) {}
    const Partition& best() const noexcept { return best_; }

private:
    Partition best_;
};

inline constexpr double kDefaultBalanceEps = 0.05;
inline constexpr int kDefaultBalanceIterations = 64;

// Gates with slack <= threshold stay in Bottom. The threshold is bisected until
// the tiers are balanced within balance_eps; slack ties that make balance
// unreachable are resolved by moving tied gates in ascending name order.
Partition partition_timing_aware(const Netlist& netlist, const TimingInfo& timing,
                                 double balance_eps = kDefaultBalanceEps, int max_iter = kDefaultBalanceIterations);

CutSet cut_size(const Netlist& netlist, const Partition& partition);

// Top-tier gate fraction that equalizes tier areas when a lifted gate costs
// area_ratio times its bottom-tier area.
double lifting_fraction(double area_ratio);

nlohmann::ordered_json partition_json(const Netlist& netlist, const Partition& partition, const CutSet& cut);

} // namespace f2fsec
