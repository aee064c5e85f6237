#include "f2fsec/metrics.hpp"

#include "f2fsec/error.hpp"
#include "f2fsec/rng.hpp"

#include <bit>
#include <cmath>

namespace f2fsec {

double ccr(const ConnectionKey& truth, const ConnectionKey& recovered)
{
    if (truth.driver_of_sink.size() != recovered.driver_of_sink.size())
        throw InvalidArgument("keys have different shapes");
    if (truth.driver_of_sink.empty())
        return 100.0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < truth.driver_of_sink.size(); ++i)
        correct += truth.driver_of_sink[i] == recovered.driver_of_sink[i];
    return 100.0 * static_cast<double>(correct) / static_cast<double>(truth.driver_of_sink.size());
}

namespace {

void check_interface(const Netlist& a, const Netlist& b)
{
    auto names_match = [&](std::span<const NetId> x, std::span<const NetId> y) {
        if (x.size() != y.size())
            return false;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (a.net_at(x[i]).name != b.net_at(y[i]).name)
                return false;
        return true;
    };
    if (!names_match(a.inputs(), b.inputs()) || !names_match(a.outputs(), b.outputs()))
        throw InvalidArgument("netlists '" + a.name() + "' and '" + b.name() + "' expose different interfaces");
}

} // namespace

double hamming_distance(const Netlist& oracle, const Netlist& candidate, std::size_t n_patterns, std::uint64_t seed)
{
    check_interface(oracle, candidate);
    if (n_patterns == 0 || oracle.output_count() == 0)
        return 0.0;
    const Simulator a(oracle), b(candidate);
    Rng rng(seed);
    std::vector<std::uint64_t> words(oracle.input_count());
    std::uint64_t differing = 0;
    for (std::size_t done = 0; done < n_patterns; done += 64) {
        const std::size_t block = std::min<std::size_t>(64, n_patterns - done);
        const std::uint64_t mask = block == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << block) - 1;
        for (auto& w : words)
            w = rng.next();
        const auto ya = a.run(words);
        const auto yb = b.run(words);
        for (std::size_t o = 0; o < ya.size(); ++o)
            differing += static_cast<std::uint64_t>(std::popcount((ya[o] ^ yb[o]) & mask));
    }
    return 100.0 * static_cast<double>(differing)
           / (static_cast<double>(n_patterns) * static_cast<double>(oracle.output_count()));
}

double log10_factorial(std::size_t n)
{
    if (n <= 170) {
        double f = 1.0;
        for (std::size_t i = 2; i <= n; ++i)
            f *= static_cast<double>(i);
        return std::log10(f);
    }
    return std::lgamma(static_cast<double>(n) + 1.0) / std::log(10.0);
}

SolutionSpace solution_space(std::size_t d_bot, std::size_t d_top, bool with_switchboxes)
{
    SolutionSpace s{d_bot, d_top, with_switchboxes, 0.0, 0.0};
    if (!with_switchboxes) {
        s.log10_count = log10_factorial(d_bot) + log10_factorial(d_top);
        s.log10_count_per_box = s.log10_count;
        return s;
    }
    if (d_bot % 4 != 0 || d_top % 4 != 0)
        throw InvalidArgument("switchbox solution space needs driver counts divisible by 4");
    const double log_groups = log10_factorial(d_bot / 4) + log10_factorial(d_top / 4);
    s.log10_count = log10_factorial(4) + log_groups;
    s.log10_count_per_box = static_cast<double>((d_bot + d_top) / 4) * log10_factorial(4) + log_groups;
    return s;
}

} // namespace f2fsec
