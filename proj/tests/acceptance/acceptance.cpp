// Acceptance suite: one PASS/FAIL line per criterion. `--only N` runs one.

#include "f2fsec/corpus.hpp"
#include "f2fsec/error.hpp"
#include "f2fsec/keyed_circuit.hpp"
#include "f2fsec/metrics.hpp"
#include "f2fsec/partition.hpp"
#include "f2fsec/proximity_attack.hpp"
#include "f2fsec/public_view.hpp"
#include "f2fsec/rdl_plan.hpp"
#include "f2fsec/rng.hpp"
#include "f2fsec/sat_attack.hpp"
#include "f2fsec/timing.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

using namespace f2fsec;

namespace {

using Clock = std::chrono::steady_clock;

const std::vector<std::string> kAll = {"c17", "c432", "c880", "c1355", "c3540"};
const std::vector<std::string> kLarge = {"c432", "c880", "c1355", "c3540"};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Runs body(i) for i in [0, n) on all cores.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body)
{
    std::atomic<std::size_t> next{0};
    const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), static_cast<unsigned>(n)));
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++)
                body(i);
        });
    for (auto& t : pool)
        t.join();
}

ProtectConfig config(Strategy s, std::uint64_t seed, bool protect = true)
{
    ProtectConfig c;
    c.strategy = s;
    c.plan.randomize = protect;
    c.plan.use_switchboxes = protect;
    c.plan.seed = seed;
    return c;
}

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// 1: every strategy and seed restores the design under the true key.
Outcome round_trip()
{
    const auto t0 = Clock::now();
    struct Job {
        std::string bench;
        Strategy strategy;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (const auto& b : kAll)
        for (const Strategy s : {Strategy::Random, Strategy::MaxCut, Strategy::TimingAware})
            for (std::uint64_t seed = 1; seed <= 3; ++seed)
                jobs.push_back({b, s, seed});
    std::map<std::string, Netlist> nets;
    for (const auto& b : kAll)
        nets.emplace(b, load_corpus(b));
    std::vector<double> hd(jobs.size(), -1.0);
    parallel_for(jobs.size(), [&](std::size_t i) {
        const Netlist& n = nets.at(jobs[i].bench);
        const RdlPlan plan = protect_design(n, config(jobs[i].strategy, jobs[i].seed));
        hd[i] = hamming_distance(n, apply_key(public_view(plan, ViewMode::Conservative), plan.key), 10'000, jobs[i].seed);
    });
    const double elapsed = seconds_since(t0);
    const double worst = *std::max_element(hd.begin(), hd.end());
    return {worst == 0.0 && elapsed < 60.0,
            fmt("%zu designs, max HD %.4f%%, %.1fs (limit 60s)", jobs.size(), worst, elapsed)};
}

// 2: without randomization or switchboxes the nearest port is the true one.
Outcome unprotected_attack()
{
    std::string detail;
    bool ok = true;
    for (const auto& b : kAll) {
        const Netlist n = load_corpus(b);
        const PublicView v = public_view(protect_design(n, config(Strategy::TimingAware, 1, false)), ViewMode::Full);
        ProximityOptions o;
        o.mode = ViewMode::Full;
        const AttackResult r = run_proximity_attack(v, n, o, 10'000);
        ok &= r.ccr == 100.0 && r.hd == 0.0;
        detail += fmt("%s CCR %.1f HD %.2f; ", b.c_str(), r.ccr, r.hd);
    }
    return {ok, detail};
}

struct Campaign {
    std::vector<double> ccr, hd;
    std::vector<std::array<int, 5>> box_correct;
};

Campaign conservative_campaign(const Netlist& n, int seeds)
{
    Campaign c;
    c.ccr.resize(static_cast<std::size_t>(seeds));
    c.hd.resize(static_cast<std::size_t>(seeds));
    c.box_correct.resize(static_cast<std::size_t>(seeds));
    parallel_for(static_cast<std::size_t>(seeds), [&](std::size_t i) {
        const std::uint64_t seed = i + 1;
        const PublicView v = public_view(protect_design(n, config(Strategy::TimingAware, seed)), ViewMode::Conservative);
        ProximityOptions o;
        o.seed = seed;
        const AttackResult r = run_proximity_attack(v, n, o, 10'000);
        c.ccr[i] = r.ccr;
        c.hd[i] = r.hd;
        c.box_correct[i] = r.box_correct;
    });
    return c;
}

double mean(const std::vector<double>& xs) { return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size()); }

// 3: conservative proximity attack lands in the reported CCR and HD bands.
Outcome conservative_attack()
{
    const auto t0 = Clock::now();
    std::string detail;
    bool ok = true;
    double ccr_sum = 0, hd_sum = 0;
    for (const auto& b : kLarge) {
        const Campaign c = conservative_campaign(load_corpus(b), 10);
        const double ccr = mean(c.ccr), hd = mean(c.hd);
        const bool in_band = ccr >= 15.0 && ccr <= 35.0 && hd >= 25.0 && hd <= 55.0;
        ok &= in_band;
        ccr_sum += ccr;
        hd_sum += hd;
        detail += fmt("%s CCR %.1f HD %.1f%s; ", b.c_str(), ccr, hd, in_band ? "" : " (out of band)");
    }
    const double elapsed = seconds_since(t0);
    ok &= elapsed < 600.0;
    detail += fmt("all four CCR %.1f HD %.1f; %.1fs (limit 600s)", ccr_sum / 4, hd_sum / 4, elapsed);
    return {ok, detail};
}

// 4: a uniform guess inside a 4-box recovers a quarter of it.
Outcome uniform_guessing()
{
    // Exhaustive: mean fixed points over all 24 orders of four.
    std::array<int, 4> perm{0, 1, 2, 3};
    int fixed_total = 0, orders = 0;
    do {
        for (int i = 0; i < 4; ++i)
            fixed_total += perm[static_cast<std::size_t>(i)] == i;
        ++orders;
    } while (std::next_permutation(perm.begin(), perm.end()));
    const double exact = 100.0 * fixed_total / (4.0 * orders);

    // Sampled: one uniform guess per real 4-box.
    Rng rng(4);
    std::size_t boxes = 0;
    double sum = 0;
    bool exhaustive_ok = orders == 24;
    for (std::uint64_t seed = 1; boxes < 1000; ++seed)
        for (const auto& b : kLarge) {
            const Netlist n = load_corpus(b);
            const RdlPlan plan = protect_design(n, config(Strategy::Random, seed));
            const PublicView v = public_view(plan, ViewMode::Conservative);
            for (const auto& box : v.boxes) {
                if (box.sinks.size() != 4)
                    continue;
                std::array<int, 4> order{0, 1, 2, 3};
                double box_mean = 0;
                do {
                    int hit = 0;
                    for (std::size_t i = 0; i < 4; ++i)
                        hit += plan.key.driver_of_sink[static_cast<std::size_t>(box.sinks[i])]
                               == box.drivers[static_cast<std::size_t>(order[i])];
                    box_mean += 25.0 * hit;
                } while (std::next_permutation(order.begin(), order.end()));
                exhaustive_ok &= box_mean / 24.0 == 25.0;

                rng.shuffle(std::span<int>(order));
                int hit = 0;
                for (std::size_t i = 0; i < 4; ++i)
                    hit += plan.key.driver_of_sink[static_cast<std::size_t>(box.sinks[i])]
                           == box.drivers[static_cast<std::size_t>(order[i])];
                sum += 25.0 * hit;
                ++boxes;
            }
        }
    const double sampled = sum / static_cast<double>(boxes);
    return {exhaustive_ok && exact == 25.0 && std::abs(sampled - 25.0) <= 2.0,
            fmt("%zu boxes, sampled CCR %.2f, exhaustive per-box mean %.2f", boxes, sampled, exact)};
}

// 5: SAT attack recovers c432 and gives up cleanly on b17.
Outcome sat_attack()
{
    const Netlist c432 = load_corpus("c432");
    const PublicView v = public_view(protect_design(c432, config(Strategy::TimingAware, 1)), ViewMode::Conservative);
    const SatAttackResult r = run_sat_attack(encode_keyed_circuit(v), c432, {.timeout_seconds = 600.0});
    const bool found = r.stats.outcome == SatOutcome::KeyFound && r.key
                       && hamming_distance(c432, apply_key(v, *r.key), 10'000, 1) == 0.0;

    const auto t0 = Clock::now();
    bool clean = false;
    std::string b17;
    try {
        const Netlist big = load_corpus("b17");
        const PublicView bv = public_view(protect_design(big, config(Strategy::TimingAware, 1)), ViewMode::Conservative);
        const SatAttackResult br = run_sat_attack(encode_keyed_circuit(bv), big, {.timeout_seconds = 60.0});
        clean = br.stats.outcome == SatOutcome::Timeout && !br.key;
        b17 = fmt("b17 %s after %zu DIPs, %.1fs total", std::string(to_string(br.stats.outcome)).c_str(),
                  br.stats.dips, seconds_since(t0));
    } catch (const std::exception& e) {
        b17 = std::string("b17 raised: ") + e.what();
    }
    return {found && clean, fmt("c432 %s, %zu DIPs, %.2fs; ", std::string(to_string(r.stats.outcome)).c_str(),
                                r.stats.dips, r.stats.seconds)
                                + b17};
}

// 6: timing-aware partitioning cuts far fewer nets than random.
Outcome cut_ratio()
{
    double random = 0, timing = 0;
    std::string detail;
    for (const auto& b : kLarge) {
        const Netlist n = load_corpus(b);
        const TimingInfo t = compute_timing(n);
        double r = 0, a = 0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            r += static_cast<double>(cut_size(n, partition_random(n, 0.5, seed)).size());
            a += static_cast<double>(cut_size(n, partition_timing_aware(n, t)).size());
        }
        r /= 10;
        a /= 10;
        random += r;
        timing += a;
        detail += fmt("%s %.1f/%.0f; ", b.c_str(), r, a);
    }
    const double ratio = random / timing;
    return {ratio >= 2.0, detail + fmt("ratio of means %.2f", ratio)};
}

std::uint64_t factorial(std::size_t n)
{
    std::uint64_t f = 1;
    for (std::size_t i = 2; i <= n; ++i)
        f *= i;
    return f;
}

// 7: solution-space closed form.
Outcome solution_space_check()
{
    bool exact = true;
    for (std::size_t b = 0; b <= 12; ++b)
        for (std::size_t t = 0; t <= 12; ++t) {
            const long double want = std::log10(static_cast<long double>(factorial(b)) * static_cast<long double>(factorial(t)));
            exact &= std::abs(solution_space(b, t, false).log10_count - static_cast<double>(want)) < 1e-12;
        }
    const double s84 = solution_space(8, 4, true).log10_count;
    const bool example = std::round(s84 * 1e6) == std::round(std::log10(48.0) * 1e6);
    bool monotone = true;
    for (std::size_t b = 0; b <= 100; ++b)
        for (std::size_t t = 0; t <= 100; t += 5)
            monotone &= solution_space(b + 1, t, false).log10_count >= solution_space(b, t, false).log10_count
                        && solution_space(t, b + 1, false).log10_count >= solution_space(t, b, false).log10_count;
    for (std::size_t b = 0; b <= 100; b += 4)
        for (std::size_t t = 0; t <= 100; t += 4)
            monotone &= solution_space(b + 4, t, true).log10_count >= solution_space(b, t, true).log10_count
                        && solution_space(t, b + 4, true).log10_count >= solution_space(t, b, true).log10_count;
    return {exact && example && monotone,
            fmt("exact %s, (8,4,switchboxes) %.6f vs log10(48) %.6f, monotone %s", exact ? "yes" : "no", s84,
                std::log10(48.0), monotone ? "yes" : "no")};
}

// 8: lifting fraction.
Outcome lifting()
{
    const double f = lifting_fraction(12.0);
    return {std::abs(f - 0.076923) <= 1e-6, fmt("lifting_fraction(12) = %.9f", f)};
}

// 9: randomization displaces ports; unprotected plans keep them aligned.
Outcome displacement()
{
    const Netlist n = load_corpus("c432");
    std::size_t nonzero = 0, total = 0, unprotected_nonzero = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        for (const double d : distance_histogram(protect_design(n, config(Strategy::TimingAware, seed)))) {
            nonzero += d > 0.0;
            ++total;
        }
        for (const double d : distance_histogram(protect_design(n, config(Strategy::TimingAware, seed, false))))
            unprotected_nonzero += d > 0.0;
    }
    const double share = 100.0 * static_cast<double>(nonzero) / static_cast<double>(total);
    return {share >= 80.0 && unprotected_nonzero == 0,
            fmt("randomized %.1f%% nonzero over %zu ports, unprotected %zu nonzero", share, total, unprotected_nonzero)};
}

// 10: a one-to-one guess inside a 4-box never gets exactly three right.
Outcome no_three_of_four()
{
    std::array<int, 4> perm{0, 1, 2, 3};
    int three = 0;
    do {
        int fixed = 0;
        for (int i = 0; i < 4; ++i)
            fixed += perm[static_cast<std::size_t>(i)] == i;
        three += fixed == 3;
    } while (std::next_permutation(perm.begin(), perm.end()));

    std::array<long, 5> hist{};
    for (const auto& b : kLarge) {
        const Campaign c = conservative_campaign(load_corpus(b), 5);
        for (const auto& bc : c.box_correct)
            for (std::size_t k = 0; k < 5; ++k)
                hist[k] += bc[k];
    }
    return {three == 0 && hist[3] == 0, fmt("permutations with 3 fixed points: %d; attacked boxes by correct count "
                                            "0:%ld 1:%ld 2:%ld 3:%ld 4:%ld",
                                            three, hist[0], hist[1], hist[2], hist[3], hist[4])};
}

} // namespace

int main(int argc, char** argv)
{
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: %s [--only N]\n", argv[0]);
            return 1;
        }
    }
    const std::array<Outcome (*)(), 10> criteria = {round_trip,     unprotected_attack,    conservative_attack, uniform_guessing,
                                                    sat_attack,     cut_ratio,             solution_space_check, lifting,
                                                    displacement,   no_three_of_four};
    if (only < 0 || only > static_cast<int>(criteria.size())) {
        std::fprintf(stderr, "criterion must be 1..%zu\n", criteria.size());
        return 1;
    }
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (only != 0 && static_cast<int>(i) + 1 != only)
            continue;
        Outcome o{false, ""};
        try {
            o = criteria[i]();
        } catch (const std::exception& e) {
            o.detail = std::string("error: ") + e.what();
        }
        std::printf("criterion %zu: %s %s\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
