#include "f2fsec/proximity_attack.hpp"

#include "f2fsec/error.hpp"
#include "f2fsec/metrics.hpp"
#include "f2fsec/rng.hpp"
#include "f2fsec/sat_solver.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <optional>
#include <unordered_map>

namespace f2fsec {

StubReachability::StubReachability(const PublicView& view)
    : words_((view.drivers.size() + 63) / 64), reach_(view.sinks.size(), std::vector<std::uint64_t>(words_, 0))
{
    std::unordered_map<std::string, std::vector<std::size_t>> readers;
    for (std::size_t g = 0; g < view.gates.size(); ++g)
        for (const auto& in : view.gates[g].inputs)
            readers[in].push_back(g);
    std::unordered_map<std::string, int> driver_of;
    for (const auto& d : view.drivers)
        driver_of.emplace(d.net, d.id);

    std::vector<std::uint32_t> stamp(view.gates.size(), 0);
    std::uint32_t epoch = 0;
    std::deque<std::size_t> queue;
    for (const auto& s : view.sinks) {
        ++epoch;
        auto& bits = reach_[static_cast<std::size_t>(s.id)];
        auto seed_from = [&](const std::string& net) {
            auto it = readers.find(net);
            if (it == readers.end())
                return;
            for (std::size_t g : it->second)
                if (stamp[g] != epoch) {
                    stamp[g] = epoch;
                    queue.push_back(g);
                }
        };
        seed_from(s.net);
        while (!queue.empty()) {
            const std::size_t g = queue.front();
            queue.pop_front();
            const auto& name = view.gates[g].name;
            if (auto d = driver_of.find(name); d != driver_of.end())
                bits[static_cast<std::size_t>(d->second) / 64] |= std::uint64_t{1} << (d->second % 64);
            seed_from(name);
        }
    }
}

bool StubReachability::reaches(int sink, int driver) const
{
    return (reach_[static_cast<std::size_t>(sink)][static_cast<std::size_t>(driver) / 64] >> (driver % 64)) & 1;
}

void StubReachability::commit(int sink, int driver)
{
    const auto source = reach_[static_cast<std::size_t>(sink)];
    for (auto& bits : reach_) {
        if (!((bits[static_cast<std::size_t>(driver) / 64] >> (driver % 64)) & 1))
            continue;
        for (std::size_t w = 0; w < words_; ++w)
            bits[w] |= source[w];
    }
}

CandidateGraph enumerate_candidates(const PublicView& view, ViewMode mode, const ScoreHook& hook)
{
    if (mode == ViewMode::Conservative && view.mode != ViewMode::Conservative)
        throw InvalidArgument("conservative candidates need a view exposing switchbox membership");
    CandidateGraph graph{mode, std::vector<std::vector<Candidate>>(view.sinks.size()), {}};
    const auto sink_box = view.sink_box();
    const auto driver_box = view.driver_box();

    for (const auto& sink : view.sinks) {
        auto& list = graph.per_sink[static_cast<std::size_t>(sink.id)];
        auto consider = [&](const DriverStub& d) {
            double score = distance(sink.at, d.at);
            if (hook)
                score += hook(sink, d);
            list.push_back(Candidate{d.id, score});
        };
        const auto box = sink_box[static_cast<std::size_t>(sink.id)];
        if (mode == ViewMode::Conservative && box) {
            for (int d : view.boxes[static_cast<std::size_t>(*box)].drivers)
                consider(view.drivers[static_cast<std::size_t>(d)]);
        } else {
            for (const auto& d : view.drivers)
                if (d.direction == sink.direction
                    && (mode == ViewMode::Full || !driver_box[static_cast<std::size_t>(d.id)]))
                    consider(d);
        }
        std::sort(list.begin(), list.end(), [](const Candidate& a, const Candidate& b) {
            return a.score != b.score ? a.score < b.score : a.driver < b.driver;
        });
    }
    return graph;
}

CandidateGraph exclude_loops(CandidateGraph graph, const PublicView& view)
{
    StubReachability reach(view);
    for (const auto& [s, d] : graph.fixed)
        reach.commit(s, d);
    for (std::size_t s = 0; s < graph.per_sink.size(); ++s) {
        auto& list = graph.per_sink[s];
        std::erase_if(list, [&](const Candidate& c) { return reach.reaches(static_cast<int>(s), c.driver); });
    }
    return graph;
}

std::vector<std::vector<int>> key_loops(const PublicView& view, const ConnectionKey& key, std::size_t max_loops)
{
    const std::size_t m = view.sinks.size();
    const StubReachability reach(view);
    std::vector<int> sink_of(view.drivers.size(), -1);
    for (std::size_t s = 0; s < m; ++s)
        if (const int d = key.driver_of_sink[s]; d >= 0)
            sink_of[static_cast<std::size_t>(d)] = static_cast<int>(s);
    // Edge s -> t when t reads a driver that depends on s.
    auto successors = [&](int s) {
        std::vector<int> out;
        for (std::size_t d = 0; d < sink_of.size(); ++d)
            if (sink_of[d] >= 0 && reach.reaches(s, static_cast<int>(d)))
                out.push_back(sink_of[d]);
        return out;
    };

    std::vector<std::vector<int>> loops;
    std::vector<std::uint8_t> state(m, 0); // 0 new, 1 on stack, 2 done
    struct Frame {
        int sink;
        std::vector<int> next;
        std::size_t i = 0;
    };
    for (std::size_t root = 0; root < m && loops.size() < max_loops; ++root) {
        if (state[root])
            continue;
        std::vector<Frame> stack;
        stack.push_back(Frame{static_cast<int>(root), successors(static_cast<int>(root))});
        state[root] = 1;
        while (!stack.empty() && loops.size() < max_loops) {
            auto& top = stack.back();
            if (top.i == top.next.size()) {
                state[static_cast<std::size_t>(top.sink)] = 2;
                stack.pop_back();
                continue;
            }
            const int t = top.next[top.i++];
            if (state[static_cast<std::size_t>(t)] == 1) {
                std::vector<int> loop;
                auto it = stack.end();
                do {
                    --it;
                    loop.push_back(it->sink);
                } while (it->sink != t);
                std::reverse(loop.begin(), loop.end());
                loops.push_back(std::move(loop));
            } else if (state[static_cast<std::size_t>(t)] == 0) {
                state[static_cast<std::size_t>(t)] = 1;
                stack.push_back(Frame{t, successors(t)});
            }
        }
    }
    return loops;
}

namespace {

void at_most_one(sat::Solver& solver, const std::vector<sat::Lit>& lits)
{
    if (lits.size() <= 6) {
        for (std::size_t i = 0; i < lits.size(); ++i)
            for (std::size_t j = i + 1; j < lits.size(); ++j)
                solver.add_clause({~lits[i], ~lits[j]});
        return;
    }
    // Sequential counter: s_i means "one of lits[0..i] is true".
    sat::Lit prev = sat::Lit::make(solver.new_var());
    solver.add_clause({~lits[0], prev});
    for (std::size_t i = 1; i < lits.size(); ++i) {
        solver.add_clause({~lits[i], ~prev});
        if (i + 1 == lits.size())
            break;
        const sat::Lit next = sat::Lit::make(solver.new_var());
        solver.add_clause({~lits[i], next});
        solver.add_clause({~prev, next});
        prev = next;
    }
}

// Exactly one driver per sink and at most one sink per driver over the
// candidate lists, with the preferred (greedy) choices tried first. Sink s
// precedes sink t whenever t's driver depends on s; unary ranks below `levels`
// keep that order acyclic.
std::optional<ConnectionKey> solve_ranked(const PublicView& view, const CandidateGraph& graph,
                                          const ConnectionKey& preferred, int levels)
{
    const std::size_t m = view.sinks.size();
    const StubReachability base(view);
    StubReachability reach(view);
    std::vector<int> fixed(m, -1);
    for (const auto& [s, d] : graph.fixed) {
        fixed[static_cast<std::size_t>(s)] = d;
        reach.commit(s, d);
    }

    sat::Solver solver;
    std::vector<std::vector<std::pair<int, sat::Lit>>> options(m);
    std::vector<std::vector<sat::Lit>> by_driver(view.drivers.size());
    for (std::size_t s = 0; s < m; ++s) {
        auto& opts = options[s];
        if (fixed[s] >= 0) {
            opts.emplace_back(fixed[s], sat::Lit::make(solver.new_var()));
        } else {
            for (const auto& c : graph.per_sink[s])
                if (!reach.reaches(static_cast<int>(s), c.driver))
                    opts.emplace_back(c.driver, sat::Lit::make(solver.new_var()));
        }
        if (opts.empty())
            return std::nullopt;
        std::vector<sat::Lit> lits;
        for (const auto& [d, l] : opts) {
            lits.push_back(l);
            by_driver[static_cast<std::size_t>(d)].push_back(l);
            solver.set_phase(l.var(), d == preferred.driver_of_sink[s]);
        }
        solver.add_clause(lits);
        at_most_one(solver, lits);
    }
    for (const auto& lits : by_driver)
        at_most_one(solver, lits);

    // ge[s][k] means rank(s) > k, for k in [0, levels - 1).
    const auto top = static_cast<std::size_t>(levels - 1);
    std::vector<std::vector<sat::Lit>> ge(m);
    for (auto& g : ge) {
        for (std::size_t k = 0; k < top; ++k) {
            g.push_back(sat::Lit::make(solver.new_var()));
            solver.set_phase(g.back().var(), false);
            if (k > 0)
                solver.add_clause({~g[k], g[k - 1]});
        }
    }
    for (std::size_t t = 0; t < m; ++t) {
        for (std::size_t s = 0; s < m; ++s) {
            if (s == t)
                continue;
            std::vector<sat::Lit> causes;
            for (const auto& [d, l] : options[t])
                if (base.reaches(static_cast<int>(s), d))
                    causes.push_back(l);
            if (causes.empty())
                continue;
            const sat::Lit edge = sat::Lit::make(solver.new_var());
            for (const auto l : causes)
                solver.add_clause({~l, edge});
            if (top == 0)
                return std::nullopt;
            solver.add_clause({~edge, ge[t][0]});
            solver.add_clause({~edge, ~ge[s][top - 1]});
            for (std::size_t k = 0; k + 1 < top; ++k)
                solver.add_clause({~edge, ~ge[s][k], ge[t][k + 1]});
        }
    }

    if (solver.solve() != sat::Result::Sat)
        return std::nullopt;
    ConnectionKey key{std::vector<int>(m, -1)};
    for (std::size_t s = 0; s < m; ++s)
        for (const auto& [d, l] : options[s])
            if (solver.model_value(l))
                key.driver_of_sink[s] = d;
    if (!key_loops(view, key, 1).empty())
        throw AttackError("ranked completion produced a combinational loop");
    return key;
}

std::optional<ConnectionKey> complete_with_solver(const PublicView& view, const CandidateGraph& graph,
                                                  const ConnectionKey& preferred)
{
    const int most = static_cast<int>(view.sinks.size()) + 1;
    for (int levels = std::min(32, most);; levels = std::min(2 * levels, most)) {
        if (auto key = solve_ranked(view, graph, preferred, levels))
            return key;
        if (levels == most)
            return std::nullopt;
    }
}

} // namespace

ConnectionKey run_proximity_matching(const PublicView& view, const ProximityOptions& options, int* attempts,
                                     bool* repaired)
{
    CandidateGraph graph = enumerate_candidates(view, options.mode, options.hook);
    graph.fixed = options.known_pairs;
    const std::size_t m = view.sinks.size();

    struct Pair {
        double score;
        std::uint64_t tiebreak;
        int sink;
        int driver;
    };
    std::vector<std::uint8_t> stuck_before(m, 0);
    ConnectionKey last{std::vector<int>(m, -1)};

    for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
        if (attempts)
            *attempts = attempt + 1;
        Rng rng(mix_seed(options.seed, static_cast<std::uint64_t>(attempt)));
        StubReachability reach(view);
        ConnectionKey key{std::vector<int>(m, -1)};
        std::vector<std::uint8_t> used(view.drivers.size(), 0);
        for (const auto& [s, d] : graph.fixed) {
            if (s < 0 || static_cast<std::size_t>(s) >= m || d < 0 || static_cast<std::size_t>(d) >= used.size())
                throw InvalidArgument("known pair references an unknown stub");
            key.driver_of_sink[static_cast<std::size_t>(s)] = d;
            used[static_cast<std::size_t>(d)] = 1;
            reach.commit(s, d);
        }

        std::vector<Pair> pairs;
        for (std::size_t s = 0; s < m; ++s) {
            if (key.driver_of_sink[s] >= 0)
                continue;
            for (const auto& c : graph.per_sink[s])
                pairs.push_back(Pair{c.score, rng.next(), static_cast<int>(s), c.driver});
        }
        // Sinks that starved in an earlier attempt get first pick.
        std::sort(pairs.begin(), pairs.end(), [&](const Pair& a, const Pair& b) {
            const bool pa = stuck_before[static_cast<std::size_t>(a.sink)], pb = stuck_before[static_cast<std::size_t>(b.sink)];
            if (pa != pb)
                return pa;
            if (a.score != b.score)
                return a.score < b.score;
            return a.tiebreak < b.tiebreak;
        });

        for (const auto& p : pairs) {
            auto& slot = key.driver_of_sink[static_cast<std::size_t>(p.sink)];
            if (slot >= 0 || used[static_cast<std::size_t>(p.driver)] || reach.reaches(p.sink, p.driver))
                continue;
            slot = p.driver;
            used[static_cast<std::size_t>(p.driver)] = 1;
            reach.commit(p.sink, p.driver);
        }

        bool complete = true;
        for (std::size_t s = 0; s < m; ++s)
            if (key.driver_of_sink[s] < 0) {
                stuck_before[s] = 1;
                complete = false;
            }
        if (complete) {
            if (repaired)
                *repaired = false;
            return key;
        }
        last = std::move(key);
    }
    for (const auto& [s, d] : graph.fixed)
        if (s < 0 || static_cast<std::size_t>(s) >= m || d < 0 || static_cast<std::size_t>(d) >= view.drivers.size())
            throw InvalidArgument("known pair references an unknown stub");
    if (auto key = complete_with_solver(view, graph, last)) {
        if (repaired)
            *repaired = true;
        return *key;
    }
    throw AttackError("proximity matching found no loop-free assignment after "
                      + std::to_string(options.max_retries + 1) + " greedy attempts and solver completion");
}

void tally_boxes(const PublicView& view, const ConnectionKey& truth, AttackResult& result)
{
    result.box_correct.fill(0);
    for (const auto& b : view.boxes) {
        if (b.sinks.size() != static_cast<std::size_t>(kSwitchBoxSize))
            continue;
        int correct = 0;
        for (int s : b.sinks)
            correct += truth.driver_of_sink[static_cast<std::size_t>(s)]
                       == result.key.driver_of_sink[static_cast<std::size_t>(s)];
        ++result.box_correct[static_cast<std::size_t>(correct)];
    }
}

AttackResult run_proximity_attack(const PublicView& view, const Netlist& oracle, const ProximityOptions& options,
                                  std::size_t n_patterns)
{
    const auto start = std::chrono::steady_clock::now();
    AttackResult result;
    result.seed = options.seed;
    result.mode = options.mode;
    result.key = run_proximity_matching(view, options, &result.attempts, &result.repaired);
    const Netlist recovered = apply_key(view, result.key);
    result.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const ConnectionKey truth = derive_true_key(view, oracle);
    result.ccr = ccr(truth, result.key);
    result.hd = hamming_distance(oracle, recovered, n_patterns, mix_seed(options.seed, 0x4844));
    if (view.mode == ViewMode::Conservative)
        tally_boxes(view, truth, result);
    return result;
}

} // namespace f2fsec
