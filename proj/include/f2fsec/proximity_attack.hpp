#pragma once

#include "f2fsec/public_view.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace f2fsec {

struct Candidate {
    int driver;
    double score; // Euclidean distance between sink and driver stubs, plus hooks
};

// Per sink stub, the drivers an attacker still considers, best first.
struct CandidateGraph {
    ViewMode mode = ViewMode::Conservative;
    std::vector<std::vector<Candidate>> per_sink;
    // Pre-resolved (sink, driver) pairs, e.g. from recognized IP.
    std::vector<std::pair<int, int>> fixed;
};

// Optional extra term added to the distance of a (sink, driver) pair; models
// orientation or routing hints. Unset means distance-only scoring.
using ScoreHook = std::function<double(const SinkStub&, const DriverStub&)>;

// Candidates respect direction; in conservative mode a boxed sink only sees
// its box's drivers. Primary I/Os never appear since they are not stubs.
CandidateGraph enumerate_candidates(const PublicView& view, ViewMode mode, const ScoreHook& hook = {});

// Drops every candidate edge that would close a combinational loop through the
// merged tiers, given the graph's fixed pairs.
CandidateGraph exclude_loops(CandidateGraph graph, const PublicView& view);

// Sink stubs on combinational loops closed by a complete key, one list per
// loop found, each in data-flow order. Empty when the key is loop-free.
std::vector<std::vector<int>> key_loops(const PublicView& view, const ConnectionKey& key, std::size_t max_loops = 32);

// Which driver stubs each sink stub reaches through intra-tier logic and
// committed stub connections. A candidate (s, d) closes a loop iff d is
// reachable from s.
class StubReachability {
public:
    explicit StubReachability(const PublicView& view);

    bool reaches(int sink, int driver) const;
    // Records sink <- driver and updates the closure.
    void commit(int sink, int driver);

private:
    std::size_t words_;
    std::vector<std::vector<std::uint64_t>> reach_; // per sink, bitset over drivers
};

struct ProximityOptions {
    ViewMode mode = ViewMode::Conservative;
    std::uint64_t seed = 1;
    int max_retries = 16;
    std::vector<std::pair<int, int>> known_pairs;
    ScoreHook hook;
};

struct AttackResult {
    ConnectionKey key;
    double ccr = 0.0;     // percent
    double hd = 0.0;      // percent
    double runtime = 0.0; // seconds
    std::uint64_t seed = 0;
    ViewMode mode = ViewMode::Conservative;
    int attempts = 0;
    bool repaired = false; // greedy failed and the solver completed the key
    // For full 4-boxes: how many boxes had 0..4 connections recovered.
    std::array<int, 5> box_correct{};
};

// Greedy global matching: commits the closest legal (sink, driver) pair,
// one driver per sink, re-checking loops after each commit. Ties are broken
// by a seeded draw. Restarts with a fresh tie-break stream when a sink runs out
// of legal drivers. After max_retries failed restarts a solver completes the
// assignment, keeping the last greedy choices where it can and ordering the
// sinks so that no loop closes; AttackError when that also fails.
ConnectionKey run_proximity_matching(const PublicView& view, const ProximityOptions& options, int* attempts = nullptr,
                                     bool* repaired = nullptr);

// Runs the matching and scores it against the oracle (the working copy):
// CCR against the pairing read off the oracle, HD over n_patterns.
AttackResult run_proximity_attack(const PublicView& view, const Netlist& oracle, const ProximityOptions& options,
                                  std::size_t n_patterns);

// Fills result.box_correct from the view's box membership (conservative only).
void tally_boxes(const PublicView& view, const ConnectionKey& truth, AttackResult& result);

} // namespace f2fsec
