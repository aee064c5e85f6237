#include "fixtures.hpp"

#include "f2fsec/error.hpp"
#include "f2fsec/metrics.hpp"
#include "f2fsec/rdl_plan.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace f2fsec;
using namespace fixtures;

namespace {

ProtectConfig config(Strategy s, std::uint64_t seed, bool randomize = true, bool boxes = true)
{
    ProtectConfig c;
    c.strategy = s;
    c.plan = options(randomize, boxes, seed);
    return c;
}

std::size_t ceil4(std::size_t n) { return (n + 3) / 4; }

} // namespace

TEST_CASE("unprotected plans keep ports aligned and boxes away")
{
    const Netlist n = load_corpus("c432");
    const RdlPlan plan = protect_design(n, config(Strategy::TimingAware, 3, false, false));
    CHECK(plan.boxes.empty());
    CHECK(plan.ports.size() == plan.cut.size());
    for (const auto& p : plan.ports) {
        CHECK(p.displacement == 0.0);
        CHECK(p.bottom == p.top);
    }
    for (const double d : distance_histogram(plan))
        CHECK(d == 0.0);
}

TEST_CASE("crossings group into boxes of four")
{
    SUBCASE("8 crossings give two full boxes")
    {
        const Netlist n = parse_bench(wires_bench(8));
        const RdlPlan plan = manual_plan(n, wires_tiers(8), options(true, true));
        REQUIRE(plan.boxes.size() == 2);
        for (const auto& b : plan.boxes)
            CHECK(b.size() == 4);
    }
    SUBCASE("7 crossings give a 4-box and a 3-box")
    {
        const Netlist n = parse_bench(wires_bench(7));
        const RdlPlan plan = manual_plan(n, wires_tiers(7), options(true, true));
        std::multiset<std::size_t> sizes;
        for (const auto& b : plan.boxes)
            sizes.insert(b.size());
        CHECK(sizes == std::multiset<std::size_t>{3, 4});
    }
}

TEST_CASE("box count and box permutations")
{
    for (const char* name : {"c17", "c432", "c880"}) {
        const Netlist n = load_corpus(name);
        for (const Strategy s : {Strategy::Random, Strategy::MaxCut, Strategy::TimingAware}) {
            const RdlPlan plan = protect_design(n, config(s, 2));
            CHECK(plan.boxes.size()
                  == ceil4(plan.cut.count(Direction::BottomToTop)) + ceil4(plan.cut.count(Direction::TopToBottom)));
            CHECK(plan.box_count(Direction::BottomToTop) == ceil4(plan.cut.count(Direction::BottomToTop)));
            std::set<int> drivers, sinks;
            for (const auto& b : plan.boxes) {
                std::vector<int> perm = b.perm;
                std::sort(perm.begin(), perm.end());
                for (std::size_t i = 0; i < perm.size(); ++i)
                    CHECK(perm[i] == static_cast<int>(i));
                for (std::size_t i = 0; i < b.size(); ++i) {
                    drivers.insert(b.driver_slots[i]);
                    sinks.insert(b.sink_slots[i]);
                    const int sink = b.sink_slots[static_cast<std::size_t>(b.perm[i])];
                    CHECK(plan.key.driver_of_sink[static_cast<std::size_t>(sink)] == b.driver_slots[i]);
                }
            }
            CHECK(drivers.size() == plan.ports.size());
            CHECK(sinks.size() == plan.ports.size());
        }
    }
}

TEST_CASE("plans are bit-identical per seed")
{
    const Netlist n = load_corpus("c880");
    for (const Strategy s : {Strategy::Random, Strategy::MaxCut, Strategy::TimingAware}) {
        const auto a = plan_json(protect_design(n, config(s, 7))).dump();
        const auto b = plan_json(protect_design(n, config(s, 7))).dump();
        CHECK(a == b);
        const auto va = view_json(public_view(protect_design(n, config(s, 7)), ViewMode::Conservative)).dump();
        const auto vb = view_json(public_view(protect_design(n, config(s, 7)), ViewMode::Conservative)).dump();
        CHECK(va == vb);
    }
    CHECK(plan_json(protect_design(n, config(Strategy::Random, 7))).dump()
          != plan_json(protect_design(n, config(Strategy::Random, 8))).dump());
}

TEST_CASE("randomized displacement histogram")
{
    const Netlist n = load_corpus("c432");
    std::size_t nonzero = 0, total = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const RdlPlan plan = protect_design(n, config(Strategy::TimingAware, seed));
        for (const double d : distance_histogram(plan)) {
            CHECK(d >= 0.0);
            CHECK(d <= 1.0);
            nonzero += d > 0.0;
            ++total;
        }
        const std::string csv = histogram_csv(plan);
        CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == plan.ports.size() + 1);
    }
    CHECK(static_cast<double>(nonzero) >= 0.8 * static_cast<double>(total));
}

TEST_CASE("public view carries no key material")
{
    const Netlist n = load_corpus("c432");
    const RdlPlan plan = protect_design(n, config(Strategy::TimingAware, 5));
    for (const ViewMode mode : {ViewMode::Conservative, ViewMode::Full}) {
        const auto j = view_json(public_view(plan, mode));
        const std::string text = j.dump();
        CHECK(text.find("\"perm\"") == std::string::npos);
        CHECK(text.find("\"key\"") == std::string::npos);
        CHECK(text.find("\"seed\"") == std::string::npos);
        CHECK(text.find("driver_of_sink") == std::string::npos);
        CHECK_NOTHROW(validate_view_json(j));
        CHECK(view_json(view_from_json(j)).dump() == text);

        auto with_perm = j;
        with_perm["boxes"][0]["perm"] = {0, 1, 2, 3};
        CHECK_THROWS_AS(validate_view_json(with_perm), SchemaError);
        auto with_key = j;
        with_key["key"] = nlohmann::ordered_json::array();
        CHECK_THROWS_AS(view_from_json(with_key), SchemaError);
        auto missing = j;
        missing.erase("gates");
        CHECK_THROWS_AS(view_from_json(missing), SchemaError);
    }
    CHECK_THROWS_AS(view_from_json(plan_json(plan)), SchemaError);
}

TEST_CASE("conservative and full views")
{
    const Netlist n = load_corpus("c432");
    const RdlPlan plan = protect_design(n, config(Strategy::TimingAware, 5));
    const PublicView cons = public_view(plan, ViewMode::Conservative);
    const PublicView full = public_view(plan, ViewMode::Full);
    CHECK(cons.boxes.size() == plan.boxes.size());
    CHECK(full.boxes.size() == plan.boxes.size());
    for (const auto& b : full.boxes) {
        CHECK(b.drivers.empty());
        CHECK(b.sinks.empty());
    }
    const auto sink_box = cons.sink_box();
    for (const auto& s : cons.sinks)
        CHECK(sink_box[static_cast<std::size_t>(s.id)].has_value());
    CHECK(cons.sinks.size() == plan.ports.size());
    CHECK(cons.drivers.size() == plan.ports.size());
}

TEST_CASE("applying the true key restores the design")
{
    for (const char* name : {"c17", "c432"}) {
        const Netlist n = load_corpus(name);
        for (const Strategy s : {Strategy::Random, Strategy::MaxCut, Strategy::TimingAware})
            for (std::uint64_t seed = 1; seed <= 3; ++seed) {
                const RdlPlan plan = protect_design(n, config(s, seed));
                for (const ViewMode mode : {ViewMode::Conservative, ViewMode::Full}) {
                    const PublicView v = public_view(plan, mode);
                    CHECK(derive_true_key(v, n) == plan.key);
                    CHECK(hamming_distance(n, apply_key(v, plan.key), 10'000, seed) == 0.0);
                }
            }
    }
}

TEST_CASE("swapping two sinks in a box changes some output")
{
    const Netlist n = load_corpus("c432");
    const RdlPlan plan = protect_design(n, config(Strategy::TimingAware, 1));
    const PublicView v = public_view(plan, ViewMode::Conservative);
    bool some_differ = false;
    for (const auto& b : v.boxes) {
        if (b.sinks.size() < 2)
            continue;
        ConnectionKey k = plan.key;
        std::swap(k.driver_of_sink[static_cast<std::size_t>(b.sinks[0])],
                  k.driver_of_sink[static_cast<std::size_t>(b.sinks[1])]);
        try {
            some_differ |= hamming_distance(n, apply_key(v, k), 10'000, 3) > 0.0;
        } catch (const KeyError&) {
            // the swap closed a loop
        }
    }
    CHECK(some_differ);
}

TEST_CASE("bad keys are rejected")
{
    // b1 -> t1 -> b2 -> t2: letting t1 read b2 closes a loop.
    const Netlist n = parse_bench("INPUT(a)\nOUTPUT(t2)\nb1 = NOT(a)\nt1 = NOT(b1)\nb2 = NOT(t1)\nt2 = NOT(b2)\n");
    const RdlPlan plan = manual_plan(n, {Tier::Bottom, Tier::Top, Tier::Bottom, Tier::Top}, options(false, false));
    const PublicView v = public_view(plan, ViewMode::Full);
    CHECK(hamming_distance(n, apply_key(v, plan.key), 256, 1) == 0.0);

    const int s_t1 = sink_read_by(v, "t1"), s_t2 = sink_read_by(v, "t2");
    const int d_b1 = driver_on(v, "b1"), d_b2 = driver_on(v, "b2");
    REQUIRE(s_t1 >= 0);
    REQUIRE(s_t2 >= 0);
    ConnectionKey cyclic = plan.key;
    cyclic.driver_of_sink[static_cast<std::size_t>(s_t1)] = d_b2;
    cyclic.driver_of_sink[static_cast<std::size_t>(s_t2)] = d_b1;
    CHECK_THROWS_AS(apply_key(v, cyclic), KeyError);

    ConnectionKey short_key = plan.key;
    short_key.driver_of_sink.pop_back();
    CHECK_THROWS_AS(apply_key(v, short_key), KeyError);

    ConnectionKey twice = plan.key;
    twice.driver_of_sink[static_cast<std::size_t>(s_t2)] = twice.driver_of_sink[static_cast<std::size_t>(s_t1)];
    CHECK_THROWS_AS(apply_key(v, twice), KeyError);

    const int s_b2 = sink_read_by(v, "b2");
    ConnectionKey wrong_direction = plan.key;
    wrong_direction.driver_of_sink[static_cast<std::size_t>(s_b2)] = d_b1;
    CHECK_THROWS_AS(apply_key(v, wrong_direction, false), KeyError);
}

TEST_CASE("in-box violations are rejected in conservative views")
{
    const Netlist n = parse_bench(wires_bench(8));
    const RdlPlan plan = manual_plan(n, wires_tiers(8), options(true, true));
    const PublicView v = public_view(plan, ViewMode::Conservative);
    REQUIRE(v.boxes.size() == 2);
    ConnectionKey k = plan.key;
    std::swap(k.driver_of_sink[static_cast<std::size_t>(v.boxes[0].sinks[0])],
              k.driver_of_sink[static_cast<std::size_t>(v.boxes[1].sinks[0])]);
    CHECK_THROWS_AS(apply_key(v, k), KeyError);
    CHECK_NOTHROW(apply_key(public_view(plan, ViewMode::Full), k));
}

TEST_CASE("configuration JSON names every knob")
{
    const std::string j = to_json(config(Strategy::MaxCut, 4)).dump();
    for (const char* key : {"strategy", "fraction", "balance_eps", "randomize", "switchboxes", "seed"})
        CHECK(j.find(key) != std::string::npos);
}
