#include "f2fsec/f2fsec.h"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

namespace {

// Takes ownership of a string returned by the library.
std::string take(char* s)
{
    REQUIRE(s != nullptr);
    std::string out(s);
    f2f_string_free(s);
    return out;
}

f2f_netlist* load(const char* name)
{
    char* path = nullptr;
    REQUIRE(f2f_corpus_path(name, &path) == F2F_OK);
    f2f_netlist* n = nullptr;
    REQUIRE(f2f_netlist_load(path, &n) == F2F_OK);
    f2f_string_free(path);
    return n;
}

f2f_plan* protect(const f2f_netlist* n, const char* strategy, int randomize, int boxes, uint64_t seed)
{
    f2f_protect_config cfg;
    f2f_protect_config_init(&cfg);
    cfg.strategy = strategy;
    cfg.randomize = randomize;
    cfg.use_switchboxes = boxes;
    cfg.seed = seed;
    f2f_plan* p = nullptr;
    REQUIRE(f2f_protect(n, &cfg, &p) == F2F_OK);
    return p;
}

f2f_view* view_of(const f2f_plan* p, const char* mode)
{
    f2f_view* v = nullptr;
    REQUIRE(f2f_plan_view(p, mode, &v) == F2F_OK);
    return v;
}

} // namespace

TEST_CASE("netlist handles")
{
    f2f_netlist* n = load("c17");
    f2f_netlist_stats s{};
    REQUIRE(f2f_netlist_stats_get(n, &s) == F2F_OK);
    CHECK(s.inputs == 5);
    CHECK(s.outputs == 2);
    CHECK(s.gates == 6);
    CHECK(s.flops == 0);
    CHECK(s.depth == 3);

    char* text = nullptr;
    REQUIRE(f2f_netlist_bench(n, &text) == F2F_OK);
    f2f_netlist* again = nullptr;
    REQUIRE(f2f_netlist_parse(text, "again", &again) == F2F_OK);
    f2f_string_free(text);
    double hd = -1;
    REQUIRE(f2f_hamming_distance(n, again, 1000, 1, &hd) == F2F_OK);
    CHECK(hd == 0.0);

    char* timing = nullptr;
    REQUIRE(f2f_netlist_timing_json(n, &timing) == F2F_OK);
    CHECK(take(timing).find("N22") != std::string::npos);

    f2f_netlist_free(again);
    f2f_netlist_free(n);
    f2f_netlist_free(nullptr);
}

TEST_CASE("protect, export and view")
{
    f2f_netlist* n = load("c432");
    f2f_plan* p = protect(n, "timing", 1, 1, 3);

    f2f_plan_stats st{};
    REQUIRE(f2f_plan_stats_get(p, &st) == F2F_OK);
    CHECK(st.gates == 171);
    CHECK(st.cut_size == st.bottom_to_top + st.top_to_bottom);
    CHECK(st.boxes == (st.bottom_to_top + 3) / 4 + (st.top_to_bottom + 3) / 4);
    CHECK(static_cast<double>(st.nonzero_displacements) >= 0.8 * static_cast<double>(st.cut_size));

    for (const f2f_artifact a : {F2F_ARTIFACT_PARTITION, F2F_ARTIFACT_PLACEMENT, F2F_ARTIFACT_PLAN,
                                 F2F_ARTIFACT_HISTOGRAM_CSV, F2F_ARTIFACT_CONFIG}) {
        char* out = nullptr;
        REQUIRE(f2f_plan_export(p, a, &out) == F2F_OK);
        CHECK_FALSE(take(out).empty());
    }

    f2f_view* v = view_of(p, "conservative");
    char* json = nullptr;
    REQUIRE(f2f_view_json(v, &json) == F2F_OK);
    const std::string text = take(json);
    CHECK(text.find("\"perm\"") == std::string::npos);
    f2f_view* parsed = nullptr;
    REQUIRE(f2f_view_parse(text.c_str(), &parsed) == F2F_OK);
    char* json2 = nullptr;
    REQUIRE(f2f_view_json(parsed, &json2) == F2F_OK);
    CHECK(take(json2) == text);

    size_t drivers = 0, sinks = 0, boxes = 0;
    REQUIRE(f2f_view_counts(v, &drivers, &sinks, &boxes) == F2F_OK);
    CHECK(sinks == st.cut_size);
    CHECK(drivers == st.cut_size);
    CHECK(boxes == st.boxes);

    std::vector<int> key(sinks);
    REQUIRE(f2f_view_true_key(v, n, key.data(), key.size()) == F2F_OK);
    f2f_netlist* restored = nullptr;
    REQUIRE(f2f_view_apply_key(v, key.data(), key.size(), &restored) == F2F_OK);
    double hd = -1;
    REQUIRE(f2f_hamming_distance(n, restored, 10'000, 5, &hd) == F2F_OK);
    CHECK(hd == 0.0);

    CHECK(f2f_view_true_key(v, n, key.data(), key.size() - 1) == F2F_ERR_INVALID_ARGUMENT);
    std::swap(key[0], key[1]);
    f2f_netlist* broken = nullptr;
    const f2f_status swapped = f2f_view_apply_key(v, key.data(), key.size(), &broken);
    CHECK((swapped == F2F_OK || swapped == F2F_ERR_KEY));
    f2f_netlist_free(broken);

    f2f_netlist_free(restored);
    f2f_view_free(parsed);
    f2f_view_free(v);
    f2f_plan_free(p);
    f2f_netlist_free(n);
}

TEST_CASE("attacks")
{
    SUBCASE("proximity on an unprotected plan")
    {
        f2f_netlist* n = load("c432");
        f2f_plan* p = protect(n, "random", 0, 0, 1);
        f2f_view* v = view_of(p, "full");
        f2f_proximity_options o;
        f2f_proximity_options_init(&o);
        f2f_proximity_result r{};
        size_t drivers = 0, sinks = 0, boxes = 0;
        REQUIRE(f2f_view_counts(v, &drivers, &sinks, &boxes) == F2F_OK);
        std::vector<int> key(sinks), truth(sinks);
        REQUIRE(f2f_attack_proximity(v, n, &o, &r, key.data(), key.size()) == F2F_OK);
        REQUIRE(f2f_view_true_key(v, n, truth.data(), truth.size()) == F2F_OK);
        CHECK(r.ccr == 100.0);
        CHECK(r.hd == 0.0);
        CHECK(key == truth);
        f2f_view_free(v);
        f2f_plan_free(p);
        f2f_netlist_free(n);
    }
    SUBCASE("proximity on a protected plan")
    {
        f2f_netlist* n = load("c432");
        f2f_plan* p = protect(n, "timing", 1, 1, 2);
        f2f_view* v = view_of(p, "conservative");
        f2f_proximity_options o;
        f2f_proximity_options_init(&o);
        o.patterns = 2000;
        f2f_proximity_result r{};
        REQUIRE(f2f_attack_proximity(v, n, &o, &r, nullptr, 0) == F2F_OK);
        CHECK(r.box_correct[3] == 0);
        CHECK(r.ccr < 100.0);
        f2f_view_free(v);
        f2f_plan_free(p);
        f2f_netlist_free(n);
    }
    SUBCASE("SAT on c17")
    {
        f2f_netlist* n = load("c17");
        f2f_plan* p = protect(n, "random", 1, 1, 1);
        f2f_view* v = view_of(p, "conservative");
        f2f_sat_options o;
        f2f_sat_options_init(&o);
        o.timeout_seconds = 60;
        f2f_sat_result r{};
        REQUIRE(f2f_attack_sat(v, n, &o, &r) == F2F_OK);
        CHECK(r.key_found == 1);
        CHECK(r.hd == 0.0);

        char* cnf = nullptr;
        REQUIRE(f2f_miter_dimacs(v, 1, &cnf) == F2F_OK);
        CHECK(take(cnf).find("p cnf ") != std::string::npos);
        f2f_view_free(v);
        f2f_plan_free(p);
        f2f_netlist_free(n);
    }
    SUBCASE("SAT refuses full views")
    {
        f2f_netlist* n = load("c17");
        f2f_plan* p = protect(n, "random", 1, 1, 1);
        f2f_view* v = view_of(p, "full");
        f2f_sat_options o;
        f2f_sat_options_init(&o);
        f2f_sat_result r{};
        CHECK(f2f_attack_sat(v, n, &o, &r) == F2F_ERR_INVALID_ARGUMENT);
        f2f_view_free(v);
        f2f_plan_free(p);
        f2f_netlist_free(n);
    }
}

TEST_CASE("error reporting")
{
    f2f_netlist* n = nullptr;
    CHECK(f2f_netlist_load("/nonexistent/x.bench", &n) == F2F_ERR_IO);
    CHECK(n == nullptr);
    CHECK(std::strlen(f2f_last_error()) > 0);

    CHECK(f2f_netlist_parse("INPUT(a)\nOUTPUT(y)\ny = FROB(a)\n", "bad", &n) == F2F_ERR_PARSE);
    CHECK(std::string(f2f_last_error()).find("FROB") != std::string::npos);

    f2f_view* v = nullptr;
    CHECK(f2f_view_parse("{\"gates\": 3}", &v) == F2F_ERR_SCHEMA);
    CHECK(f2f_view_parse("not json", &v) == F2F_ERR_SCHEMA);

    f2f_netlist* c17 = load("c17");
    f2f_protect_config cfg;
    f2f_protect_config_init(&cfg);
    cfg.strategy = "bogus";
    f2f_plan* p = nullptr;
    CHECK(f2f_protect(c17, &cfg, &p) == F2F_ERR_INVALID_ARGUMENT);
    CHECK(f2f_netlist_stats_get(nullptr, nullptr) == F2F_ERR_INVALID_ARGUMENT);
    f2f_netlist_free(c17);

    CHECK(std::string(f2f_status_name(F2F_OK)) != std::string(f2f_status_name(F2F_ERR_IO)));
    CHECK(std::strlen(f2f_version()) > 0);

    f2f_netlist* cyclic = nullptr;
    const f2f_status cyc = f2f_netlist_parse("INPUT(a)\nOUTPUT(g1)\ng1 = NAND(a, g2)\ng2 = NOT(g1)\n", "cyc", &cyclic);
    if (cyc == F2F_OK) {
        f2f_netlist_stats s{};
        CHECK(f2f_netlist_stats_get(cyclic, &s) == F2F_ERR_CYCLE);
        f2f_netlist_free(cyclic);
    } else {
        CHECK(cyc == F2F_ERR_CYCLE);
    }
}

TEST_CASE("closed-form metrics")
{
    double count = 0, per_box = 0;
    REQUIRE(f2f_solution_space(8, 4, 1, &count, &per_box) == F2F_OK);
    CHECK(std::abs(count - std::log10(48.0)) < 1e-9);
    CHECK(per_box == doctest::Approx(std::log10(24.0 * 24.0 * 24.0 * 2.0)));
    CHECK(f2f_solution_space(5, 4, 1, &count, &per_box) == F2F_ERR_INVALID_ARGUMENT);
    REQUIRE(f2f_solution_space(2, 3, 0, &count, nullptr) == F2F_OK);
    CHECK(count == doctest::Approx(std::log10(12.0)));

    double f = 0;
    REQUIRE(f2f_lifting_fraction(12.0, &f) == F2F_OK);
    CHECK(std::abs(f - 0.076923) <= 1e-6);
    CHECK(f2f_lifting_fraction(-1.0, &f) == F2F_ERR_INVALID_ARGUMENT);
}
