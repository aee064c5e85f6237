#include "f2fsec/f2fsec.h"

#include "f2fsec/corpus.hpp"
#include "f2fsec/error.hpp"
#include "f2fsec/keyed_circuit.hpp"
#include "f2fsec/metrics.hpp"
#include "f2fsec/proximity_attack.hpp"
#include "f2fsec/sat_attack.hpp"
#include "f2fsec/timing.hpp"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

struct f2f_netlist {
    f2fsec::Netlist netlist;
};

struct f2f_plan {
    f2fsec::RdlPlan plan;
    f2fsec::ProtectConfig config;
};

struct f2f_view {
    f2fsec::PublicView view;
};

namespace {

thread_local std::string last_error;

f2f_status fail(f2f_status status, const std::string& message)
{
    last_error = message;
    return status;
}

template <class F>
f2f_status guard(F&& body)
{
    using namespace f2fsec;
    try {
        body();
        last_error.clear();
        return F2F_OK;
    } catch (const ParseError& e) {
        return fail(F2F_ERR_PARSE, e.what());
    } catch (const CycleError& e) {
        return fail(F2F_ERR_CYCLE, e.what());
    } catch (const SchemaError& e) {
        return fail(F2F_ERR_SCHEMA, e.what());
    } catch (const KeyError& e) {
        return fail(F2F_ERR_KEY, e.what());
    } catch (const BalanceError& e) {
        return fail(F2F_ERR_BALANCE, e.what());
    } catch (const LegalizationError& e) {
        return fail(F2F_ERR_LEGALIZATION, e.what());
    } catch (const AttackError& e) {
        return fail(F2F_ERR_ATTACK, e.what());
    } catch (const IoError& e) {
        return fail(F2F_ERR_IO, e.what());
    } catch (const InvalidArgument& e) {
        return fail(F2F_ERR_INVALID_ARGUMENT, e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(F2F_ERR_SCHEMA, e.what());
    } catch (const std::bad_alloc&) {
        return fail(F2F_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(F2F_ERR_INTERNAL, e.what());
    }
}

char* dup_string(const std::string& s)
{
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out)
        throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void require(bool ok, const char* what)
{
    if (!ok)
        throw f2fsec::InvalidArgument(what);
}

f2fsec::ConnectionKey key_from(const int* key, size_t len)
{
    require(key || len == 0, "key is null");
    return f2fsec::ConnectionKey{std::vector<int>(key, key + len)};
}

void key_to(const f2fsec::ConnectionKey& k, int* key, size_t len)
{
    require(len == k.driver_of_sink.size(), "key buffer length does not match the sink count");
    for (size_t i = 0; i < len; ++i)
        key[i] = k.driver_of_sink[i];
}

} // namespace

extern "C" {

const char* f2f_last_error(void)
{
    return last_error.c_str();
}

const char* f2f_status_name(f2f_status status)
{
    switch (status) {
    case F2F_OK: return "ok";
    case F2F_ERR_INVALID_ARGUMENT: return "invalid argument";
    case F2F_ERR_IO: return "i/o error";
    case F2F_ERR_PARSE: return "parse error";
    case F2F_ERR_CYCLE: return "combinational cycle";
    case F2F_ERR_SCHEMA: return "schema error";
    case F2F_ERR_KEY: return "key error";
    case F2F_ERR_BALANCE: return "balance error";
    case F2F_ERR_LEGALIZATION: return "legalization error";
    case F2F_ERR_ATTACK: return "attack error";
    case F2F_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* f2f_version(void)
{
    return "0.1.0";
}

void f2f_string_free(char* s)
{
    std::free(s);
}

f2f_status f2f_netlist_load(const char* path, f2f_netlist** out)
{
    return guard([&] {
        require(path && out, "null argument");
        *out = new f2f_netlist{f2fsec::read_bench_file(path)};
    });
}

f2f_status f2f_netlist_parse(const char* bench_text, const char* name, f2f_netlist** out)
{
    return guard([&] {
        require(bench_text && out, "null argument");
        *out = new f2f_netlist{f2fsec::parse_bench(bench_text, name ? name : "")};
    });
}

void f2f_netlist_free(f2f_netlist* n)
{
    delete n;
}

f2f_status f2f_corpus_path(const char* name, char** out)
{
    return guard([&] {
        require(name && out, "null argument");
        *out = dup_string(f2fsec::corpus_path(name));
    });
}

f2f_status f2f_netlist_stats_get(const f2f_netlist* n, f2f_netlist_stats* out)
{
    return guard([&] {
        require(n && out, "null argument");
        const auto& nl = n->netlist;
        *out = f2f_netlist_stats{nl.primary_input_count(), nl.primary_output_count(), nl.gate_count(),
                                 nl.flops().size(), f2fsec::levelize(nl).depth};
    });
}

f2f_status f2f_netlist_timing_json(const f2f_netlist* n, char** out)
{
    return guard([&] {
        require(n && out, "null argument");
        *out = dup_string(f2fsec::timing_report_json(n->netlist, f2fsec::compute_timing(n->netlist)).dump(2));
    });
}

f2f_status f2f_netlist_bench(const f2f_netlist* n, char** out)
{
    return guard([&] {
        require(n && out, "null argument");
        *out = dup_string(f2fsec::write_bench(n->netlist));
    });
}

void f2f_protect_config_init(f2f_protect_config* config)
{
    if (!config)
        return;
    const f2fsec::ProtectConfig d;
    config->strategy = "timing";
    config->move_fraction = d.move_fraction;
    config->balance_eps = d.balance_eps;
    config->randomize = 1;
    config->use_switchboxes = 1;
    config->seed = d.plan.seed;
}

f2f_status f2f_protect(const f2f_netlist* n, const f2f_protect_config* config, f2f_plan** out)
{
    return guard([&] {
        require(n && config && out, "null argument");
        f2fsec::ProtectConfig c;
        const auto strategy = f2fsec::parse_strategy(config->strategy ? config->strategy : "");
        require(strategy.has_value(), "strategy must be random, maxcut or timing");
        c.strategy = *strategy;
        c.move_fraction = config->move_fraction;
        c.balance_eps = config->balance_eps;
        c.plan.randomize = config->randomize != 0;
        c.plan.use_switchboxes = config->use_switchboxes != 0;
        c.plan.seed = config->seed;
        auto plan = f2fsec::protect_design(n->netlist, c);
        *out = new f2f_plan{std::move(plan), c};
    });
}

void f2f_plan_free(f2f_plan* p)
{
    delete p;
}

f2f_status f2f_plan_export(const f2f_plan* p, f2f_artifact which, char** out)
{
    return guard([&] {
        require(p && out, "null argument");
        const auto& plan = p->plan;
        switch (which) {
        case F2F_ARTIFACT_PARTITION:
            *out = dup_string(f2fsec::partition_json(plan.netlist, plan.partition, plan.cut).dump(2) + "\n");
            return;
        case F2F_ARTIFACT_PLACEMENT:
            *out = dup_string(f2fsec::placement_json(plan.netlist, plan.bottom, plan.top).dump(2) + "\n");
            return;
        case F2F_ARTIFACT_PLAN:
            *out = dup_string(f2fsec::plan_json(plan).dump(2) + "\n");
            return;
        case F2F_ARTIFACT_HISTOGRAM_CSV:
            *out = dup_string(f2fsec::histogram_csv(plan));
            return;
        case F2F_ARTIFACT_CONFIG:
            *out = dup_string(f2fsec::to_json(p->config).dump(2) + "\n");
            return;
        }
        throw f2fsec::InvalidArgument("unknown artifact");
    });
}

f2f_status f2f_plan_stats_get(const f2f_plan* p, f2f_plan_stats* out)
{
    return guard([&] {
        require(p && out, "null argument");
        const auto& plan = p->plan;
        size_t nonzero = 0;
        for (const auto& port : plan.ports)
            nonzero += port.displacement > 0.0;
        *out = f2f_plan_stats{plan.netlist.gate_count(),
                              plan.partition.top_count(),
                              plan.cut.size(),
                              plan.cut.count(f2fsec::Direction::BottomToTop),
                              plan.cut.count(f2fsec::Direction::TopToBottom),
                              plan.boxes.size(),
                              nonzero};
    });
}

f2f_status f2f_plan_view(const f2f_plan* p, const char* mode, f2f_view** out)
{
    return guard([&] {
        require(p && out, "null argument");
        const auto m = f2fsec::parse_view_mode(mode ? mode : "");
        require(m.has_value(), "view mode must be conservative or full");
        *out = new f2f_view{f2fsec::public_view(p->plan, *m)};
    });
}

f2f_status f2f_view_parse(const char* json, f2f_view** out)
{
    return guard([&] {
        require(json && out, "null argument");
        *out = new f2f_view{f2fsec::view_from_json(nlohmann::ordered_json::parse(json))};
    });
}

f2f_status f2f_view_json(const f2f_view* v, char** out)
{
    return guard([&] {
        require(v && out, "null argument");
        *out = dup_string(f2fsec::view_json(v->view).dump(2) + "\n");
    });
}

void f2f_view_free(f2f_view* v)
{
    delete v;
}

f2f_status f2f_view_counts(const f2f_view* v, size_t* drivers, size_t* sinks, size_t* boxes)
{
    return guard([&] {
        require(v, "null argument");
        if (drivers)
            *drivers = v->view.drivers.size();
        if (sinks)
            *sinks = v->view.sinks.size();
        if (boxes)
            *boxes = v->view.boxes.size();
    });
}

f2f_status f2f_view_apply_key(const f2f_view* v, const int* key, size_t key_len, f2f_netlist** out)
{
    return guard([&] {
        require(v && out, "null argument");
        *out = new f2f_netlist{f2fsec::apply_key(v->view, key_from(key, key_len))};
    });
}

f2f_status f2f_view_true_key(const f2f_view* v, const f2f_netlist* oracle, int* key, size_t key_len)
{
    return guard([&] {
        require(v && oracle && key, "null argument");
        key_to(f2fsec::derive_true_key(v->view, oracle->netlist), key, key_len);
    });
}

void f2f_proximity_options_init(f2f_proximity_options* options)
{
    if (!options)
        return;
    const f2fsec::ProximityOptions d;
    options->mode = nullptr;
    options->seed = d.seed;
    options->patterns = f2fsec::kDefaultPatterns;
    options->max_retries = d.max_retries;
}

f2f_status f2f_attack_proximity(const f2f_view* v, const f2f_netlist* oracle, const f2f_proximity_options* options,
                                f2f_proximity_result* out, int* key, size_t key_len)
{
    return guard([&] {
        require(v && oracle && options && out, "null argument");
        f2fsec::ProximityOptions o;
        o.mode = v->view.mode;
        if (options->mode) {
            const auto m = f2fsec::parse_view_mode(options->mode);
            require(m.has_value(), "attack mode must be conservative or full");
            o.mode = *m;
        }
        o.seed = options->seed;
        o.max_retries = options->max_retries;
        const auto r = f2fsec::run_proximity_attack(v->view, oracle->netlist, o, options->patterns);
        out->ccr = r.ccr;
        out->hd = r.hd;
        out->runtime = r.runtime;
        out->attempts = r.attempts;
        for (int i = 0; i < 5; ++i)
            out->box_correct[i] = r.box_correct[static_cast<size_t>(i)];
        if (key)
            key_to(r.key, key, key_len);
    });
}

void f2f_sat_options_init(f2f_sat_options* options)
{
    if (!options)
        return;
    options->timeout_seconds = 0.0;
    options->permutation_constraints = 1;
    options->patterns = f2fsec::kDefaultPatterns;
    options->seed = 1;
}

f2f_status f2f_attack_sat(const f2f_view* v, const f2f_netlist* oracle, const f2f_sat_options* options,
                          f2f_sat_result* out)
{
    return guard([&] {
        require(v && oracle && options && out, "null argument");
        const auto circuit = f2fsec::encode_keyed_circuit(v->view, options->permutation_constraints != 0);
        f2fsec::SatAttackOptions o;
        if (options->timeout_seconds > 0)
            o.timeout_seconds = options->timeout_seconds;
        const auto r = f2fsec::run_sat_attack(circuit, oracle->netlist, o);
        *out = f2f_sat_result{r.key.has_value(), r.stats.dips, r.stats.solver_calls, r.stats.cycles_blocked,
                              r.stats.key_width, r.stats.seconds, 0.0, 0.0};
        if (r.key) {
            const auto truth = f2fsec::derive_true_key(v->view, oracle->netlist);
            out->ccr = f2fsec::ccr(truth, *r.key);
            out->hd = f2fsec::hamming_distance(oracle->netlist, f2fsec::apply_key(v->view, *r.key), options->patterns,
                                               options->seed);
        }
    });
}

f2f_status f2f_miter_dimacs(const f2f_view* v, int permutation_constraints, char** out)
{
    return guard([&] {
        require(v && out, "null argument");
        const auto circuit = f2fsec::encode_keyed_circuit(v->view, permutation_constraints != 0);
        *out = dup_string(f2fsec::to_dimacs(f2fsec::miter_cnf(circuit)));
    });
}

f2f_status f2f_hamming_distance(const f2f_netlist* oracle, const f2f_netlist* candidate, size_t patterns,
                                uint64_t seed, double* out)
{
    return guard([&] {
        require(oracle && candidate && out, "null argument");
        *out = f2fsec::hamming_distance(oracle->netlist, candidate->netlist, patterns, seed);
    });
}

f2f_status f2f_solution_space(size_t d_bot, size_t d_top, int with_switchboxes, double* log10_count,
                              double* log10_count_per_box)
{
    return guard([&] {
        const auto s = f2fsec::solution_space(d_bot, d_top, with_switchboxes != 0);
        if (log10_count)
            *log10_count = s.log10_count;
        if (log10_count_per_box)
            *log10_count_per_box = s.log10_count_per_box;
    });
}

f2f_status f2f_lifting_fraction(double area_ratio, double* out)
{
    return guard([&] {
        require(out, "null argument");
        *out = f2fsec::lifting_fraction(area_ratio);
    });
}

} // extern "C"
