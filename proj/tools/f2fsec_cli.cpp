// f2fsec: protect a netlist, attack a public view, sweep partition settings.

#include "f2fsec/f2fsec.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kPartial = 3 };

struct Failure {
    std::string message;
    int code = kData;
};

void check(f2f_status s, const std::string& context)
{
    if (s != F2F_OK)
        throw Failure{context + ": " + f2f_last_error(), kData};
}

struct StringDeleter {
    void operator()(char* s) const { f2f_string_free(s); }
};
using CString = std::unique_ptr<char, StringDeleter>;

struct NetlistDeleter {
    void operator()(f2f_netlist* n) const { f2f_netlist_free(n); }
};
struct PlanDeleter {
    void operator()(f2f_plan* p) const { f2f_plan_free(p); }
};
struct ViewDeleter {
    void operator()(f2f_view* v) const { f2f_view_free(v); }
};
using NetlistPtr = std::unique_ptr<f2f_netlist, NetlistDeleter>;
using PlanPtr = std::unique_ptr<f2f_plan, PlanDeleter>;
using ViewPtr = std::unique_ptr<f2f_view, ViewDeleter>;

std::string take(char* s)
{
    CString owned(s);
    return owned ? std::string(owned.get()) : std::string();
}

NetlistPtr load_netlist(const std::string& arg)
{
    char* path = nullptr;
    check(f2f_corpus_path(arg.c_str(), &path), arg);
    const std::string resolved = take(path);
    f2f_netlist* n = nullptr;
    check(f2f_netlist_load(resolved.c_str(), &n), resolved);
    return NetlistPtr(n);
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Failure{"cannot open '" + path + "'", kData};
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out)
        throw Failure{"cannot write '" + path.string() + "'", kData};
}

std::string design_name(const std::string& bench)
{
    return fs::path(bench).stem().string();
}

// Runs body(i) for i in [0, n) on up to `jobs` threads; stops handing out
// work once `stop` is set.
template <class F>
void parallel_for(std::size_t n, unsigned jobs, const std::atomic<bool>& stop, F&& body)
{
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; !stop.load() && (i = next.fetch_add(1)) < n;)
            body(i);
    };
    const unsigned count = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < count; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();
}

std::atomic<bool> interrupted{false};

extern "C" void on_sigint(int)
{
    interrupted.store(true);
}

struct ProtectArgs {
    std::string strategy = "timing";
    double fraction = 0.5;
    double balance_eps = 0.05;
    bool no_randomize = false;
    bool no_switchbox = false;
    std::uint64_t seed = 1;
};

void add_protect_flags(CLI::App* cmd, ProtectArgs& a)
{
    cmd->add_option("--strategy", a.strategy, "Partitioning strategy")
        ->check(CLI::IsMember({"random", "maxcut", "timing"}))
        ->capture_default_str();
    cmd->add_option("--fraction", a.fraction, "Share of gates moved to the top tier")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd->add_option("--balance-eps", a.balance_eps, "Allowed tier imbalance for timing-aware partitioning")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd->add_flag("--no-randomize", a.no_randomize, "Keep F2F ports aligned");
    cmd->add_flag("--no-switchbox", a.no_switchbox, "Route crossings without switchboxes");
}

f2f_protect_config make_config(const ProtectArgs& a, const std::string& strategy, double fraction, std::uint64_t seed)
{
    f2f_protect_config c;
    f2f_protect_config_init(&c);
    c.strategy = strategy.c_str();
    c.move_fraction = fraction;
    c.balance_eps = a.balance_eps;
    c.randomize = !a.no_randomize;
    c.use_switchboxes = !a.no_switchbox;
    c.seed = seed;
    return c;
}

int cmd_protect(const std::string& bench, const ProtectArgs& a, const std::string& mode, const std::string& out_dir)
{
    auto netlist = load_netlist(bench);
    const auto config = make_config(a, a.strategy, a.fraction, a.seed);
    f2f_plan* raw = nullptr;
    check(f2f_protect(netlist.get(), &config, &raw), "protect");
    PlanPtr plan(raw);
    f2f_view* rv = nullptr;
    check(f2f_plan_view(plan.get(), mode.c_str(), &rv), "public view");
    ViewPtr view(rv);

    const std::string stem = design_name(bench);
    const fs::path dir(out_dir);
    auto artifact = [&](f2f_artifact which) {
        char* s = nullptr;
        check(f2f_plan_export(plan.get(), which, &s), "export");
        return take(s);
    };
    write_file(dir / (stem + ".partition.json"), artifact(F2F_ARTIFACT_PARTITION));
    write_file(dir / (stem + ".placement.json"), artifact(F2F_ARTIFACT_PLACEMENT));
    write_file(dir / (stem + ".plan.json"), artifact(F2F_ARTIFACT_PLAN));
    write_file(dir / (stem + ".hist.csv"), artifact(F2F_ARTIFACT_HISTOGRAM_CSV));
    char* vj = nullptr;
    check(f2f_view_json(view.get(), &vj), "view");
    write_file(dir / (stem + ".view.json"), take(vj));

    f2f_plan_stats st;
    check(f2f_plan_stats_get(plan.get(), &st), "stats");
    std::cout << stem << ": " << st.gates << " gates, " << st.top_gates << " in top tier, cut " << st.cut_size << " ("
              << st.bottom_to_top << " up, " << st.top_to_bottom << " down), " << st.boxes << " switchboxes\n"
              << "wrote " << (dir / (stem + ".view.json")).string() << " (public) and " << (dir / (stem + ".plan.json")).string()
              << " (private)\n";
    return kOk;
}

struct AttackArgs {
    std::string view_path;
    std::string oracle;
    std::string engine = "proximity";
    std::string mode;
    std::uint64_t seed = 1;
    std::size_t seeds = 10;
    std::size_t patterns = 10000;
    double sat_timeout = 0.0;
    bool no_perm = false;
    unsigned jobs = 0;
    std::string out;
};

json proximity_campaign(const f2f_view* view, const f2f_netlist* oracle, const AttackArgs& a)
{
    std::vector<std::optional<f2f_proximity_result>> results(a.seeds);
    std::vector<std::string> errors(a.seeds);
    const std::atomic<bool> never{false};
    parallel_for(a.seeds, a.jobs, never, [&](std::size_t i) {
        f2f_proximity_options o;
        f2f_proximity_options_init(&o);
        o.mode = a.mode.empty() ? nullptr : a.mode.c_str();
        o.seed = a.seed + i;
        o.patterns = a.patterns;
        f2f_proximity_result r;
        if (f2f_attack_proximity(view, oracle, &o, &r, nullptr, 0) == F2F_OK)
            results[i] = r;
        else
            errors[i] = f2f_last_error();
    });
    json runs = json::array();
    double ccr = 0, hd = 0, rt = 0;
    for (std::size_t i = 0; i < a.seeds; ++i) {
        if (!results[i])
            throw Failure{"proximity attack, seed " + std::to_string(a.seed + i) + ": " + errors[i], kData};
        const auto& r = *results[i];
        runs.push_back({{"seed", a.seed + i},
                        {"ccr", r.ccr},
                        {"hd", r.hd},
                        {"runtime", r.runtime},
                        {"attempts", r.attempts},
                        {"box_correct", std::vector<int>(r.box_correct, r.box_correct + 5)}});
        ccr += r.ccr;
        hd += r.hd;
        rt += r.runtime;
    }
    const double n = static_cast<double>(std::max<std::size_t>(a.seeds, 1));
    std::printf("proximity: %zu seeds, mean CCR %.2f%%, mean HD %.2f%%, mean runtime %.3fs\n", a.seeds, ccr / n, hd / n,
                rt / n);
    return {{"runs", runs}, {"mean_ccr", ccr / n}, {"mean_hd", hd / n}, {"mean_runtime", rt / n}};
}

json sat_campaign(const f2f_view* view, const f2f_netlist* oracle, const AttackArgs& a)
{
    f2f_sat_options o;
    f2f_sat_options_init(&o);
    o.timeout_seconds = a.sat_timeout;
    o.permutation_constraints = !a.no_perm;
    o.patterns = a.patterns;
    o.seed = a.seed;
    f2f_sat_result r;
    check(f2f_attack_sat(view, oracle, &o, &r), "SAT attack");
    json j{{"outcome", r.key_found ? "key_found" : "timeout"},
           {"dips", r.dips},
           {"solver_calls", r.solver_calls},
           {"cycles_blocked", r.cycles_blocked},
           {"key_bits", r.key_bits},
           {"seconds", r.seconds}};
    if (r.key_found) {
        j["ccr"] = r.ccr;
        j["hd"] = r.hd;
        std::printf("sat: key_found after %zu DIPs in %.2fs, CCR %.2f%%, HD %.4f%%\n", r.dips, r.seconds, r.ccr, r.hd);
    } else {
        std::printf("sat: timeout after %zu DIPs in %.2fs\n", r.dips, r.seconds);
    }
    return j;
}

int cmd_attack(const AttackArgs& a)
{
    const std::string text = read_file(a.view_path);
    f2f_view* rv = nullptr;
    check(f2f_view_parse(text.c_str(), &rv), a.view_path);
    ViewPtr view(rv);
    auto oracle = load_netlist(a.oracle);

    json report;
    report["kind"] = "attack_report";
    report["version"] = 1;
    report["design"] = json::parse(text).value("design", "");
    report["config"] = {{"view", a.view_path},
                        {"oracle", a.oracle},
                        {"engine", a.engine},
                        {"mode", a.mode.empty() ? json(nullptr) : json(a.mode)},
                        {"seed", a.seed},
                        {"seeds", a.seeds},
                        {"patterns", a.patterns},
                        {"sat_timeout", a.sat_timeout},
                        {"permutation_constraints", !a.no_perm}};
    if (a.engine == "proximity" || a.engine == "both")
        report["proximity"] = proximity_campaign(view.get(), oracle.get(), a);
    if (a.engine == "sat" || a.engine == "both")
        report["sat"] = sat_campaign(view.get(), oracle.get(), a);
    if (!a.out.empty())
        write_file(a.out, report.dump(2) + "\n");
    return kOk;
}

struct SweepArgs {
    std::vector<std::string> benches;
    std::vector<std::string> strategies{"random"};
    std::vector<double> fractions{0.1, 0.2, 0.3, 0.4, 0.5};
    std::size_t seeds = 10;
    std::string mode = "conservative";
    std::size_t patterns = 10000;
    unsigned jobs = 0;
    std::string out;
};

struct SweepPoint {
    std::size_t bench;
    std::string strategy;
    double fraction;
    std::uint64_t seed;
};

int cmd_sweep(const SweepArgs& s, const ProtectArgs& p)
{
    std::vector<NetlistPtr> netlists;
    for (const auto& b : s.benches)
        netlists.push_back(load_netlist(b));

    std::vector<SweepPoint> points;
    for (std::size_t b = 0; b < s.benches.size(); ++b)
        for (const auto& strat : s.strategies) {
            // The timing-aware split sets its own balance, so it has no
            // fraction axis.
            const std::vector<double> fr = strat == "timing" ? std::vector<double>{0.5} : s.fractions;
            for (double f : fr)
                for (std::size_t k = 0; k < s.seeds; ++k)
                    points.push_back(SweepPoint{b, strat, f, p.seed + k});
        }

    struct Row {
        std::size_t cut;
        double ccr, hd;
    };
    std::vector<std::optional<Row>> rows(points.size());
    std::vector<std::string> errors(points.size());
    std::signal(SIGINT, on_sigint);
    parallel_for(points.size(), s.jobs, interrupted, [&](std::size_t i) {
        const auto& pt = points[i];
        const auto config = make_config(p, pt.strategy, pt.fraction, pt.seed);
        f2f_plan* plan = nullptr;
        if (f2f_protect(netlists[pt.bench].get(), &config, &plan) != F2F_OK) {
            errors[i] = f2f_last_error();
            return;
        }
        PlanPtr owned(plan);
        f2f_plan_stats st;
        f2f_view* view = nullptr;
        if (f2f_plan_stats_get(plan, &st) != F2F_OK || f2f_plan_view(plan, s.mode.c_str(), &view) != F2F_OK) {
            errors[i] = f2f_last_error();
            return;
        }
        ViewPtr owned_view(view);
        f2f_proximity_options o;
        f2f_proximity_options_init(&o);
        o.seed = pt.seed;
        o.patterns = s.patterns;
        f2f_proximity_result r;
        if (f2f_attack_proximity(view, netlists[pt.bench].get(), &o, &r, nullptr, 0) != F2F_OK) {
            errors[i] = f2f_last_error();
            return;
        }
        rows[i] = Row{st.cut_size, r.ccr, r.hd};
    });
    std::signal(SIGINT, SIG_DFL);

    std::ostringstream csv;
    csv << "benchmark,strategy,fraction,seed,cut_size,ccr,hd\n";
    std::size_t done = 0, failed = 0;
    char buf[256];
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& pt = points[i];
        if (!rows[i]) {
            if (!errors[i].empty()) {
                ++failed;
                std::cerr << "f2fsec: " << design_name(s.benches[pt.bench]) << ' ' << pt.strategy << ' ' << pt.fraction
                          << " seed " << pt.seed << ": " << errors[i] << '\n';
            }
            continue;
        }
        ++done;
        std::snprintf(buf, sizeof buf, "%s,%s,%.2f,%llu,%zu,%.4f,%.4f\n", design_name(s.benches[pt.bench]).c_str(),
                      pt.strategy.c_str(), pt.fraction, static_cast<unsigned long long>(pt.seed), rows[i]->cut,
                      rows[i]->ccr, rows[i]->hd);
        csv << buf;
    }
    if (s.out.empty())
        std::cout << csv.str();
    else
        write_file(s.out, csv.str());
    std::cerr << "sweep: " << done << " of " << points.size() << " points\n";
    if (interrupted.load())
        return kPartial;
    return failed ? kData : kOk;
}

struct MetricsArgs {
    std::string bench;
    std::vector<std::size_t> solution_space;
    bool no_switchbox = false;
    std::optional<double> lifting;
};

int cmd_metrics(const MetricsArgs& m)
{
    json out;
    if (!m.bench.empty()) {
        auto n = load_netlist(m.bench);
        f2f_netlist_stats st;
        check(f2f_netlist_stats_get(n.get(), &st), m.bench);
        char* t = nullptr;
        check(f2f_netlist_timing_json(n.get(), &t), "timing");
        const json timing = json::parse(take(t));
        out["design"] = design_name(m.bench);
        out["inputs"] = st.inputs;
        out["outputs"] = st.outputs;
        out["gates"] = st.gates;
        out["flops"] = st.flops;
        out["depth"] = st.depth;
        out["critical_delay"] = timing.at("critical_delay");
    }
    if (!m.solution_space.empty()) {
        double c = 0, per_box = 0;
        check(f2f_solution_space(m.solution_space[0], m.solution_space[1], !m.no_switchbox, &c, &per_box),
              "solution space");
        out["solution_space"] = {{"d_bot", m.solution_space[0]},
                                 {"d_top", m.solution_space[1]},
                                 {"switchboxes", !m.no_switchbox},
                                 {"log10_count", c},
                                 {"log10_count_per_box", per_box}};
    }
    if (m.lifting) {
        double f = 0;
        check(f2f_lifting_fraction(*m.lifting, &f), "lifting fraction");
        out["lifting_fraction"] = {{"area_ratio", *m.lifting}, {"fraction", f}};
    }
    if (out.empty())
        throw Failure{"metrics: give a benchmark, --solution-space or --lifting", kUsage};
    std::cout << out.dump(2) << '\n';
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Security-driven F2F 3D IC flow: protect netlists and attack their public views"};
    app.require_subcommand(1);
    app.set_version_flag("--version", f2f_version());

    ProtectArgs protect;
    std::string protect_bench, protect_mode = "conservative", protect_out = ".";
    auto* p = app.add_subcommand("protect", "Partition, place and plan the F2F interconnect");
    p->add_option("bench", protect_bench, "Benchmark .bench file or bundled name")->required();
    add_protect_flags(p, protect);
    p->add_option("--seed", protect.seed, "Seed for every random stream")->capture_default_str();
    p->add_option("--mode", protect_mode, "Public view mode")
        ->check(CLI::IsMember({"conservative", "full"}))
        ->capture_default_str();
    p->add_option("--out", protect_out, "Output directory")->capture_default_str();

    AttackArgs attack;
    auto* a = app.add_subcommand("attack", "Attack a public view using a working copy as oracle");
    a->add_option("view", attack.view_path, "Public view JSON")->required();
    a->add_option("oracle", attack.oracle, "Oracle .bench file or bundled name")->required();
    a->add_option("--engine", attack.engine, "Attack engine")
        ->check(CLI::IsMember({"proximity", "sat", "both"}))
        ->capture_default_str();
    a->add_option("--mode", attack.mode, "Attacker model (default: the view's)")
        ->check(CLI::IsMember({"conservative", "full"}));
    a->add_option("--seed", attack.seed, "First attack seed")->capture_default_str();
    a->add_option("--seeds", attack.seeds, "Number of proximity seeds")->check(CLI::PositiveNumber)->capture_default_str();
    a->add_option("--patterns", attack.patterns, "Random patterns for HD")->check(CLI::PositiveNumber)->capture_default_str();
    a->add_option("--sat-timeout", attack.sat_timeout, "SAT attack time limit in seconds (0: none)")
        ->check(CLI::NonNegativeNumber);
    a->add_flag("--no-perm", attack.no_perm, "Drop one-to-one constraints from the SAT model");
    a->add_option("--jobs", attack.jobs, "Worker threads");
    a->add_option("--out", attack.out, "Report JSON path");

    SweepArgs sweep;
    ProtectArgs sweep_protect;
    auto* s = app.add_subcommand("sweep", "Cut size and proximity attack over strategies, fractions and seeds");
    s->add_option("bench", sweep.benches, "Benchmarks")->required();
    s->add_option("--strategy", sweep.strategies, "Strategies")
        ->delimiter(',')
        ->check(CLI::IsMember({"random", "maxcut", "timing"}));
    s->add_option("--fraction", sweep.fractions, "Move fractions")->delimiter(',')->check(CLI::Range(0.0, 1.0));
    s->add_option("--balance-eps", sweep_protect.balance_eps, "Allowed imbalance for timing-aware partitioning")
        ->check(CLI::Range(0.0, 1.0));
    s->add_flag("--no-randomize", sweep_protect.no_randomize, "Keep F2F ports aligned");
    s->add_flag("--no-switchbox", sweep_protect.no_switchbox, "Route crossings without switchboxes");
    s->add_option("--seed", sweep_protect.seed, "First seed")->capture_default_str();
    s->add_option("--seeds", sweep.seeds, "Seeds per point")->check(CLI::PositiveNumber)->capture_default_str();
    s->add_option("--mode", sweep.mode, "Attacker model")->check(CLI::IsMember({"conservative", "full"}));
    s->add_option("--patterns", sweep.patterns, "Random patterns for HD")->check(CLI::PositiveNumber);
    s->add_option("--jobs", sweep.jobs, "Worker threads");
    s->add_option("--out", sweep.out, "CSV path (default: stdout)");

    MetricsArgs metrics;
    double lifting = 0;
    auto* m = app.add_subcommand("metrics", "Netlist statistics, solution space and lifting fraction");
    m->add_option("bench", metrics.bench, "Benchmark");
    m->add_option("--solution-space", metrics.solution_space, "D_BOT D_TOP")->expected(2);
    m->add_flag("--no-switchbox", metrics.no_switchbox, "Solution space without switchboxes");
    auto* lift = m->add_option("--lifting", lifting, "Top/bottom area ratio of a lifted gate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }
    if (attack.jobs == 0)
        attack.jobs = std::max(1u, std::thread::hardware_concurrency());
    if (sweep.jobs == 0)
        sweep.jobs = std::max(1u, std::thread::hardware_concurrency());
    if (lift->count())
        metrics.lifting = lifting;

    try {
        if (*p)
            return cmd_protect(protect_bench, protect, protect_mode, protect_out);
        if (*a)
            return cmd_attack(attack);
        if (*s)
            return cmd_sweep(sweep, sweep_protect);
        if (*m)
            return cmd_metrics(metrics);
    } catch (const Failure& f) {
        std::cerr << "f2fsec: " << f.message << '\n';
        return f.code;
    } catch (const std::exception& e) {
        std::cerr << "f2fsec: " << e.what() << '\n';
        return kData;
    }
    return kUsage;
}
