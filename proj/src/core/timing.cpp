#include "f2fsec/timing.hpp"

#include <algorithm>

namespace f2fsec {

TimingInfo compute_timing(const Netlist& netlist)
{
    const Levelization lv = levelize(netlist);
    const std::size_t n = netlist.gate_count();
    TimingInfo t;
    t.arrival = lv.level;
    for (NetId o : netlist.outputs())
        if (const GateId d = netlist.net_at(o).driver; d != kNoGate)
            t.critical_delay = std::max(t.critical_delay, t.arrival[static_cast<std::size_t>(d)]);

    t.required.assign(n, t.critical_delay);
    for (auto it = lv.order.rbegin(); it != lv.order.rend(); ++it) {
        const auto g = static_cast<std::size_t>(*it);
        int req = t.critical_delay;
        for (GateId s : netlist.net_at(netlist.gate(*it).output).sinks)
            req = std::min(req, t.required[static_cast<std::size_t>(s)] - 1);
        t.required[g] = req;
    }
    t.slack.resize(n);
    for (std::size_t g = 0; g < n; ++g)
        t.slack[g] = t.required[g] - t.arrival[g];
    return t;
}

namespace {

struct PathWalker {
    const Netlist& netlist;
    const TimingInfo& timing;
    int visit_cap;
    std::vector<int> visits;
    std::vector<std::vector<NetId>> ordered_fanins;
    std::vector<GateId> stack;
    std::vector<TimingPath> paths;

    void walk(GateId g)
    {
        auto& v = visits[static_cast<std::size_t>(g)];
        if (v >= visit_cap)
            return;
        ++v;
        stack.push_back(g);
        for (NetId in : ordered_fanins[static_cast<std::size_t>(g)]) {
            const GateId d = netlist.net_at(in).driver;
            if (d == kNoGate)
                paths.push_back(TimingPath{in, {stack.rbegin(), stack.rend()}});
            else
                walk(d);
        }
        stack.pop_back();
    }
};

} // namespace

std::vector<TimingPath> extract_paths(const Netlist& netlist, const TimingInfo& timing, std::size_t k, int visit_cap)
{
    const std::size_t n = netlist.gate_count();
    PathWalker w{netlist, timing, std::max(visit_cap, 1), std::vector<int>(n, 0), {}, {}, {}};

    auto net_arrival = [&](NetId net) {
        const GateId d = netlist.net_at(net).driver;
        return d == kNoGate ? 0 : timing.arrival[static_cast<std::size_t>(d)];
    };
    auto by_criticality = [&](NetId a, NetId b) {
        const int aa = net_arrival(a), ab = net_arrival(b);
        if (aa != ab)
            return aa > ab;
        return netlist.net_at(a).name < netlist.net_at(b).name;
    };
    w.ordered_fanins.resize(n);
    for (std::size_t g = 0; g < n; ++g) {
        auto& f = w.ordered_fanins[g];
        f = netlist.gate(static_cast<GateId>(g)).inputs;
        std::sort(f.begin(), f.end(), by_criticality);
        f.erase(std::unique(f.begin(), f.end()), f.end());
    }

    std::vector<NetId> endpoints;
    for (std::size_t g = 0; g < n; ++g) {
        const NetId out = netlist.gate(static_cast<GateId>(g)).output;
        if (netlist.is_output(out) || netlist.net_at(out).sinks.empty())
            endpoints.push_back(out);
    }
    std::sort(endpoints.begin(), endpoints.end(), by_criticality);
    for (NetId e : endpoints)
        w.walk(netlist.net_at(e).driver);

    auto& paths = w.paths;
    std::sort(paths.begin(), paths.end(), [&](const TimingPath& a, const TimingPath& b) {
        if (a.length() != b.length())
            return a.length() > b.length();
        for (std::size_t i = 0; i < a.gates.size(); ++i) {
            if (a.gates[i] == b.gates[i])
                continue;
            return netlist.gate_name(a.gates[i]) < netlist.gate_name(b.gates[i]);
        }
        return netlist.net_at(a.source).name < netlist.net_at(b.source).name;
    });
    if (paths.size() > k)
        paths.resize(k);
    return paths;
}

nlohmann::ordered_json timing_report_json(const Netlist& netlist, const TimingInfo& timing)
{
    nlohmann::ordered_json report;
    report["design"] = netlist.name();
    report["critical_delay"] = timing.critical_delay;
    nlohmann::ordered_json slack = nlohmann::ordered_json::object();
    for (std::size_t g = 0; g < netlist.gate_count(); ++g)
        slack[netlist.gate_name(static_cast<GateId>(g))] = timing.slack[g];
    report["slack"] = std::move(slack);
    return report;
}

} // namespace f2fsec
