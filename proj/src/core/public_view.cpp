#include "f2fsec/public_view.hpp"

#include "f2fsec/error.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace f2fsec {

std::string_view to_string(ViewMode mode) { return mode == ViewMode::Conservative ? "conservative" : "full"; }

std::optional<ViewMode> parse_view_mode(std::string_view name)
{
    if (name == "conservative")
        return ViewMode::Conservative;
    if (name == "full")
        return ViewMode::Full;
    return std::nullopt;
}

std::vector<std::optional<int>> PublicView::sink_box() const
{
    std::vector<std::optional<int>> box(sinks.size());
    for (const auto& b : boxes)
        for (int s : b.sinks)
            box[static_cast<std::size_t>(s)] = b.id;
    return box;
}

std::vector<std::optional<int>> PublicView::driver_box() const
{
    std::vector<std::optional<int>> box(drivers.size());
    for (const auto& b : boxes)
        for (int d : b.drivers)
            box[static_cast<std::size_t>(d)] = b.id;
    return box;
}

PublicView public_view(const RdlPlan& plan, ViewMode mode)
{
    const Netlist& n = plan.netlist;
    PublicView v;
    v.design = n.name();
    v.mode = mode;
    v.outline = plan.outline;
    for (NetId i : n.inputs())
        v.inputs.push_back(n.net_at(i).name);
    for (NetId o : n.outputs())
        v.outputs.push_back(n.net_at(o).name);

    std::string prefix = "f2f_sink_";
    auto collides = [&] {
        return std::any_of(n.nets().begin(), n.nets().end(),
                           [&](const Net& net) { return net.name.rfind(prefix, 0) == 0; });
    };
    while (collides())
        prefix = "_" + prefix;

    const std::size_t m = plan.ports.size();
    v.drivers.resize(m);
    v.sinks.resize(m);
    std::unordered_map<NetId, std::size_t> port_of_net;
    for (std::size_t i = 0; i < m; ++i) {
        const auto& p = plan.ports[i];
        port_of_net.emplace(p.net, i);
        v.drivers[static_cast<std::size_t>(p.driver_stub)] =
            DriverStub{p.driver_stub, p.direction, n.net_at(p.net).name, p.driver_point()};
        v.sinks[static_cast<std::size_t>(p.sink_stub)] =
            SinkStub{p.sink_stub, p.direction, prefix + std::to_string(p.sink_stub), p.sink_point()};
    }

    v.gates.reserve(n.gate_count());
    for (std::size_t g = 0; g < n.gate_count(); ++g) {
        const auto id = static_cast<GateId>(g);
        const Gate& gate = n.gate(id);
        const Tier tier = plan.partition.of(id);
        ViewGate vg{n.gate_name(id), gate.type, tier, {}, {}};
        const auto& at = tier == Tier::Bottom ? plan.bottom.of(id) : plan.top.of(id);
        vg.at = at.value_or(TrackPoint{});
        for (NetId in : gate.inputs) {
            const GateId d = n.net_at(in).driver;
            if (d != kNoGate && plan.partition.of(d) != tier)
                vg.inputs.push_back(v.sinks[static_cast<std::size_t>(plan.ports[port_of_net.at(in)].sink_stub)].net);
            else
                vg.inputs.push_back(n.net_at(in).name);
        }
        v.gates.push_back(std::move(vg));
    }

    for (const auto& b : plan.boxes) {
        PublicBox pb{b.id, b.direction, b.location, {}, {}};
        if (mode == ViewMode::Conservative) {
            pb.drivers = b.driver_slots;
            pb.sinks = b.sink_slots;
        }
        v.boxes.push_back(std::move(pb));
    }
    return v;
}

nlohmann::ordered_json view_json(const PublicView& v)
{
    nlohmann::ordered_json j;
    j["kind"] = "public_view";
    j["version"] = 1;
    j["design"] = v.design;
    j["mode"] = to_string(v.mode);
    j["outline"] = {{"rows", v.outline.rows}, {"tracks", v.outline.tracks}};
    j["inputs"] = v.inputs;
    j["outputs"] = v.outputs;
    auto gates = nlohmann::ordered_json::array();
    for (const auto& g : v.gates)
        gates.push_back({{"name", g.name},
                         {"type", to_string(g.type)},
                         {"tier", to_string(g.tier)},
                         {"inputs", g.inputs},
                         {"at", to_json(g.at)}});
    j["gates"] = std::move(gates);
    auto drivers = nlohmann::ordered_json::array();
    for (const auto& d : v.drivers)
        drivers.push_back({{"id", d.id}, {"direction", to_string(d.direction)}, {"net", d.net}, {"at", to_json(d.at)}});
    j["drivers"] = std::move(drivers);
    auto sinks = nlohmann::ordered_json::array();
    for (const auto& s : v.sinks)
        sinks.push_back({{"id", s.id}, {"direction", to_string(s.direction)}, {"net", s.net}, {"at", to_json(s.at)}});
    j["sinks"] = std::move(sinks);
    auto boxes = nlohmann::ordered_json::array();
    for (const auto& b : v.boxes) {
        nlohmann::ordered_json jb{{"id", b.id}, {"direction", to_string(b.direction)}, {"at", to_json(b.at)}};
        if (v.mode == ViewMode::Conservative) {
            jb["drivers"] = b.drivers;
            jb["sinks"] = b.sinks;
        }
        boxes.push_back(std::move(jb));
    }
    j["boxes"] = std::move(boxes);
    return j;
}

namespace {

using Json = nlohmann::ordered_json;

void expect_keys(const Json& j, const std::string& where, std::initializer_list<std::string_view> required,
                 std::initializer_list<std::string_view> optional = {})
{
    if (!j.is_object())
        throw SchemaError(where + ": expected an object");
    for (auto key : required)
        if (!j.contains(std::string(key)))
            throw SchemaError(where + ": missing field '" + std::string(key) + "'");
    for (const auto& item : j.items()) {
        const auto& key = item.key();
        const bool known = std::find(required.begin(), required.end(), key) != required.end()
                           || std::find(optional.begin(), optional.end(), key) != optional.end();
        if (!known)
            throw SchemaError(where + ": unexpected field '" + key + "'");
    }
}

const Json& array_field(const Json& j, const char* key, const std::string& where)
{
    const Json& a = j.at(key);
    if (!a.is_array())
        throw SchemaError(where + "." + key + ": expected an array");
    return a;
}

std::string string_field(const Json& j, const char* key, const std::string& where)
{
    const Json& s = j.at(key);
    if (!s.is_string())
        throw SchemaError(where + "." + key + ": expected a string");
    return s.get<std::string>();
}

int int_field(const Json& j, const char* key, const std::string& where)
{
    const Json& s = j.at(key);
    if (!s.is_number_integer())
        throw SchemaError(where + "." + key + ": expected an integer");
    return s.get<int>();
}

Direction direction_field(const Json& j, const std::string& where)
{
    const auto d = parse_direction(string_field(j, "direction", where));
    if (!d)
        throw SchemaError(where + ".direction: unknown direction");
    return *d;
}

std::vector<int> int_list(const Json& j, const char* key, const std::string& where)
{
    std::vector<int> out;
    for (const auto& x : array_field(j, key, where)) {
        if (!x.is_number_integer())
            throw SchemaError(where + "." + key + ": expected integers");
        out.push_back(x.get<int>());
    }
    return out;
}

std::vector<std::string> string_list(const Json& j, const char* key, const std::string& where)
{
    std::vector<std::string> out;
    for (const auto& x : array_field(j, key, where)) {
        if (!x.is_string())
            throw SchemaError(where + "." + key + ": expected strings");
        out.push_back(x.get<std::string>());
    }
    return out;
}

PublicView parse_view(const Json& j)
{
    expect_keys(j, "view",
                {"kind", "version", "design", "mode", "outline", "inputs", "outputs", "gates", "drivers", "sinks",
                 "boxes"});
    if (j.at("kind") != "public_view")
        throw SchemaError("view.kind: expected 'public_view'");
    if (j.at("version") != 1)
        throw SchemaError("view.version: unsupported version");
    PublicView v;
    v.design = string_field(j, "design", "view");
    const auto mode = parse_view_mode(string_field(j, "mode", "view"));
    if (!mode)
        throw SchemaError("view.mode: expected 'conservative' or 'full'");
    v.mode = *mode;
    expect_keys(j.at("outline"), "view.outline", {"rows", "tracks"});
    v.outline = Outline{int_field(j.at("outline"), "rows", "view.outline"),
                        int_field(j.at("outline"), "tracks", "view.outline")};
    if (v.outline.rows < 1 || v.outline.tracks < 1)
        throw SchemaError("view.outline: dimensions must be positive");
    v.inputs = string_list(j, "inputs", "view");
    v.outputs = string_list(j, "outputs", "view");

    auto point = [&](const Json& o, const std::string& where) {
        try {
            const TrackPoint p = track_point_from_json(o.at("at"));
            if (!v.outline.contains(p))
                throw SchemaError(where + ".at: outside the outline");
            return p;
        } catch (const SchemaError& e) {
            throw SchemaError(where + ": " + e.what());
        }
    };

    for (const auto& g : array_field(j, "gates", "view")) {
        expect_keys(g, "view.gates[]", {"name", "type", "tier", "inputs", "at"});
        const auto type = parse_gate_type(string_field(g, "type", "view.gates[]"));
        if (!type || *type == GateType::Dff)
            throw SchemaError("view.gates[]: unknown gate type");
        const auto tier_name = string_field(g, "tier", "view.gates[]");
        if (tier_name != "bottom" && tier_name != "top")
            throw SchemaError("view.gates[].tier: expected 'bottom' or 'top'");
        v.gates.push_back(ViewGate{string_field(g, "name", "view.gates[]"), *type,
                                   tier_name == "bottom" ? Tier::Bottom : Tier::Top,
                                   string_list(g, "inputs", "view.gates[]"), point(g, "view.gates[]")});
    }
    for (const auto& d : array_field(j, "drivers", "view")) {
        expect_keys(d, "view.drivers[]", {"id", "direction", "net", "at"});
        DriverStub s{int_field(d, "id", "view.drivers[]"), direction_field(d, "view.drivers[]"),
                     string_field(d, "net", "view.drivers[]"), point(d, "view.drivers[]")};
        if (s.id != static_cast<int>(v.drivers.size()))
            throw SchemaError("view.drivers[]: ids must be consecutive from 0");
        v.drivers.push_back(std::move(s));
    }
    for (const auto& d : array_field(j, "sinks", "view")) {
        expect_keys(d, "view.sinks[]", {"id", "direction", "net", "at"});
        SinkStub s{int_field(d, "id", "view.sinks[]"), direction_field(d, "view.sinks[]"),
                   string_field(d, "net", "view.sinks[]"), point(d, "view.sinks[]")};
        if (s.id != static_cast<int>(v.sinks.size()))
            throw SchemaError("view.sinks[]: ids must be consecutive from 0");
        v.sinks.push_back(std::move(s));
    }
    if (v.drivers.size() != v.sinks.size())
        throw SchemaError("view: driver and sink stub counts differ");

    std::vector<std::uint8_t> driver_seen(v.drivers.size(), 0), sink_seen(v.sinks.size(), 0);
    for (const auto& b : array_field(j, "boxes", "view")) {
        if (v.mode == ViewMode::Conservative)
            expect_keys(b, "view.boxes[]", {"id", "direction", "at", "drivers", "sinks"});
        else
            expect_keys(b, "view.boxes[]", {"id", "direction", "at"});
        PublicBox pb{int_field(b, "id", "view.boxes[]"), direction_field(b, "view.boxes[]"), point(b, "view.boxes[]"),
                     {}, {}};
        if (pb.id != static_cast<int>(v.boxes.size()))
            throw SchemaError("view.boxes[]: ids must be consecutive from 0");
        if (v.mode == ViewMode::Conservative) {
            pb.drivers = int_list(b, "drivers", "view.boxes[]");
            pb.sinks = int_list(b, "sinks", "view.boxes[]");
            if (pb.drivers.size() != pb.sinks.size() || pb.drivers.empty()
                || pb.drivers.size() > static_cast<std::size_t>(kSwitchBoxSize))
                throw SchemaError("view.boxes[]: a box holds 1 to 4 driver/sink pairs");
            for (int d : pb.drivers) {
                if (d < 0 || static_cast<std::size_t>(d) >= v.drivers.size() || driver_seen[static_cast<std::size_t>(d)]++
                    || v.drivers[static_cast<std::size_t>(d)].direction != pb.direction)
                    throw SchemaError("view.boxes[]: bad driver membership");
            }
            for (int s : pb.sinks) {
                if (s < 0 || static_cast<std::size_t>(s) >= v.sinks.size() || sink_seen[static_cast<std::size_t>(s)]++
                    || v.sinks[static_cast<std::size_t>(s)].direction != pb.direction)
                    throw SchemaError("view.boxes[]: bad sink membership");
            }
        }
        v.boxes.push_back(std::move(pb));
    }
    return v;
}

} // namespace

void validate_view_json(const nlohmann::ordered_json& j) { (void)parse_view(j); }

PublicView view_from_json(const nlohmann::ordered_json& j)
{
    try {
        return parse_view(j);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("view: ") + e.what());
    }
}

Netlist apply_key(const PublicView& view, const ConnectionKey& key, bool require_bijective)
{
    const std::size_t m = view.sinks.size();
    if (key.driver_of_sink.size() != m)
        throw KeyError("key covers " + std::to_string(key.driver_of_sink.size()) + " sinks, view has "
                       + std::to_string(m));
    const auto sink_box = view.sink_box();
    const auto driver_box = view.driver_box();
    std::vector<int> uses(view.drivers.size(), 0);
    std::unordered_map<std::string, const std::string*> resolve;
    for (std::size_t s = 0; s < m; ++s) {
        const int d = key.driver_of_sink[s];
        if (d < 0 || static_cast<std::size_t>(d) >= view.drivers.size())
            throw KeyError("sink " + std::to_string(s) + " maps to unknown driver " + std::to_string(d));
        const auto& driver = view.drivers[static_cast<std::size_t>(d)];
        if (driver.direction != view.sinks[s].direction)
            throw KeyError("sink " + std::to_string(s) + " maps across directions");
        if (sink_box[s] && sink_box[s] != driver_box[static_cast<std::size_t>(d)])
            throw KeyError("sink " + std::to_string(s) + " maps outside its switchbox");
        if (++uses[static_cast<std::size_t>(d)] > 1 && require_bijective)
            throw KeyError("driver " + std::to_string(d) + " feeds more than one sink");
        resolve.emplace(view.sinks[s].net, &driver.net);
    }

    Netlist merged(view.design);
    try {
        for (const auto& name : view.inputs)
            merged.add_input(name);
        for (const auto& g : view.gates) {
            std::vector<NetId> ins;
            ins.reserve(g.inputs.size());
            for (const auto& in : g.inputs) {
                auto it = resolve.find(in);
                ins.push_back(merged.net(it == resolve.end() ? in : *it->second));
            }
            merged.add_gate(g.type, merged.net(g.name), std::move(ins));
        }
        for (const auto& name : view.outputs)
            merged.add_output(merged.net(name));
        merged.finish();
    } catch (const ParseError& e) {
        throw KeyError(std::string("view does not assemble: ") + e.what());
    }
    try {
        (void)levelize(merged);
    } catch (const CycleError& e) {
        throw KeyError(std::string("key induces a ") + e.what());
    }
    return merged;
}

ConnectionKey derive_true_key(const PublicView& view, const Netlist& oracle)
{
    std::unordered_map<std::string, int> sink_of, driver_of;
    for (const auto& s : view.sinks)
        sink_of.emplace(s.net, s.id);
    for (const auto& d : view.drivers)
        driver_of.emplace(d.net, d.id);
    ConnectionKey key{std::vector<int>(view.sinks.size(), -1)};
    for (const auto& g : view.gates) {
        for (std::size_t pin = 0; pin < g.inputs.size(); ++pin) {
            auto s = sink_of.find(g.inputs[pin]);
            if (s == sink_of.end())
                continue;
            const auto og = oracle.find_gate(g.name);
            if (!og || oracle.gate(*og).inputs.size() != g.inputs.size())
                throw InvalidArgument("oracle has no matching gate '" + g.name + "'");
            const auto& net = oracle.net_at(oracle.gate(*og).inputs[pin]).name;
            auto d = driver_of.find(net);
            if (d == driver_of.end())
                throw InvalidArgument("oracle net '" + net + "' is not a driver stub");
            auto& slot = key.driver_of_sink[static_cast<std::size_t>(s->second)];
            if (slot >= 0 && slot != d->second)
                throw InvalidArgument("sink stub " + std::to_string(s->second) + " reads two different oracle nets");
            slot = d->second;
        }
    }
    for (std::size_t s = 0; s < key.driver_of_sink.size(); ++s)
        if (key.driver_of_sink[s] < 0)
            throw InvalidArgument("sink stub " + std::to_string(s) + " has no reader");
    return key;
}

} // namespace f2fsec
