#include "f2fsec/netlist.hpp"

#include "f2fsec/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <deque>
#include <fstream>
#include <sstream>

namespace f2fsec {

namespace {

constexpr std::array<std::pair<std::string_view, GateType>, 10> kKeywords{{
    {"AND", GateType::And},
    {"NAND", GateType::Nand},
    {"OR", GateType::Or},
    {"NOR", GateType::Nor},
    {"XOR", GateType::Xor},
    {"XNOR", GateType::Xnor},
    {"NOT", GateType::Not},
    {"BUFF", GateType::Buf},
    {"BUF", GateType::Buf},
    {"DFF", GateType::Dff},
}};

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

bool valid_identifier(std::string_view s)
{
    if (s.empty())
        return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '[' || c == ']'
               || c == '$' || c == '/' || c == '\\' || c == '-';
    });
}

// Splits "KEYWORD(a, b, c)" into keyword and argument list.
bool split_call(std::string_view text, std::string_view& keyword, std::vector<std::string_view>& args)
{
    const auto open = text.find('(');
    const auto close = text.rfind(')');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open
        || !trim(text.substr(close + 1)).empty())
        return false;
    keyword = trim(text.substr(0, open));
    args.clear();
    std::string_view inner = text.substr(open + 1, close - open - 1);
    if (trim(inner).empty())
        return true;
    while (true) {
        const auto comma = inner.find(',');
        args.push_back(trim(inner.substr(0, comma)));
        if (comma == std::string_view::npos)
            break;
        inner.remove_prefix(comma + 1);
    }
    return true;
}

std::string upper(std::string_view s)
{
    std::string out(s);
    for (auto& c : out)
        c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

} // namespace

std::string_view to_string(GateType type)
{
    switch (type) {
    case GateType::And: return "AND";
    case GateType::Nand: return "NAND";
    case GateType::Or: return "OR";
    case GateType::Nor: return "NOR";
    case GateType::Xor: return "XOR";
    case GateType::Xnor: return "XNOR";
    case GateType::Not: return "NOT";
    case GateType::Buf: return "BUFF";
    case GateType::Dff: return "DFF";
    }
    return "?";
}

std::optional<GateType> parse_gate_type(std::string_view keyword)
{
    const std::string key = upper(keyword);
    for (const auto& [name, type] : kKeywords)
        if (name == key)
            return type;
    return std::nullopt;
}

NetId Netlist::net(std::string_view name)
{
    if (auto it = by_name_.find(std::string(name)); it != by_name_.end())
        return it->second;
    const auto id = static_cast<NetId>(nets_.size());
    nets_.push_back(Net{std::string(name), kNoGate, false, {}});
    by_name_.emplace(std::string(name), id);
    return id;
}

std::optional<NetId> Netlist::find_net(std::string_view name) const
{
    if (auto it = by_name_.find(std::string(name)); it != by_name_.end())
        return it->second;
    return std::nullopt;
}

std::optional<GateId> Netlist::find_gate(std::string_view name) const
{
    const auto id = find_net(name);
    if (!id)
        return std::nullopt;
    const GateId driver = net_at(*id).driver;
    if (driver == kNoGate)
        return std::nullopt;
    return driver;
}

NetId Netlist::add_input(std::string_view name)
{
    const NetId id = net(name);
    auto& n = nets_[static_cast<std::size_t>(id)];
    if (n.is_input || n.driver != kNoGate)
        throw ParseError("duplicate definition of '" + n.name + "'", 0);
    n.is_input = true;
    inputs_.push_back(id);
    return id;
}

void Netlist::add_output(NetId net)
{
    outputs_.push_back(net);
    if (output_flag_.size() <= static_cast<std::size_t>(net))
        output_flag_.resize(static_cast<std::size_t>(net) + 1, 0);
    output_flag_[static_cast<std::size_t>(net)] = 1;
}

GateId Netlist::add_gate(GateType type, NetId output, std::vector<NetId> inputs)
{
    if (type == GateType::Dff)
        throw InvalidArgument("DFF is not a combinational gate; use add_flop");
    auto& n = nets_[static_cast<std::size_t>(output)];
    if (n.is_input || n.driver != kNoGate)
        throw ParseError("duplicate definition of '" + n.name + "'", 0);
    const auto id = static_cast<GateId>(gates_.size());
    n.driver = id;
    gates_.push_back(Gate{type, output, std::move(inputs)});
    return id;
}

void Netlist::add_flop(NetId q, NetId d)
{
    auto& n = nets_[static_cast<std::size_t>(q)];
    if (n.is_input || n.driver != kNoGate)
        throw ParseError("duplicate definition of '" + n.name + "'", 0);
    n.is_input = true;
    inputs_.push_back(q);
    add_output(d);
    flops_.push_back(Flop{q, d});
}

void Netlist::finish()
{
    for (auto& n : nets_)
        n.sinks.clear();
    for (std::size_t g = 0; g < gates_.size(); ++g)
        for (NetId in : gates_[g].inputs)
            nets_[static_cast<std::size_t>(in)].sinks.push_back(static_cast<GateId>(g));
    for (const auto& n : nets_)
        if (!n.is_input && n.driver == kNoGate)
            throw ParseError("undefined signal '" + n.name + "'", 0);
    output_flag_.resize(nets_.size(), 0);
}

bool Netlist::is_output(NetId net) const
{
    return static_cast<std::size_t>(net) < output_flag_.size() && output_flag_[static_cast<std::size_t>(net)] != 0;
}

Netlist parse_bench(std::string_view text, std::string name)
{
    Netlist netlist(std::move(name));
    std::unordered_map<std::string, int> defined_at;
    std::unordered_map<std::string, int> first_use;
    std::vector<std::pair<std::string, int>> output_names;
    std::vector<std::tuple<std::string, std::string, int>> flops;

    auto use = [&](std::string_view sig, int line) {
        if (!valid_identifier(sig))
            throw ParseError("malformed signal name '" + std::string(sig) + "'", line);
        first_use.emplace(std::string(sig), line);
        return netlist.net(sig);
    };
    auto define = [&](std::string_view sig, int line) {
        if (!valid_identifier(sig))
            throw ParseError("malformed signal name '" + std::string(sig) + "'", line);
        auto [it, inserted] = defined_at.emplace(std::string(sig), line);
        if (!inserted)
            throw ParseError("duplicate definition of '" + std::string(sig) + "' (first defined on line "
                                 + std::to_string(it->second) + ")",
                             line);
    };

    int line_no = 0;
    std::size_t pos = 0;
    std::string_view keyword;
    std::vector<std::string_view> args;
    while (pos <= text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos)
            eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            if (!split_call(line, keyword, args) || args.size() != 1)
                throw ParseError("syntax error: '" + std::string(line) + "'", line_no);
            const std::string key = upper(keyword);
            if (key == "INPUT") {
                define(args[0], line_no);
                netlist.add_input(args[0]);
            } else if (key == "OUTPUT") {
                use(args[0], line_no);
                output_names.emplace_back(std::string(args[0]), line_no);
            } else {
                throw ParseError("syntax error: unknown declaration '" + std::string(keyword) + "'", line_no);
            }
            continue;
        }

        const std::string_view lhs = trim(line.substr(0, eq));
        if (!split_call(trim(line.substr(eq + 1)), keyword, args))
            throw ParseError("syntax error: '" + std::string(line) + "'", line_no);
        const auto type = parse_gate_type(keyword);
        if (!type)
            throw ParseError("unknown cell type '" + std::string(keyword) + "'", line_no);
        const bool unary = *type == GateType::Not || *type == GateType::Buf || *type == GateType::Dff;
        if (args.empty() || (unary && args.size() != 1))
            throw ParseError("wrong number of inputs for " + std::string(to_string(*type)), line_no);
        define(lhs, line_no);
        const NetId out = netlist.net(lhs);
        if (*type == GateType::Dff) {
            use(args[0], line_no);
            flops.emplace_back(std::string(lhs), std::string(args[0]), line_no);
            continue;
        }
        std::vector<NetId> ins;
        ins.reserve(args.size());
        for (auto a : args)
            ins.push_back(use(a, line_no));
        netlist.add_gate(*type, out, std::move(ins));
    }

    for (const auto& [sig, line] : first_use)
        if (!defined_at.contains(sig))
            throw ParseError("undefined signal '" + sig + "'", line);
    if (netlist.inputs().empty() && flops.empty())
        throw ParseError("netlist declares no INPUT", 0);
    if (output_names.empty() && flops.empty())
        throw ParseError("netlist declares no OUTPUT", 0);

    for (const auto& [sig, line] : output_names)
        netlist.add_output(*netlist.find_net(sig));
    for (const auto& [q, d, line] : flops)
        netlist.add_flop(*netlist.find_net(q), *netlist.find_net(d));
    netlist.finish();
    return netlist;
}

Netlist read_bench_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    std::string name = path;
    if (auto slash = name.find_last_of('/'); slash != std::string::npos)
        name = name.substr(slash + 1);
    if (auto dot = name.rfind('.'); dot != std::string::npos)
        name = name.substr(0, dot);
    return parse_bench(buffer.str(), name);
}

std::string write_bench(const Netlist& netlist)
{
    std::ostringstream out;
    if (!netlist.name().empty())
        out << "# " << netlist.name() << '\n';
    const auto inputs = netlist.inputs();
    const auto outputs = netlist.outputs();
    for (std::size_t i = 0; i < netlist.primary_input_count(); ++i)
        out << "INPUT(" << netlist.net_at(inputs[i]).name << ")\n";
    for (std::size_t i = 0; i < netlist.primary_output_count(); ++i)
        out << "OUTPUT(" << netlist.net_at(outputs[i]).name << ")\n";
    for (const auto& f : netlist.flops())
        out << netlist.net_at(f.q).name << " = DFF(" << netlist.net_at(f.d).name << ")\n";
    for (const auto& g : netlist.gates()) {
        out << netlist.net_at(g.output).name << " = " << to_string(g.type) << '(';
        for (std::size_t i = 0; i < g.inputs.size(); ++i)
            out << (i ? ", " : "") << netlist.net_at(g.inputs[i]).name;
        out << ")\n";
    }
    return out.str();
}

Levelization levelize(const Netlist& netlist)
{
    const std::size_t n = netlist.gate_count();
    Levelization result;
    result.level.assign(n, 0);
    result.order.reserve(n);
    std::vector<int> pending(n, 0);
    for (std::size_t g = 0; g < n; ++g)
        for (NetId in : netlist.gate(static_cast<GateId>(g)).inputs)
            if (netlist.net_at(in).driver != kNoGate)
                ++pending[g];

    std::deque<GateId> ready;
    for (std::size_t g = 0; g < n; ++g)
        if (pending[g] == 0)
            ready.push_back(static_cast<GateId>(g));
    while (!ready.empty()) {
        const GateId g = ready.front();
        ready.pop_front();
        int lvl = 0;
        for (NetId in : netlist.gate(g).inputs)
            if (const GateId d = netlist.net_at(in).driver; d != kNoGate)
                lvl = std::max(lvl, result.level[static_cast<std::size_t>(d)]);
        result.level[static_cast<std::size_t>(g)] = lvl + 1;
        result.depth = std::max(result.depth, lvl + 1);
        result.order.push_back(g);
        for (GateId s : netlist.net_at(netlist.gate(g).output).sinks)
            if (--pending[static_cast<std::size_t>(s)] == 0)
                ready.push_back(s);
    }
    if (result.order.size() == n)
        return result;

    // Walk backwards through unresolved fanins until a gate repeats.
    GateId g = kNoGate;
    for (std::size_t i = 0; i < n && g == kNoGate; ++i)
        if (pending[i] > 0)
            g = static_cast<GateId>(i);
    std::vector<std::uint8_t> seen(n, 0);
    while (!seen[static_cast<std::size_t>(g)]) {
        seen[static_cast<std::size_t>(g)] = 1;
        for (NetId in : netlist.gate(g).inputs) {
            const GateId d = netlist.net_at(in).driver;
            if (d != kNoGate && pending[static_cast<std::size_t>(d)] > 0) {
                g = d;
                break;
            }
        }
    }
    throw CycleError(netlist.gate_name(g));
}

std::uint64_t evaluate_gate_words(GateType type, std::span<const std::uint64_t> in)
{
    std::uint64_t acc = in[0];
    switch (type) {
    case GateType::And:
    case GateType::Nand:
        for (std::size_t i = 1; i < in.size(); ++i)
            acc &= in[i];
        return type == GateType::And ? acc : ~acc;
    case GateType::Or:
    case GateType::Nor:
        for (std::size_t i = 1; i < in.size(); ++i)
            acc |= in[i];
        return type == GateType::Or ? acc : ~acc;
    case GateType::Xor:
    case GateType::Xnor:
        for (std::size_t i = 1; i < in.size(); ++i)
            acc ^= in[i];
        return type == GateType::Xor ? acc : ~acc;
    case GateType::Not:
        return ~acc;
    case GateType::Buf:
        return acc;
    case GateType::Dff:
        break;
    }
    throw InvalidArgument("DFF cannot be evaluated combinationally");
}

bool evaluate_gate(GateType type, std::span<const bool> inputs)
{
    std::vector<std::uint64_t> words(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i)
        words[i] = inputs[i] ? 1 : 0;
    return (evaluate_gate_words(type, words) & 1) != 0;
}

Simulator::Simulator(const Netlist& netlist) : netlist_(&netlist), levels_(levelize(netlist)) {}

std::vector<std::uint64_t> Simulator::run(std::span<const std::uint64_t> input_words) const
{
    const auto& n = *netlist_;
    if (input_words.size() != n.input_count())
        throw InvalidArgument("pattern width " + std::to_string(input_words.size()) + " does not match "
                              + std::to_string(n.input_count()) + " inputs");
    std::vector<std::uint64_t> value(n.nets().size(), 0);
    for (std::size_t i = 0; i < input_words.size(); ++i)
        value[static_cast<std::size_t>(n.inputs()[i])] = input_words[i];
    std::vector<std::uint64_t> scratch;
    for (GateId g : levels_.order) {
        const auto& gate = n.gate(g);
        scratch.clear();
        for (NetId in : gate.inputs)
            scratch.push_back(value[static_cast<std::size_t>(in)]);
        value[static_cast<std::size_t>(gate.output)] = evaluate_gate_words(gate.type, scratch);
    }
    std::vector<std::uint64_t> out;
    out.reserve(n.output_count());
    for (NetId o : n.outputs())
        out.push_back(value[static_cast<std::size_t>(o)]);
    return out;
}

Response Simulator::run(const Pattern& pattern) const
{
    std::vector<std::uint64_t> words(pattern.size());
    for (std::size_t i = 0; i < pattern.size(); ++i)
        words[i] = pattern[i] ? 1 : 0;
    const auto out = run(words);
    Response response(out.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        response[i] = (out[i] & 1) != 0;
    return response;
}

Response simulate(const Netlist& netlist, const Pattern& pattern)
{
    return Simulator(netlist).run(pattern);
}

} // namespace f2fsec
