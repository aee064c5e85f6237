#include "f2fsec/keyed_circuit.hpp"

#include "f2fsec/error.hpp"
#include "f2fsec/proximity_attack.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

namespace f2fsec {

using sat::Lit;

namespace {

int ceil_log2(std::size_t k)
{
    int bits = 0;
    while ((std::size_t{1} << bits) < k)
        ++bits;
    return bits;
}

std::vector<std::vector<int>> fanouts(const KeyedCircuit& c)
{
    std::vector<std::vector<int>> out(c.nodes.size());
    for (std::size_t n = 0; n < c.nodes.size(); ++n)
        for (int f : c.nodes[n].fanins)
            out[static_cast<std::size_t>(f)].push_back(static_cast<int>(n));
    return out;
}

} // namespace

KeyedCircuit encode_keyed_circuit(const PublicView& view, bool permutation_constraints)
{
    if (view.mode != ViewMode::Conservative)
        throw InvalidArgument("SAT encoding needs a conservative view with known switchbox membership");
    const auto sink_box = view.sink_box();
    for (std::size_t s = 0; s < sink_box.size(); ++s)
        if (!sink_box[s])
            throw InvalidArgument("sink stub " + std::to_string(s) + " is outside any switchbox");

    KeyedCircuit c;
    c.view = view;
    c.permutation_constraints = permutation_constraints;

    StubReachability reach(view);
    c.selectors.resize(view.sinks.size());
    for (std::size_t s = 0; s < view.sinks.size(); ++s) {
        const auto& box = view.boxes[static_cast<std::size_t>(*sink_box[s])];
        KeySelector sel{static_cast<int>(s), box.id, box.drivers, c.key_width, ceil_log2(box.drivers.size()), {}};
        for (int d : sel.options)
            sel.forbidden.push_back(reach.reaches(static_cast<int>(s), d));
        c.key_width += sel.bits;
        c.selectors[s] = std::move(sel);
    }

    std::unordered_map<std::string, int> node_of;
    auto add_node = [&](KeyedNode node) {
        const int id = static_cast<int>(c.nodes.size());
        if (!node_of.emplace(node.name, id).second)
            throw InvalidArgument("view defines '" + node.name + "' twice");
        c.nodes.push_back(std::move(node));
        return id;
    };
    for (const auto& name : view.inputs)
        c.input_nodes.push_back(add_node(KeyedNode{NodeKind::Input, GateType::Buf, name, {}, -1}));
    for (const auto& g : view.gates)
        add_node(KeyedNode{NodeKind::Gate, g.type, g.name, {}, -1});
    for (const auto& s : view.sinks)
        add_node(KeyedNode{NodeKind::Select, GateType::Buf, s.net, {}, s.id});

    auto lookup = [&](const std::string& name) {
        auto it = node_of.find(name);
        if (it == node_of.end())
            throw InvalidArgument("view references undefined net '" + name + "'");
        return it->second;
    };
    for (std::size_t g = 0; g < view.gates.size(); ++g) {
        auto& node = c.nodes[c.input_nodes.size() + g];
        for (const auto& in : view.gates[g].inputs)
            node.fanins.push_back(lookup(in));
    }
    for (const auto& s : view.sinks) {
        auto& node = c.nodes[static_cast<std::size_t>(lookup(s.net))];
        for (int d : c.selectors[static_cast<std::size_t>(s.id)].options)
            node.fanins.push_back(lookup(view.drivers[static_cast<std::size_t>(d)].net));
    }
    for (const auto& name : view.outputs)
        c.output_nodes.push_back(lookup(name));

    const auto fo = fanouts(c);
    c.in_key_cone.assign(c.nodes.size(), 0);
    std::deque<int> queue;
    for (std::size_t n = 0; n < c.nodes.size(); ++n)
        if (c.nodes[n].kind == NodeKind::Select) {
            c.in_key_cone[n] = 1;
            queue.push_back(static_cast<int>(n));
        }
    while (!queue.empty()) {
        const int n = queue.front();
        queue.pop_front();
        for (int f : fo[static_cast<std::size_t>(n)])
            if (!c.in_key_cone[static_cast<std::size_t>(f)]) {
                c.in_key_cone[static_cast<std::size_t>(f)] = 1;
                queue.push_back(f);
            }
    }

    std::vector<int> pending(c.nodes.size());
    for (std::size_t n = 0; n < c.nodes.size(); ++n) {
        pending[n] = static_cast<int>(c.nodes[n].fanins.size());
        if (pending[n] == 0)
            queue.push_back(static_cast<int>(n));
    }
    while (!queue.empty()) {
        const int n = queue.front();
        queue.pop_front();
        c.order.push_back(n);
        for (int f : fo[static_cast<std::size_t>(n)])
            if (--pending[static_cast<std::size_t>(f)] == 0)
                queue.push_back(f);
    }
    for (std::size_t n = 0; n < c.nodes.size(); ++n)
        if (pending[n] > 0)
            c.unordered.push_back(static_cast<int>(n));
    return c;
}

std::vector<bool> key_bits(const KeyedCircuit& c, const ConnectionKey& key)
{
    if (key.driver_of_sink.size() != c.selectors.size())
        throw KeyError("key covers " + std::to_string(key.driver_of_sink.size()) + " sinks, circuit has "
                       + std::to_string(c.selectors.size()));
    std::vector<bool> bits(static_cast<std::size_t>(c.key_width), false);
    for (const auto& sel : c.selectors) {
        const int d = key.driver_of_sink[static_cast<std::size_t>(sel.sink)];
        auto it = std::find(sel.options.begin(), sel.options.end(), d);
        if (it == sel.options.end())
            throw KeyError("sink " + std::to_string(sel.sink) + " maps outside its switchbox");
        const auto v = static_cast<std::size_t>(it - sel.options.begin());
        for (int i = 0; i < sel.bits; ++i)
            bits[static_cast<std::size_t>(sel.first_bit + i)] = (v >> i) & 1;
    }
    return bits;
}

std::optional<ConnectionKey> decode_key(const KeyedCircuit& c, const std::vector<bool>& bits)
{
    if (bits.size() != static_cast<std::size_t>(c.key_width))
        throw KeyError("expected " + std::to_string(c.key_width) + " key bits, got " + std::to_string(bits.size()));
    ConnectionKey key{std::vector<int>(c.selectors.size(), -1)};
    for (const auto& sel : c.selectors) {
        std::size_t v = 0;
        for (int i = 0; i < sel.bits; ++i)
            v |= static_cast<std::size_t>(bits[static_cast<std::size_t>(sel.first_bit + i)]) << i;
        if (v >= sel.options.size())
            return std::nullopt;
        key.driver_of_sink[static_cast<std::size_t>(sel.sink)] = sel.options[v];
    }
    return key;
}

bool admissible(const KeyedCircuit& c, const std::vector<bool>& bits)
{
    const auto key = decode_key(c, bits);
    if (!key)
        return false;
    if (!c.permutation_constraints)
        return true;
    std::vector<int> uses(c.view.drivers.size(), 0);
    for (int d : key->driver_of_sink)
        if (++uses[static_cast<std::size_t>(d)] > 1)
            return false;
    return true;
}

void CircuitEncoder::differ_lits(const std::vector<Lit>& key, const KeySelector& sel, int value,
                                 std::vector<Lit>& out) const
{
    for (int i = 0; i < sel.bits; ++i) {
        const Lit k = key[static_cast<std::size_t>(sel.first_bit + i)];
        out.push_back(((value >> i) & 1) ? ~k : k);
    }
}

void CircuitEncoder::forbid(const std::vector<Lit>& key, int selector, int option)
{
    std::vector<Lit> clause;
    differ_lits(key, c_.selectors[static_cast<std::size_t>(selector)], option, clause);
    sink_.add_clause(clause);
}

void CircuitEncoder::block(const std::vector<Lit>& key, const std::vector<std::pair<int, int>>& choices)
{
    std::vector<Lit> clause;
    for (const auto& [s, v] : choices)
        differ_lits(key, c_.selectors[static_cast<std::size_t>(s)], v, clause);
    sink_.add_clause(clause);
}

std::vector<Lit> CircuitEncoder::new_key()
{
    std::vector<Lit> key;
    key.reserve(static_cast<std::size_t>(c_.key_width));
    for (int i = 0; i < c_.key_width; ++i)
        key.push_back(Lit::make(sink_.new_var()));

    std::unordered_map<int, std::vector<int>> members;
    for (const auto& sel : c_.selectors) {
        const int k = static_cast<int>(sel.options.size());
        for (int v = k; v < (1 << sel.bits); ++v)
            forbid(key, sel.sink, v);
        for (int j = 0; j < k; ++j)
            if (sel.forbidden[static_cast<std::size_t>(j)])
                forbid(key, sel.sink, j);
        members[sel.box].push_back(sel.sink);
    }
    if (c_.permutation_constraints) {
        std::vector<int> boxes;
        for (const auto& [b, _] : members)
            boxes.push_back(b);
        std::sort(boxes.begin(), boxes.end());
        for (int b : boxes) {
            const auto& sinks = members[b];
            for (std::size_t i = 0; i < sinks.size(); ++i)
                for (std::size_t j = i + 1; j < sinks.size(); ++j) {
                    const int k = static_cast<int>(c_.selectors[static_cast<std::size_t>(sinks[i])].options.size());
                    for (int v = 0; v < k; ++v)
                        block(key, {{sinks[i], v}, {sinks[j], v}});
                }
        }
    }
    return key;
}

std::vector<Lit> CircuitEncoder::new_inputs()
{
    std::vector<Lit> in;
    for (std::size_t i = 0; i < c_.input_nodes.size(); ++i)
        in.push_back(Lit::make(sink_.new_var()));
    return in;
}

Lit CircuitEncoder::xor2(Lit a, Lit b)
{
    const Lit y = Lit::make(sink_.new_var());
    sink_.add_clause({~y, a, b});
    sink_.add_clause({~y, ~a, ~b});
    sink_.add_clause({y, ~a, b});
    sink_.add_clause({y, a, ~b});
    return y;
}

Value CircuitEncoder::build(GateType type, const std::vector<Value>& ins)
{
    switch (type) {
    case GateType::Buf:
    case GateType::Dff:
        return ins.at(0);
    case GateType::Not: {
        const Value v = ins.at(0);
        return v.constant ? Value::of(!v.value) : Value::of(~v.lit);
    }
    case GateType::Xor:
    case GateType::Xnor: {
        bool parity = type == GateType::Xnor;
        std::vector<Lit> lits;
        for (const auto& v : ins) {
            if (v.constant)
                parity ^= v.value;
            else
                lits.push_back(v.lit);
        }
        std::sort(lits.begin(), lits.end(), [](Lit a, Lit b) { return a.x < b.x; });
        std::vector<Lit> kept;
        for (const Lit l : lits) {
            if (!kept.empty() && kept.back().var() == l.var()) {
                parity ^= kept.back() != l;
                kept.pop_back();
            } else {
                kept.push_back(l);
            }
        }
        if (kept.empty())
            return Value::of(parity);
        Lit acc = kept[0];
        for (std::size_t i = 1; i < kept.size(); ++i)
            acc = xor2(acc, kept[i]);
        return Value::of(parity ? ~acc : acc);
    }
    default:
        break;
    }
    const bool is_and = type == GateType::And || type == GateType::Nand;
    const bool invert = type == GateType::Nand || type == GateType::Nor;
    const bool controlling = !is_and;
    std::vector<Lit> lits;
    for (const auto& v : ins) {
        if (v.constant) {
            if (v.value == controlling)
                return Value::of(controlling != invert);
        } else {
            lits.push_back(v.lit);
        }
    }
    std::sort(lits.begin(), lits.end(), [](Lit a, Lit b) { return a.x < b.x; });
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    for (std::size_t i = 1; i < lits.size(); ++i)
        if (lits[i].var() == lits[i - 1].var())
            return Value::of(controlling != invert);
    if (lits.empty())
        return Value::of(!controlling != invert);
    if (lits.size() == 1)
        return Value::of(invert ? ~lits[0] : lits[0]);
    const Lit y = Lit::make(sink_.new_var());
    std::vector<Lit> big;
    // AND: y -> l_i, (l_1 & ... ) -> y. OR is the dual.
    const Lit yy = is_and ? y : ~y;
    for (const Lit l : lits) {
        sink_.add_clause({~yy, is_and ? l : ~l});
        big.push_back(is_and ? ~l : l);
    }
    big.push_back(yy);
    sink_.add_clause(big);
    return Value::of(invert ? ~y : y);
}

void CircuitEncoder::define(Lit y, GateType type, const std::vector<Value>& ins)
{
    const Value v = build(type, ins);
    if (v.constant) {
        sink_.add_clause({v.value ? y : ~y});
    } else {
        sink_.add_clause({~y, v.lit});
        sink_.add_clause({y, ~v.lit});
    }
}

void CircuitEncoder::define_select(Lit y, const KeySelector& sel, const std::vector<Value>& opts,
                                   const std::vector<Lit>& key)
{
    std::vector<Lit> clause;
    for (std::size_t j = 0; j < opts.size(); ++j) {
        const Value& o = opts[j];
        for (int polarity = 0; polarity < 2; ++polarity) {
            // polarity 0: option true -> y; polarity 1: option false -> !y
            clause.clear();
            differ_lits(key, sel, static_cast<int>(j), clause);
            if (o.constant) {
                if (o.value != (polarity == 0))
                    continue;
            } else {
                clause.push_back(polarity == 0 ? ~o.lit : o.lit);
            }
            clause.push_back(polarity == 0 ? y : ~y);
            sink_.add_clause(clause);
        }
    }
}

std::vector<Value> CircuitEncoder::encode(const std::vector<Value>& inputs, const std::vector<Lit>& key,
                                          const std::vector<Value>* shared)
{
    if (inputs.size() != c_.input_nodes.size())
        throw InvalidArgument("input count does not match the keyed circuit");
    std::vector<Value> val(c_.nodes.size());
    std::vector<std::uint8_t> done(c_.nodes.size(), 0);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const auto n = static_cast<std::size_t>(c_.input_nodes[i]);
        val[n] = inputs[i];
        done[n] = 1;
    }
    if (shared)
        for (std::size_t n = 0; n < c_.nodes.size(); ++n)
            if (!c_.in_key_cone[n] && !done[n]) {
                val[n] = (*shared)[n];
                done[n] = 1;
            }

    std::vector<Value> ins;
    auto gather = [&](const KeyedNode& node) {
        ins.clear();
        for (int f : node.fanins)
            ins.push_back(val[static_cast<std::size_t>(f)]);
    };
    for (int id : c_.order) {
        const auto n = static_cast<std::size_t>(id);
        if (done[n])
            continue;
        const auto& node = c_.nodes[n];
        gather(node);
        if (node.kind == NodeKind::Gate) {
            val[n] = build(node.type, ins);
        } else if (ins.size() == 1) {
            val[n] = ins[0];
        } else {
            const Lit y = Lit::make(sink_.new_var());
            define_select(y, c_.selectors[static_cast<std::size_t>(node.selector)], ins, key);
            val[n] = Value::of(y);
        }
        done[n] = 1;
    }
    // Nodes a key could put on a cycle: give each a variable first, then
    // constrain it by its fanins.
    std::vector<int> todo;
    for (int id : c_.unordered)
        if (!done[static_cast<std::size_t>(id)]) {
            val[static_cast<std::size_t>(id)] = Value::of(Lit::make(sink_.new_var()));
            todo.push_back(id);
        }
    for (int id : todo) {
        const auto& node = c_.nodes[static_cast<std::size_t>(id)];
        gather(node);
        const Lit y = val[static_cast<std::size_t>(id)].lit;
        if (node.kind == NodeKind::Gate)
            define(y, node.type, ins);
        else
            define_select(y, c_.selectors[static_cast<std::size_t>(node.selector)], ins, key);
    }
    return val;
}

Miter build_miter(const KeyedCircuit& c, ClauseSink& sink)
{
    CircuitEncoder enc(c, sink);
    Miter m;
    m.inputs = enc.new_inputs();
    m.key_a = enc.new_key();
    m.key_b = enc.new_key();
    std::vector<Value> in;
    for (const Lit l : m.inputs)
        in.push_back(Value::of(l));
    const auto a = enc.encode(in, m.key_a);
    const auto b = enc.encode(in, m.key_b, &a);
    m.activate = Lit::make(sink.new_var());
    std::vector<Lit> clause{~m.activate};
    for (int o : c.output_nodes) {
        const auto n = static_cast<std::size_t>(o);
        if (!c.in_key_cone[n])
            continue;
        const Value d = enc.build(GateType::Xor, {a[n], b[n]});
        if (d.constant) {
            if (d.value) {
                clause.resize(1);
                m.has_difference = true;
                break;
            }
            continue;
        }
        clause.push_back(d.lit);
    }
    if (clause.size() > 1)
        m.has_difference = true;
    if (!(m.has_difference && clause.size() == 1))
        sink.add_clause(clause);
    return m;
}

CnfFormula miter_cnf(const KeyedCircuit& c)
{
    CnfFormula f;
    const Miter m = build_miter(c, f);
    f.add_clause({m.activate});
    for (std::size_t i = 0; i < m.inputs.size(); ++i)
        f.symbols.emplace_back(c.view.inputs[i], m.inputs[i].var() + 1);
    for (std::size_t i = 0; i < m.key_a.size(); ++i)
        f.symbols.emplace_back("key_a[" + std::to_string(i) + "]", m.key_a[i].var() + 1);
    for (std::size_t i = 0; i < m.key_b.size(); ++i)
        f.symbols.emplace_back("key_b[" + std::to_string(i) + "]", m.key_b[i].var() + 1);
    return f;
}

std::vector<std::pair<int, int>> key_cycle(const KeyedCircuit& c, const ConnectionKey& key)
{
    const auto fanin = [&](std::size_t n) -> std::vector<int> {
        const auto& node = c.nodes[n];
        if (node.kind != NodeKind::Select)
            return node.fanins;
        const auto& sel = c.selectors[static_cast<std::size_t>(node.selector)];
        const int d = key.driver_of_sink.at(static_cast<std::size_t>(sel.sink));
        const auto it = std::find(sel.options.begin(), sel.options.end(), d);
        if (it == sel.options.end())
            throw KeyError("sink " + std::to_string(sel.sink) + " maps outside its switchbox");
        return {node.fanins[static_cast<std::size_t>(it - sel.options.begin())]};
    };

    // Only nodes off the static order can sit on a key-induced cycle.
    std::vector<std::uint8_t> state(c.nodes.size(), 2); // 0 new, 1 on stack, 2 done
    for (int n : c.unordered)
        state[static_cast<std::size_t>(n)] = 0;
    struct Frame {
        std::size_t node;
        std::vector<int> next;
        std::size_t i;
    };
    for (int root : c.unordered) {
        if (state[static_cast<std::size_t>(root)])
            continue;
        std::vector<Frame> stack;
        stack.push_back(Frame{static_cast<std::size_t>(root), fanin(static_cast<std::size_t>(root)), 0});
        state[static_cast<std::size_t>(root)] = 1;
        while (!stack.empty()) {
            auto& top = stack.back();
            if (top.i == top.next.size()) {
                state[top.node] = 2;
                stack.pop_back();
                continue;
            }
            const auto f = static_cast<std::size_t>(top.next[top.i++]);
            if (state[f] == 2)
                continue;
            if (state[f] == 1) {
                std::vector<std::pair<int, int>> cycle;
                for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
                    const auto& node = c.nodes[it->node];
                    if (node.kind == NodeKind::Select) {
                        const auto& sel = c.selectors[static_cast<std::size_t>(node.selector)];
                        const int d = key.driver_of_sink[static_cast<std::size_t>(sel.sink)];
                        const auto v = std::find(sel.options.begin(), sel.options.end(), d) - sel.options.begin();
                        cycle.emplace_back(sel.sink, static_cast<int>(v));
                    }
                    if (it->node == f)
                        break;
                }
                if (cycle.empty())
                    throw InvalidArgument("view contains a combinational cycle through '" + c.nodes[f].name + "'");
                return cycle;
            }
            state[f] = 1;
            stack.push_back(Frame{f, fanin(f), 0});
        }
    }
    return {};
}

} // namespace f2fsec
