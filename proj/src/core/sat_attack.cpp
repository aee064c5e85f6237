#include "f2fsec/sat_attack.hpp"

#include "f2fsec/error.hpp"

#include <chrono>
#include <unordered_map>

namespace f2fsec {

using sat::Lit;

std::string_view to_string(SatOutcome outcome)
{
    return outcome == SatOutcome::KeyFound ? "key_found" : "timeout";
}

namespace {

class Oracle {
public:
    Oracle(const Netlist& oracle, const KeyedCircuit& c) : sim_(oracle)
    {
        std::unordered_map<std::string, std::size_t> view_input;
        for (std::size_t i = 0; i < c.view.inputs.size(); ++i)
            view_input.emplace(c.view.inputs[i], i);
        if (oracle.input_count() != c.view.inputs.size() || oracle.output_count() != c.view.outputs.size())
            throw InvalidArgument("oracle interface does not match the keyed circuit");
        for (const NetId in : oracle.inputs()) {
            auto it = view_input.find(oracle.net_at(in).name);
            if (it == view_input.end())
                throw InvalidArgument("oracle input '" + oracle.net_at(in).name + "' is not in the view");
            input_from_.push_back(it->second);
        }
        std::unordered_map<std::string, std::size_t> oracle_output;
        for (std::size_t o = 0; o < oracle.output_count(); ++o)
            oracle_output.emplace(oracle.net_at(oracle.outputs()[o]).name, o);
        for (const auto& name : c.view.outputs) {
            auto it = oracle_output.find(name);
            if (it == oracle_output.end())
                throw InvalidArgument("view output '" + name + "' is not an oracle output");
            output_at_.push_back(it->second);
        }
    }

    Response query(const Pattern& x) const
    {
        std::vector<std::uint64_t> words(input_from_.size());
        for (std::size_t i = 0; i < words.size(); ++i)
            words[i] = x[input_from_[i]] ? 1 : 0;
        const auto out = sim_.run(words);
        Response y(output_at_.size());
        for (std::size_t o = 0; o < y.size(); ++o)
            y[o] = out[output_at_[o]] & 1;
        return y;
    }

private:
    Simulator sim_;
    std::vector<std::size_t> input_from_;
    std::vector<std::size_t> output_at_;
};

std::vector<bool> read_key(const sat::Solver& s, const std::vector<Lit>& key)
{
    std::vector<bool> bits;
    bits.reserve(key.size());
    for (const Lit l : key)
        bits.push_back(s.model_value(l));
    return bits;
}

} // namespace

SatAttackResult run_sat_attack(const KeyedCircuit& c, const Netlist& oracle, const SatAttackOptions& options)
{
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    sat::Solver::Deadline deadline;
    if (options.timeout_seconds)
        deadline = start + std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(*options.timeout_seconds));

    const Oracle query(oracle, c);
    SatAttackResult result;
    auto& stats = result.stats;
    stats.key_width = c.key_width;

    sat::Solver solver;
    SolverSink sink(solver);
    CircuitEncoder enc(c, sink);
    const Miter m = build_miter(c, sink);

    auto finish = [&](SatOutcome outcome) {
        stats.outcome = outcome;
        stats.conflicts = solver.conflicts();
        stats.seconds = std::chrono::duration<double>(clock::now() - start).count();
        return result;
    };
    auto expired = [&] { return deadline && clock::now() > *deadline; };
    // Blocks the loop a key closes in both copies; false when the key is acyclic.
    auto block_if_cyclic = [&](const std::vector<bool>& bits) {
        const auto key = decode_key(c, bits);
        if (!key)
            throw AttackError("solver returned a selector value outside its domain");
        const auto cycle = key_cycle(c, *key);
        if (cycle.empty())
            return false;
        enc.block(m.key_a, cycle);
        enc.block(m.key_b, cycle);
        ++stats.cycles_blocked;
        return true;
    };

    while (m.has_difference) {
        if (expired())
            return finish(SatOutcome::Timeout);
        const Lit act[] = {m.activate};
        ++stats.solver_calls;
        const auto r = solver.solve(act, deadline);
        if (r == sat::Result::Unknown)
            return finish(SatOutcome::Timeout);
        if (r == sat::Result::Unsat)
            break;
        const bool cyclic_a = block_if_cyclic(read_key(solver, m.key_a));
        const bool cyclic_b = block_if_cyclic(read_key(solver, m.key_b));
        if (cyclic_a || cyclic_b)
            continue;

        Pattern x;
        for (const Lit l : m.inputs)
            x.push_back(solver.model_value(l));
        const Response y = query.query(x);
        ++stats.dips;
        std::vector<Value> in;
        for (const bool b : x)
            in.push_back(Value::of(b));
        for (const auto* key : {&m.key_a, &m.key_b}) {
            const auto vals = enc.encode(in, *key);
            for (std::size_t o = 0; o < c.output_nodes.size(); ++o) {
                const Value& v = vals[static_cast<std::size_t>(c.output_nodes[o])];
                if (v.constant) {
                    if (v.value != y[o])
                        throw InvalidArgument("output '" + c.view.outputs[o] + "' disagrees with the oracle for every key");
                } else {
                    sink.add_clause({y[o] ? v.lit : ~v.lit});
                }
            }
        }
        result.observations.emplace_back(std::move(x), y);
        if (options.max_dips && stats.dips >= options.max_dips)
            return finish(SatOutcome::Timeout);
    }

    while (true) {
        if (expired())
            return finish(SatOutcome::Timeout);
        const Lit off[] = {~m.activate};
        ++stats.solver_calls;
        const auto r = solver.solve(off, deadline);
        if (r == sat::Result::Unknown)
            return finish(SatOutcome::Timeout);
        if (r == sat::Result::Unsat)
            throw AttackError("no key is consistent with the oracle responses");
        const auto bits = read_key(solver, m.key_a);
        if (block_if_cyclic(bits))
            continue;
        result.key = decode_key(c, bits);
        return finish(SatOutcome::KeyFound);
    }
}

nlohmann::ordered_json to_json(const SatAttackStats& stats)
{
    return {{"outcome", to_string(stats.outcome)},
            {"dips", stats.dips},
            {"solver_calls", stats.solver_calls},
            {"cycles_blocked", stats.cycles_blocked},
            {"conflicts", stats.conflicts},
            {"key_bits", stats.key_width},
            {"seconds", stats.seconds}};
}

} // namespace f2fsec
