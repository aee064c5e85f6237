#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace f2fsec {

enum class GateType : std::uint8_t { And, Nand, Or, Nor, Xor, Xnor, Not, Buf, Dff };

std::string_view to_string(GateType type);
std::optional<GateType> parse_gate_type(std::string_view keyword);

using NetId = std::int32_t;
using GateId = std::int32_t;
inline constexpr GateId kNoGate = -1;

struct Gate {
    GateType type;
    NetId output;
    std::vector<NetId> inputs;
};

struct Net {
    std::string name;
    GateId driver = kNoGate; // kNoGate for (pseudo) primary inputs
    bool is_input = false;
    std::vector<GateId> sinks;
};

// A register cut at its boundary: q is exposed as a pseudo primary input and
// d as a pseudo primary output.
struct Flop {
    NetId q;
    NetId d;
};

// Gate-level netlist. Every gate drives exactly one net, named after the gate,
// so a gate is identified by its output net name. Construction goes through
// the add_* builders; once finish() succeeds the netlist is treated as
// immutable.
class Netlist {
public:
    Netlist() = default;
    explicit Netlist(std::string name) : name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }
    void set_name(std::string name) { name_ = std::move(name); }

    NetId net(std::string_view name);
    std::optional<NetId> find_net(std::string_view name) const;

    NetId add_input(std::string_view name);
    void add_output(NetId net);
    GateId add_gate(GateType type, NetId output, std::vector<NetId> inputs);
    void add_flop(NetId q, NetId d);

    // Fills in sink lists and checks that every net is driven. Throws
    // ParseError naming the first undriven net.
    void finish();

    std::span<const Gate> gates() const noexcept { return gates_; }
    std::span<const Net> nets() const noexcept { return nets_; }
    std::span<const NetId> inputs() const noexcept { return inputs_; }
    std::span<const NetId> outputs() const noexcept { return outputs_; }
    std::span<const Flop> flops() const noexcept { return flops_; }

    const Gate& gate(GateId id) const { return gates_[static_cast<std::size_t>(id)]; }
    const Net& net_at(NetId id) const { return nets_[static_cast<std::size_t>(id)]; }
    const std::string& gate_name(GateId id) const { return net_at(gate(id).output).name; }
    std::optional<GateId> find_gate(std::string_view name) const;

    std::size_t gate_count() const noexcept { return gates_.size(); }
    std::size_t input_count() const noexcept { return inputs_.size(); }
    std::size_t output_count() const noexcept { return outputs_.size(); }
    // Inputs declared with INPUT(); pseudo-inputs from flops follow them.
    std::size_t primary_input_count() const noexcept { return inputs_.size() - flops_.size(); }
    std::size_t primary_output_count() const noexcept { return outputs_.size() - flops_.size(); }

    // True when the net feeds a (pseudo) primary output.
    bool is_output(NetId net) const;

private:
    std::string name_;
    std::vector<Gate> gates_;
    std::vector<Net> nets_;
    std::vector<NetId> inputs_;
    std::vector<NetId> outputs_;
    std::vector<Flop> flops_;
    std::vector<std::uint8_t> output_flag_;
    std::unordered_map<std::string, NetId> by_name_;
};

// ISCAS .bench reader. DFFs are cut into pseudo-PI/PO pairs.
Netlist parse_bench(std::string_view text, std::string name = {});
Netlist read_bench_file(const std::string& path);
std::string write_bench(const Netlist& netlist);

struct Levelization {
    std::vector<GateId> order; // topological
    std::vector<int> level;    // per gate; inputs sit at level 0
    int depth = 0;
};

// Throws CycleError naming a gate on a cycle of the combinational core.
Levelization levelize(const Netlist& netlist);

using Pattern = std::vector<bool>;
using Response = std::vector<bool>;

bool evaluate_gate(GateType type, std::span<const bool> inputs);
std::uint64_t evaluate_gate_words(GateType type, std::span<const std::uint64_t> inputs);

// Levelized, 64-patterns-per-word evaluator. Holds no mutable state, so one
// instance may serve concurrent callers.
class Simulator {
public:
    explicit Simulator(const Netlist& netlist);

    const Netlist& netlist() const noexcept { return *netlist_; }

    // One word per input in netlist().inputs() order; one word per output.
    std::vector<std::uint64_t> run(std::span<const std::uint64_t> input_words) const;
    Response run(const Pattern& pattern) const;

private:
    const Netlist* netlist_;
    Levelization levels_;
};

Response simulate(const Netlist& netlist, const Pattern& pattern);

} // namespace f2fsec
