#pragma once

#include "f2fsec/cnf.hpp"
#include "f2fsec/public_view.hpp"

#include <optional>
#include <string>
#include <vector>

namespace f2fsec {

// One selector per boxed sink stub. Its value v (little-endian over `bits`
// key bits) picks options[v]; values >= options.size() are never admissible.
struct KeySelector {
    int sink;
    int box;
    std::vector<int> options; // driver stub ids in box slot order
    int first_bit;
    int bits;
    // Options excluded because the driver already depends on the sink
    // through a single tier.
    std::vector<std::uint8_t> forbidden;
};

enum class NodeKind : std::uint8_t { Input, Gate, Select };

struct KeyedNode {
    NodeKind kind;
    GateType type = GateType::Buf;
    std::string name;
    std::vector<int> fanins; // node ids; a Select lists its options' driver nodes
    int selector = -1;
};

// The merged two-tier netlist with every box sink replaced by a key-controlled
// multiplexer over its box's drivers.
struct KeyedCircuit {
    PublicView view;
    bool permutation_constraints = true;
    std::vector<KeySelector> selectors; // indexed by sink stub id
    int key_width = 0;

    std::vector<KeyedNode> nodes;
    std::vector<int> input_nodes;  // view.inputs order
    std::vector<int> output_nodes; // view.outputs order
    std::vector<std::uint8_t> in_key_cone;
    // Topological order over all selector options; nodes on or behind a
    // potential key-induced cycle are left out and listed in `unordered`.
    std::vector<int> order;
    std::vector<int> unordered;
};

// Throws InvalidArgument for full-mode views and for views with sinks outside
// any box (their pairing is not a finite keyed choice).
KeyedCircuit encode_keyed_circuit(const PublicView& view, bool permutation_constraints = true);

std::vector<bool> key_bits(const KeyedCircuit& c, const ConnectionKey& key);
// Nullopt when some selector value is out of range.
std::optional<ConnectionKey> decode_key(const KeyedCircuit& c, const std::vector<bool>& bits);
// Domain, plus one-to-one within each box when permutation constraints are on.
bool admissible(const KeyedCircuit& c, const std::vector<bool>& bits);

// A literal or a folded constant.
struct Value {
    bool constant = false;
    bool value = false;
    sat::Lit lit{};

    static Value of(bool b) { return Value{true, b, {}}; }
    static Value of(sat::Lit l) { return Value{false, false, l}; }
};

// Tseitin encoding of a keyed circuit with constant folding.
class CircuitEncoder {
public:
    CircuitEncoder(const KeyedCircuit& circuit, ClauseSink& sink) : c_(circuit), sink_(sink) {}

    // Fresh key variables with selector domain, permutation and loop clauses.
    std::vector<sat::Lit> new_key();
    std::vector<sat::Lit> new_inputs();

    // Encodes one copy. When `shared` is given, nodes outside the key cone
    // reuse its values instead of being re-encoded.
    std::vector<Value> encode(const std::vector<Value>& inputs, const std::vector<sat::Lit>& key,
                              const std::vector<Value>* shared = nullptr);

    // Clause forbidding selector `s` from taking `option`.
    void forbid(const std::vector<sat::Lit>& key, int selector, int option);
    // Clause requiring at least one of the listed selectors to differ from its value.
    void block(const std::vector<sat::Lit>& key, const std::vector<std::pair<int, int>>& choices);

    Value build(GateType type, const std::vector<Value>& ins);
    sat::Lit xor2(sat::Lit a, sat::Lit b);

private:
    void define(sat::Lit y, GateType type, const std::vector<Value>& ins);
    void define_select(sat::Lit y, const KeySelector& sel, const std::vector<Value>& opts,
                       const std::vector<sat::Lit>& key);
    // Appends literals whose disjunction says "selector != value".
    void differ_lits(const std::vector<sat::Lit>& key, const KeySelector& sel, int value,
                     std::vector<sat::Lit>& out) const;

    const KeyedCircuit& c_;
    ClauseSink& sink_;
};

// Miter of two keyed copies sharing inputs. The difference clause is guarded
// by `activate`; asserting it asks for a distinguishing input.
struct Miter {
    std::vector<sat::Lit> inputs;
    std::vector<sat::Lit> key_a;
    std::vector<sat::Lit> key_b;
    sat::Lit activate;
    bool has_difference = false; // false when no output depends on the key
};

Miter build_miter(const KeyedCircuit& c, ClauseSink& sink);
// Stand-alone miter formula with the activation literal asserted; inputs and
// key bits are named in the symbol table.
CnfFormula miter_cnf(const KeyedCircuit& c);

// Sinks on a combinational cycle created by the key, with their selector
// values; empty when the keyed netlist is acyclic.
std::vector<std::pair<int, int>> key_cycle(const KeyedCircuit& c, const ConnectionKey& key);

} // namespace f2fsec
