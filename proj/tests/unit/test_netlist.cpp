#include "fixtures.hpp"

#include "f2fsec/error.hpp"
#include "f2fsec/netlist.hpp"
#include "f2fsec/rng.hpp"

#include <doctest.h>

#include <array>
#include <set>

using namespace f2fsec;

namespace {

// c17 written out by hand.
std::array<bool, 2> c17_reference(bool n1, bool n2, bool n3, bool n6, bool n7)
{
    auto nand = [](bool a, bool b) { return !(a && b); };
    const bool n10 = nand(n1, n3);
    const bool n11 = nand(n3, n6);
    const bool n16 = nand(n2, n11);
    const bool n19 = nand(n11, n7);
    return {nand(n10, n16), nand(n16, n19)};
}

std::multiset<std::string> gate_signatures(const Netlist& n)
{
    std::multiset<std::string> out;
    for (const auto& g : n.gates()) {
        std::string s = std::string(to_string(g.type)) + ":" + n.net_at(g.output).name + "<";
        for (const NetId in : g.inputs)
            s += n.net_at(in).name + ",";
        out.insert(s);
    }
    return out;
}

} // namespace

TEST_CASE("c17 parses into six NAND gates")
{
    const Netlist n = parse_bench(embedded_c17(), "c17");
    CHECK(n.gate_count() == 6);
    CHECK(n.input_count() == 5);
    CHECK(n.output_count() == 2);
    for (const auto& g : n.gates())
        CHECK(g.type == GateType::Nand);
}

TEST_CASE("parse errors")
{
    CHECK_THROWS_AS(parse_bench(""), ParseError);
    CHECK_THROWS_AS(parse_bench("INPUT(a)\n"), ParseError);
    CHECK_THROWS_AS(parse_bench("INPUT(a)\nOUTPUT(b)\nb = FOO(a)\n"), ParseError);
    CHECK_THROWS_AS(parse_bench("INPUT(a)\nOUTPUT(b)\nb = NOT(c)\n"), ParseError);
    CHECK_THROWS_AS(parse_bench("INPUT(a)\nOUTPUT(b)\nb = NOT(a, a)\n"), ParseError);
    CHECK_THROWS_AS(parse_bench("INPUT(a)\nOUTPUT(b)\nb = NOT(a)\nb = BUFF(a)\n"), ParseError);
    CHECK_THROWS_AS(parse_bench("INPUT(a)\nOUTPUT(b)\nb = NOT(a\n"), ParseError);
    try {
        parse_bench("INPUT(a)\nOUTPUT(b)\n\nb = XYZ(a)\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 4);
    }
}

TEST_CASE("a DFF becomes a pseudo input/output pair")
{
    const Netlist n = parse_bench("INPUT(a)\nOUTPUT(y)\nq = DFF(d)\nd = AND(a, q)\ny = NOT(q)\n");
    CHECK(n.flops().size() == 1);
    CHECK(n.primary_input_count() == 1);
    CHECK(n.input_count() == 2);
    CHECK(n.primary_output_count() == 1);
    CHECK(n.output_count() == 2);
    CHECK(n.gate_count() == 2);
    CHECK_NOTHROW(levelize(n));
    CHECK(n.net_at(n.flops()[0].q).is_input);
    CHECK(n.is_output(n.flops()[0].d));
}

TEST_CASE("levelization")
{
    CHECK(levelize(parse_bench(embedded_c17())).depth == 3);
    CHECK(levelize(parse_bench("INPUT(a)\nOUTPUT(y)\ny = NOT(a)\n")).depth == 1);
    CHECK_THROWS_AS(levelize(parse_bench(generate_crosscoupled_pair())), CycleError);

    const Netlist n = parse_bench(embedded_c17());
    const auto lv = levelize(n);
    std::vector<int> pos(n.gate_count());
    for (std::size_t i = 0; i < lv.order.size(); ++i)
        pos[static_cast<std::size_t>(lv.order[i])] = static_cast<int>(i);
    for (std::size_t g = 0; g < n.gate_count(); ++g)
        for (const NetId in : n.gate(static_cast<GateId>(g)).inputs)
            if (const GateId d = n.net_at(in).driver; d != kNoGate) {
                CHECK(pos[static_cast<std::size_t>(d)] < pos[g]);
                CHECK(lv.level[static_cast<std::size_t>(d)] < lv.level[g]);
            }
}

TEST_CASE("c17 simulation matches the hand-written equations on all 32 patterns")
{
    const Netlist n = parse_bench(embedded_c17());
    const Simulator sim(n);
    for (int v = 0; v < 32; ++v) {
        Pattern p(5);
        for (int i = 0; i < 5; ++i)
            p[static_cast<std::size_t>(i)] = (v >> i) & 1;
        const auto expect = c17_reference(p[0], p[1], p[2], p[3], p[4]);
        const Response r = sim.run(p);
        CHECK(r[0] == expect[0]);
        CHECK(r[1] == expect[1]);
    }
    const Response zero = simulate(n, Pattern(5, false));
    CHECK_FALSE(zero[0]);
    CHECK_FALSE(zero[1]);
}

TEST_CASE("a BUF chain is the identity")
{
    const Netlist n = parse_bench(generate_chain(7, GateType::Buf));
    CHECK(simulate(n, {false}) == Response{false});
    CHECK(simulate(n, {true}) == Response{true});
}

TEST_CASE("four-NAND XOR cell")
{
    const Netlist n = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\n"
                                  "m = NAND(a, b)\np = NAND(a, m)\nq = NAND(b, m)\ny = NAND(p, q)\n");
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            CHECK(simulate(n, {a != 0, b != 0})[0] == (a != b));
}

TEST_CASE("gate evaluation agrees between scalar and word forms")
{
    for (const GateType t : {GateType::And, GateType::Nand, GateType::Or, GateType::Nor, GateType::Xor,
                             GateType::Xnor}) {
        for (int v = 0; v < 8; ++v) {
            const bool in[3] = {(v & 1) != 0, (v & 2) != 0, (v & 4) != 0};
            const std::uint64_t words[3] = {in[0] ? ~0ULL : 0, in[1] ? ~0ULL : 0, in[2] ? ~0ULL : 0};
            const bool scalar = evaluate_gate(t, in);
            CHECK((evaluate_gate_words(t, words) == ~0ULL) == scalar);
            CHECK((evaluate_gate_words(t, words) == 0ULL) == !scalar);
        }
    }
}

TEST_CASE("word-parallel simulation agrees with pattern simulation")
{
    const Netlist n = load_corpus("c432");
    const Simulator sim(n);
    Rng rng(7);
    std::vector<std::uint64_t> words(n.input_count());
    for (auto& w : words)
        w = rng.next();
    const auto out = sim.run(words);
    for (int bit : {0, 17, 63}) {
        Pattern p(n.input_count());
        for (std::size_t i = 0; i < p.size(); ++i)
            p[i] = (words[i] >> bit) & 1;
        const Response r = sim.run(p);
        for (std::size_t o = 0; o < r.size(); ++o)
            CHECK(r[o] == (((out[o] >> bit) & 1) != 0));
    }
    CHECK(sim.run(words) == out);
}

TEST_CASE("write and re-parse gives the same gate graph")
{
    for (const char* name : {"c17", "c432", "c880"}) {
        const Netlist n = load_corpus(name);
        const Netlist back = parse_bench(write_bench(n), name);
        CHECK(gate_signatures(back) == gate_signatures(n));
        CHECK(back.input_count() == n.input_count());
        CHECK(back.output_count() == n.output_count());
    }
    const Netlist seq = parse_bench("INPUT(a)\nOUTPUT(y)\nq = DFF(d)\nd = AND(a, q)\ny = NOT(q)\n");
    const Netlist back = parse_bench(write_bench(seq));
    CHECK(back.flops().size() == 1);
    CHECK(gate_signatures(back) == gate_signatures(seq));
}

TEST_CASE("missing file raises an I/O error")
{
    CHECK_THROWS_AS(read_bench_file("/nonexistent/none.bench"), IoError);
}
