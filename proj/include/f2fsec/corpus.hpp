#pragma once

#include "f2fsec/netlist.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace f2fsec {

struct CorpusEntry {
    std::string name;
    std::string file;
    std::string suite;
    std::size_t inputs = 0;
    std::size_t outputs = 0;
    std::size_t gates = 0;
    std::size_t flops = 0;
    bool sat_feasible = false;
    std::string notes;
};

// $F2FSEC_CORPUS if set, else the directory baked in at build time.
std::string corpus_dir();
std::vector<CorpusEntry> corpus_manifest();
// Path of a bundled benchmark by name ("c432") or the argument unchanged when
// it already names a file.
std::string corpus_path(std::string_view name);
Netlist load_corpus(std::string_view name);

// c17, kept in the binary so tests run without the corpus directory.
std::string_view embedded_c17();

// n gates in a line from a single input; two-input functions also read the
// input at every stage.
std::string generate_chain(std::size_t n, GateType fn = GateType::Not);

// Two gates feeding each other. Not a valid combinational netlist on its own.
std::string generate_crosscoupled_pair();

} // namespace f2fsec
