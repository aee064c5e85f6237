#include "f2fsec/corpus.hpp"

#include "f2fsec/error.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#ifndef F2FSEC_CORPUS_DIR
#define F2FSEC_CORPUS_DIR "corpus"
#endif

namespace f2fsec {

std::string corpus_dir()
{
    if (const char* env = std::getenv("F2FSEC_CORPUS"); env && *env)
        return env;
    return F2FSEC_CORPUS_DIR;
}

std::vector<CorpusEntry> corpus_manifest()
{
    const auto path = std::filesystem::path(corpus_dir()) / "manifest.json";
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
    std::vector<CorpusEntry> out;
    for (const auto& e : j.at("entries"))
        out.push_back(CorpusEntry{e.at("name"), e.at("file"), e.at("suite"), e.at("inputs"), e.at("outputs"),
                                  e.at("gates"), e.at("flops"), e.at("sat_feasible"), e.value("notes", "")});
    return out;
}

std::string corpus_path(std::string_view name)
{
    if (std::filesystem::exists(name))
        return std::string(name);
    auto p = std::filesystem::path(corpus_dir()) / name;
    if (!p.has_extension())
        p += ".bench";
    return p.string();
}

Netlist load_corpus(std::string_view name)
{
    if (name == "c17" && !std::filesystem::exists(corpus_path(name)))
        return parse_bench(embedded_c17(), "c17");
    return read_bench_file(corpus_path(name));
}

std::string_view embedded_c17()
{
    return "# c17\n"
           "INPUT(N1)\nINPUT(N2)\nINPUT(N3)\nINPUT(N6)\nINPUT(N7)\n"
           "OUTPUT(N22)\nOUTPUT(N23)\n"
           "N10 = NAND(N1, N3)\n"
           "N11 = NAND(N3, N6)\n"
           "N16 = NAND(N2, N11)\n"
           "N19 = NAND(N11, N7)\n"
           "N22 = NAND(N10, N16)\n"
           "N23 = NAND(N16, N19)\n";
}

std::string generate_chain(std::size_t n, GateType fn)
{
    if (n == 0)
        throw InvalidArgument("chain needs at least one gate");
    if (fn == GateType::Dff)
        throw InvalidArgument("chain gates must be combinational");
    const bool unary = fn == GateType::Not || fn == GateType::Buf;
    std::string out = "# chain of " + std::to_string(n) + "\nINPUT(a)\nOUTPUT(g" + std::to_string(n) + ")\n";
    for (std::size_t i = 1; i <= n; ++i) {
        const std::string prev = i == 1 ? "a" : "g" + std::to_string(i - 1);
        out += "g" + std::to_string(i) + " = " + std::string(to_string(fn)) + "(" + prev;
        if (!unary)
            out += ", a";
        out += ")\n";
    }
    return out;
}

std::string generate_crosscoupled_pair()
{
    return "# cross-coupled pair\n"
           "INPUT(a)\n"
           "OUTPUT(g1)\n"
           "g1 = NAND(a, g2)\n"
           "g2 = NOT(g1)\n";
}

} // namespace f2fsec
