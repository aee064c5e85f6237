#include "f2fsec/cnf.hpp"

#include "f2fsec/error.hpp"

#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

namespace f2fsec {

void CnfFormula::add_clause(std::span<const sat::Lit> lits)
{
    std::vector<int> c;
    c.reserve(lits.size());
    for (const auto l : lits)
        c.push_back(l.negated() ? -(l.var() + 1) : l.var() + 1);
    clauses.push_back(std::move(c));
}

void export_dimacs(const CnfFormula& f, std::ostream& out)
{
    for (const auto& [name, var] : f.symbols)
        out << "c " << name << ' ' << var << '\n';
    out << "p cnf " << f.num_vars << ' ' << f.clauses.size() << '\n';
    for (const auto& c : f.clauses) {
        for (int l : c)
            out << l << ' ';
        out << "0\n";
    }
    if (!out)
        throw IoError("failed to write DIMACS output");
}

std::string to_dimacs(const CnfFormula& f)
{
    std::ostringstream out;
    export_dimacs(f, out);
    return out.str();
}

CnfFormula parse_dimacs(std::istream& in)
{
    CnfFormula f;
    std::string line;
    int line_no = 0;
    bool header = false;
    std::size_t declared = 0;
    std::vector<int> current;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok) || tok == "c" || tok[0] == 'c')
            continue;
        if (tok == "p") {
            std::string fmt;
            long long vars = -1, count = -1;
            if (header || !(ls >> fmt >> vars >> count) || fmt != "cnf" || vars < 0 || count < 0)
                throw ParseError("malformed DIMACS header", line_no);
            f.num_vars = static_cast<int>(vars);
            declared = static_cast<std::size_t>(count);
            header = true;
            continue;
        }
        if (!header)
            throw ParseError("clause before 'p cnf' header", line_no);
        do {
            char* end = nullptr;
            const long v = std::strtol(tok.c_str(), &end, 10);
            if (*end != '\0')
                throw ParseError("bad literal '" + tok + "'", line_no);
            if (v == 0) {
                f.clauses.push_back(std::move(current));
                current.clear();
            } else {
                if (std::labs(v) > f.num_vars)
                    throw ParseError("literal " + tok + " exceeds declared variable count", line_no);
                current.push_back(static_cast<int>(v));
            }
        } while (ls >> tok);
    }
    if (!header)
        throw ParseError("missing 'p cnf' header", line_no);
    if (!current.empty())
        throw ParseError("last clause is not 0-terminated", line_no);
    if (f.clauses.size() != declared)
        throw ParseError("header declares " + std::to_string(declared) + " clauses, found "
                             + std::to_string(f.clauses.size()),
                         line_no);
    return f;
}

CnfFormula parse_dimacs(const std::string& text)
{
    std::istringstream in(text);
    return parse_dimacs(in);
}

} // namespace f2fsec
