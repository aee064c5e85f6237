#pragma once

#include "f2fsec/sat_solver.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace f2fsec {

// Receiver for generated clauses; lets one encoder feed either the embedded
// solver or a formula destined for DIMACS.
class ClauseSink {
public:
    virtual ~ClauseSink() = default;
    virtual int new_var() = 0;
    virtual void add_clause(std::span<const sat::Lit> lits) = 0;
    void add_clause(std::initializer_list<sat::Lit> lits) { add_clause(std::span<const sat::Lit>(lits.begin(), lits.size())); }
};

class SolverSink final : public ClauseSink {
public:
    explicit SolverSink(sat::Solver& solver) : solver_(solver) {}
    int new_var() override { return solver_.new_var(); }
    void add_clause(std::span<const sat::Lit> lits) override { solver_.add_clause(lits); }
    using ClauseSink::add_clause;

private:
    sat::Solver& solver_;
};

// Clauses in DIMACS convention: variables are 1-based, negative means negated.
class CnfFormula final : public ClauseSink {
public:
    int num_vars = 0;
    std::vector<std::vector<int>> clauses;
    // Named variables (DIMACS index), written as comment lines.
    std::vector<std::pair<std::string, int>> symbols;

    int new_var() override { return num_vars++; }
    void add_clause(std::span<const sat::Lit> lits) override;
    using ClauseSink::add_clause;
};

void export_dimacs(const CnfFormula& f, std::ostream& out);
std::string to_dimacs(const CnfFormula& f);
// Throws ParseError on malformed input.
CnfFormula parse_dimacs(std::istream& in);
CnfFormula parse_dimacs(const std::string& text);

} // namespace f2fsec
