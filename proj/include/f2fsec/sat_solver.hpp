#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace f2fsec::sat {

// Literal over 0-based variables: 2 * var + (negated ? 1 : 0).
struct Lit {
    std::uint32_t x = 0;

    static Lit make(int var, bool negated = false) { return Lit{static_cast<std::uint32_t>(var) * 2 + (negated ? 1u : 0u)}; }
    int var() const { return static_cast<int>(x >> 1); }
    bool negated() const { return x & 1; }
    Lit operator~() const { return Lit{x ^ 1u}; }
    bool operator==(const Lit&) const = default;
};

enum class Result { Sat, Unsat, Unknown };

// Conflict-driven clause-learning solver: two watched literals, VSIDS with
// phase saving, first-UIP learning with local minimization, Luby restarts, and
// activity-based learnt-clause reduction. Clauses can be added between calls;
// assumptions hold for a single solve().
class Solver {
public:
    int new_var();
    int var_count() const noexcept { return static_cast<int>(assigns_.size()); }
    // Value tried first when the solver branches on var; later overwritten by
    // phase saving.
    void set_phase(int var, bool value) { phase_[static_cast<std::size_t>(var)] = value ? kTrue : kFalse; }

    // Returns false once the clause database is unsatisfiable at level 0.
    bool add_clause(std::span<const Lit> lits);
    bool add_clause(std::initializer_list<Lit> lits) { return add_clause(std::span<const Lit>(lits.begin(), lits.size())); }

    using Deadline = std::optional<std::chrono::steady_clock::time_point>;
    Result solve(std::span<const Lit> assumptions = {}, Deadline deadline = std::nullopt);

    // Valid after solve() returned Sat.
    bool model_value(int var) const { return model_[static_cast<std::size_t>(var)] != 0; }
    bool model_value(Lit l) const { return model_value(l.var()) != l.negated(); }

    std::uint64_t conflicts() const noexcept { return conflicts_; }
    std::uint64_t decisions() const noexcept { return decisions_; }
    std::uint64_t propagations() const noexcept { return propagations_; }

private:
    static constexpr std::uint8_t kFalse = 0, kTrue = 1, kUndef = 2;
    static constexpr std::uint32_t kNoReason = UINT32_MAX;

    struct Clause {
        std::vector<Lit> lits;
        double activity = 0.0;
        bool learnt = false;
        bool removed = false;
    };
    struct Watcher {
        std::uint32_t clause;
        Lit blocker;
    };

    std::uint8_t value(Lit l) const
    {
        const std::uint8_t v = assigns_[static_cast<std::size_t>(l.var())];
        return v == kUndef ? kUndef : static_cast<std::uint8_t>(v ^ static_cast<std::uint8_t>(l.negated()));
    }
    int level() const noexcept { return static_cast<int>(trail_lim_.size()); }

    void attach(std::uint32_t cref);
    void enqueue(Lit l, std::uint32_t reason);
    std::optional<std::uint32_t> propagate();
    void analyze(std::uint32_t conflict, std::vector<Lit>& learnt, int& backtrack_level);
    bool redundant(Lit l) const;
    void backtrack(int to_level);
    std::optional<Lit> pick_branch();
    void bump_var(int var);
    void bump_clause(Clause& c);
    void decay();
    void reduce_learnts();
    bool locked(std::uint32_t cref) const;

    void heap_insert(int var);
    void heap_up(std::size_t i);
    void heap_down(std::size_t i);
    int heap_pop();

    bool ok_ = true;
    std::vector<Clause> clauses_;
    std::vector<std::uint32_t> learnts_;
    std::vector<std::vector<Watcher>> watches_; // indexed by literal
    std::vector<std::uint8_t> assigns_;
    std::vector<std::uint8_t> phase_;
    std::vector<int> level_;
    std::vector<std::uint32_t> reason_;
    std::vector<Lit> trail_;
    std::vector<std::size_t> trail_lim_;
    std::size_t qhead_ = 0;
    std::vector<std::uint8_t> model_;

    std::vector<double> activity_;
    double var_inc_ = 1.0;
    double clause_inc_ = 1.0;
    std::vector<int> heap_;
    std::vector<int> heap_pos_;

    mutable std::vector<std::uint8_t> seen_;
    std::uint64_t conflicts_ = 0;
    std::uint64_t decisions_ = 0;
    std::uint64_t propagations_ = 0;
    double max_learnts_ = 0.0;
};

} // namespace f2fsec::sat
