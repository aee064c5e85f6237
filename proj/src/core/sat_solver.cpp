#include "f2fsec/sat_solver.hpp"

#include <algorithm>
#include <cmath>

namespace f2fsec::sat {

namespace {

double luby(double y, int x)
{
    int size = 1, seq = 0;
    while (size < x + 1) {
        ++seq;
        size = 2 * size + 1;
    }
    while (size - 1 != x) {
        size = (size - 1) >> 1;
        --seq;
        x = x % size;
    }
    return std::pow(y, seq);
}

constexpr double kVarDecay = 0.95;
constexpr double kClauseDecay = 0.999;
constexpr int kRestartBase = 100;

} // namespace

int Solver::new_var()
{
    const int v = var_count();
    assigns_.push_back(kUndef);
    phase_.push_back(kFalse);
    level_.push_back(0);
    reason_.push_back(kNoReason);
    activity_.push_back(0.0);
    heap_pos_.push_back(-1);
    seen_.push_back(0);
    watches_.emplace_back();
    watches_.emplace_back();
    heap_insert(v);
    return v;
}

bool Solver::add_clause(std::span<const Lit> input)
{
    if (!ok_)
        return false;
    if (level() > 0)
        backtrack(0);
    std::vector<Lit> lits(input.begin(), input.end());
    std::sort(lits.begin(), lits.end(), [](Lit a, Lit b) { return a.x < b.x; });
    std::vector<Lit> kept;
    for (std::size_t i = 0; i < lits.size(); ++i) {
        const Lit l = lits[i];
        if (i > 0 && l == lits[i - 1])
            continue;
        if (i + 1 < lits.size() && lits[i + 1] == ~l)
            return true; // tautology
        const auto v = value(l);
        if (v == kTrue)
            return true;
        if (v == kFalse)
            continue;
        kept.push_back(l);
    }
    if (kept.empty())
        return ok_ = false;
    if (kept.size() == 1) {
        enqueue(kept[0], kNoReason);
        if (propagate())
            ok_ = false;
        return ok_;
    }
    const auto cref = static_cast<std::uint32_t>(clauses_.size());
    clauses_.push_back(Clause{std::move(kept), 0.0, false, false});
    attach(cref);
    return true;
}

void Solver::attach(std::uint32_t cref)
{
    const auto& c = clauses_[cref].lits;
    watches_[c[0].x].push_back(Watcher{cref, c[1]});
    watches_[c[1].x].push_back(Watcher{cref, c[0]});
}

void Solver::enqueue(Lit l, std::uint32_t reason)
{
    const auto v = static_cast<std::size_t>(l.var());
    assigns_[v] = l.negated() ? kFalse : kTrue;
    level_[v] = level();
    reason_[v] = reason;
    trail_.push_back(l);
}

std::optional<std::uint32_t> Solver::propagate()
{
    std::optional<std::uint32_t> conflict;
    while (qhead_ < trail_.size()) {
        const Lit false_lit = ~trail_[qhead_++];
        auto& ws = watches_[false_lit.x];
        ++propagations_;
        std::size_t i = 0, j = 0;
        const std::size_t n = ws.size();
        while (i < n) {
            const Watcher w = ws[i++];
            if (value(w.blocker) == kTrue) {
                ws[j++] = w;
                continue;
            }
            auto& c = clauses_[w.clause];
            if (c.removed)
                continue;
            auto& lits = c.lits;
            if (lits[0] == false_lit)
                std::swap(lits[0], lits[1]);
            const Lit first = lits[0];
            if (first != w.blocker && value(first) == kTrue) {
                ws[j++] = Watcher{w.clause, first};
                continue;
            }
            bool moved = false;
            for (std::size_t k = 2; k < lits.size(); ++k) {
                if (value(lits[k]) != kFalse) {
                    std::swap(lits[1], lits[k]);
                    watches_[lits[1].x].push_back(Watcher{w.clause, first});
                    moved = true;
                    break;
                }
            }
            if (moved)
                continue;
            ws[j++] = Watcher{w.clause, first};
            if (value(first) == kFalse) {
                conflict = w.clause;
                qhead_ = trail_.size();
                while (i < n)
                    ws[j++] = ws[i++];
            } else {
                enqueue(first, w.clause);
            }
        }
        ws.resize(j);
        if (conflict)
            return conflict;
    }
    return std::nullopt;
}

bool Solver::redundant(Lit l) const
{
    const std::uint32_t r = reason_[static_cast<std::size_t>(l.var())];
    if (r == kNoReason)
        return false;
    for (const Lit q : clauses_[r].lits) {
        if (q.var() == l.var())
            continue;
        const auto v = static_cast<std::size_t>(q.var());
        if (!seen_[v] && level_[v] > 0)
            return false;
    }
    return true;
}

void Solver::analyze(std::uint32_t conflict, std::vector<Lit>& learnt, int& backtrack_level)
{
    learnt.clear();
    learnt.push_back(Lit{});
    int pending = 0;
    std::optional<Lit> p;
    std::size_t index = trail_.size();
    std::uint32_t cref = conflict;
    std::vector<int> touched;

    do {
        auto& c = clauses_[cref];
        if (c.learnt)
            bump_clause(c);
        for (const Lit q : c.lits) {
            if (p && q == *p)
                continue;
            const auto v = static_cast<std::size_t>(q.var());
            if (seen_[v] || level_[v] == 0)
                continue;
            bump_var(q.var());
            seen_[v] = 1;
            touched.push_back(q.var());
            if (level_[v] >= level())
                ++pending;
            else
                learnt.push_back(q);
        }
        do {
            --index;
        } while (!seen_[static_cast<std::size_t>(trail_[index].var())]);
        p = trail_[index];
        cref = reason_[static_cast<std::size_t>(p->var())];
        seen_[static_cast<std::size_t>(p->var())] = 0;
        --pending;
    } while (pending > 0);
    learnt[0] = ~*p;

    std::size_t kept = 1;
    for (std::size_t i = 1; i < learnt.size(); ++i)
        if (!redundant(learnt[i]))
            learnt[kept++] = learnt[i];
    learnt.resize(kept);
    for (int v : touched)
        seen_[static_cast<std::size_t>(v)] = 0;

    backtrack_level = 0;
    if (learnt.size() > 1) {
        std::size_t max_i = 1;
        for (std::size_t i = 2; i < learnt.size(); ++i)
            if (level_[static_cast<std::size_t>(learnt[i].var())] > level_[static_cast<std::size_t>(learnt[max_i].var())])
                max_i = i;
        std::swap(learnt[1], learnt[max_i]);
        backtrack_level = level_[static_cast<std::size_t>(learnt[1].var())];
    }
}

void Solver::backtrack(int to_level)
{
    if (level() <= to_level)
        return;
    const std::size_t stop = trail_lim_[static_cast<std::size_t>(to_level)];
    for (std::size_t i = trail_.size(); i-- > stop;) {
        const auto v = static_cast<std::size_t>(trail_[i].var());
        phase_[v] = assigns_[v];
        assigns_[v] = kUndef;
        reason_[v] = kNoReason;
        if (heap_pos_[v] < 0)
            heap_insert(static_cast<int>(v));
    }
    trail_.resize(stop);
    trail_lim_.resize(static_cast<std::size_t>(to_level));
    qhead_ = trail_.size();
}

std::optional<Lit> Solver::pick_branch()
{
    while (!heap_.empty()) {
        const int v = heap_pop();
        if (assigns_[static_cast<std::size_t>(v)] == kUndef)
            return Lit::make(v, phase_[static_cast<std::size_t>(v)] != kTrue);
    }
    return std::nullopt;
}

void Solver::bump_var(int var)
{
    auto& a = activity_[static_cast<std::size_t>(var)];
    a += var_inc_;
    if (a > 1e100) {
        for (auto& x : activity_)
            x *= 1e-100;
        var_inc_ *= 1e-100;
    }
    if (heap_pos_[static_cast<std::size_t>(var)] >= 0)
        heap_up(static_cast<std::size_t>(heap_pos_[static_cast<std::size_t>(var)]));
}

void Solver::bump_clause(Clause& c)
{
    c.activity += clause_inc_;
    if (c.activity > 1e20) {
        for (auto cref : learnts_)
            clauses_[cref].activity *= 1e-20;
        clause_inc_ *= 1e-20;
    }
}

void Solver::decay()
{
    var_inc_ /= kVarDecay;
    clause_inc_ /= kClauseDecay;
}

bool Solver::locked(std::uint32_t cref) const
{
    const Lit first = clauses_[cref].lits[0];
    return value(first) == kTrue && reason_[static_cast<std::size_t>(first.var())] == cref;
}

void Solver::reduce_learnts()
{
    std::sort(learnts_.begin(), learnts_.end(),
              [&](std::uint32_t a, std::uint32_t b) { return clauses_[a].activity < clauses_[b].activity; });
    const std::size_t half = learnts_.size() / 2;
    std::vector<std::uint32_t> kept;
    bool any_removed = false;
    for (std::size_t i = 0; i < learnts_.size(); ++i) {
        const std::uint32_t cref = learnts_[i];
        auto& c = clauses_[cref];
        if (i < half && c.lits.size() > 2 && !locked(cref)) {
            c.removed = true;
            std::vector<Lit>().swap(c.lits);
            any_removed = true;
        } else {
            kept.push_back(cref);
        }
    }
    learnts_ = std::move(kept);
    if (any_removed)
        for (auto& ws : watches_)
            std::erase_if(ws, [&](const Watcher& w) { return clauses_[w.clause].removed; });
}

Result Solver::solve(std::span<const Lit> assumptions, Deadline deadline)
{
    model_.clear();
    if (!ok_)
        return Result::Unsat;
    backtrack(0);
    if (propagate()) {
        ok_ = false;
        return Result::Unsat;
    }
    max_learnts_ = std::max(max_learnts_, static_cast<double>(clauses_.size()) / 3.0 + 2000.0);

    std::vector<Lit> learnt;
    int restarts = 0;
    auto expired = [&] { return deadline && std::chrono::steady_clock::now() > *deadline; };

    while (true) {
        const auto budget = static_cast<std::uint64_t>(luby(2.0, restarts++) * kRestartBase);
        std::uint64_t local_conflicts = 0;
        while (true) {
            if (const auto confl = propagate()) {
                ++conflicts_;
                ++local_conflicts;
                if (level() == 0) {
                    ok_ = false;
                    return Result::Unsat;
                }
                int bt = 0;
                analyze(*confl, learnt, bt);
                backtrack(bt);
                if (learnt.size() == 1) {
                    enqueue(learnt[0], kNoReason);
                } else {
                    const auto cref = static_cast<std::uint32_t>(clauses_.size());
                    clauses_.push_back(Clause{learnt, 0.0, true, false});
                    attach(cref);
                    learnts_.push_back(cref);
                    bump_clause(clauses_[cref]);
                    enqueue(learnt[0], cref);
                }
                decay();
                if ((conflicts_ & 255) == 0 && expired()) {
                    backtrack(0);
                    return Result::Unknown;
                }
                continue;
            }
            if (local_conflicts >= budget) {
                backtrack(0);
                break;
            }
            if (static_cast<double>(learnts_.size()) >= max_learnts_) {
                reduce_learnts();
                max_learnts_ *= 1.1;
            }

            std::optional<Lit> next;
            while (level() < static_cast<int>(assumptions.size())) {
                const Lit a = assumptions[static_cast<std::size_t>(level())];
                const auto v = value(a);
                if (v == kTrue) {
                    trail_lim_.push_back(trail_.size());
                } else if (v == kFalse) {
                    backtrack(0);
                    return Result::Unsat;
                } else {
                    next = a;
                    break;
                }
            }
            if (!next) {
                ++decisions_;
                if ((decisions_ & 4095) == 0 && expired()) {
                    backtrack(0);
                    return Result::Unknown;
                }
                next = pick_branch();
                if (!next) {
                    model_ = assigns_;
                    backtrack(0);
                    return Result::Sat;
                }
            }
            trail_lim_.push_back(trail_.size());
            enqueue(*next, kNoReason);
        }
    }
}

void Solver::heap_insert(int var)
{
    heap_pos_[static_cast<std::size_t>(var)] = static_cast<int>(heap_.size());
    heap_.push_back(var);
    heap_up(heap_.size() - 1);
}

void Solver::heap_up(std::size_t i)
{
    const int v = heap_[i];
    const double a = activity_[static_cast<std::size_t>(v)];
    while (i > 0) {
        const std::size_t parent = (i - 1) / 2;
        if (activity_[static_cast<std::size_t>(heap_[parent])] >= a)
            break;
        heap_[i] = heap_[parent];
        heap_pos_[static_cast<std::size_t>(heap_[i])] = static_cast<int>(i);
        i = parent;
    }
    heap_[i] = v;
    heap_pos_[static_cast<std::size_t>(v)] = static_cast<int>(i);
}

void Solver::heap_down(std::size_t i)
{
    const int v = heap_[i];
    const double a = activity_[static_cast<std::size_t>(v)];
    const std::size_t n = heap_.size();
    while (2 * i + 1 < n) {
        std::size_t child = 2 * i + 1;
        if (child + 1 < n
            && activity_[static_cast<std::size_t>(heap_[child + 1])] > activity_[static_cast<std::size_t>(heap_[child])])
            ++child;
        if (activity_[static_cast<std::size_t>(heap_[child])] <= a)
            break;
        heap_[i] = heap_[child];
        heap_pos_[static_cast<std::size_t>(heap_[i])] = static_cast<int>(i);
        i = child;
    }
    heap_[i] = v;
    heap_pos_[static_cast<std::size_t>(v)] = static_cast<int>(i);
}

int Solver::heap_pop()
{
    const int top = heap_.front();
    heap_pos_[static_cast<std::size_t>(top)] = -1;
    const int last = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) {
        heap_[0] = last;
        heap_pos_[static_cast<std::size_t>(last)] = 0;
        heap_down(0);
    }
    return top;
}

} // namespace f2fsec::sat
