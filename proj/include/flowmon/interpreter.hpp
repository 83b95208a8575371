#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flowmon/alias_function.hpp"
#include "flowmon/ast.hpp"
#include "flowmon/diagnostic.hpp"
#include "flowmon/model.hpp"

namespace flowmon {

/// Thrown when a While loop runs out of fuel. Not a Fault: divergence is
/// outside the big-step relation rather than a stuck state.
class FuelExhausted : public std::runtime_error {
  public:
    explicit FuelExhausted(SourcePos pos) : std::runtime_error("fuel exhausted"), pos_(pos) {}
    [[nodiscard]] SourcePos pos() const { return pos_; }

  private:
    SourcePos pos_;
};

/// Deliberate weakenings of the monitor, used to show the harness detects them.
enum class Mutation {
    none,
    drop_pc_in_scalar_assign,
    strong_array_update,
};

/// Counters for the properties checked inline on every monitored write.
struct InvariantStats {
    std::uint64_t array_chain_checks = 0;
    std::uint64_t array_chain_failures = 0;
    std::uint64_t update_checks = 0;
    std::uint64_t update_failures = 0;
    std::uint64_t pc_checks = 0;
    std::uint64_t pc_failures = 0;

    [[nodiscard]] std::uint64_t failures() const { return array_chain_failures + update_failures + pc_failures; }

    InvariantStats& operator+=(const InvariantStats& o) {
        array_chain_checks += o.array_chain_checks;
        array_chain_failures += o.array_chain_failures;
        update_checks += o.update_checks;
        update_failures += o.update_failures;
        pc_checks += o.pc_checks;
        pc_failures += o.pc_failures;
        return *this;
    }
};

struct AssertionResult {
    SourcePos pos;
    std::string var;
    Label bound;
    Label actual;
    bool passed = true;
};

struct ExecHooks {
    /// Runs before an assignment evaluates anything.
    std::function<void(const Instr&, const AssignFields&, const Memory&)> before_assign;
    /// Runs once the target location is known, before the store is written.
    std::function<void(const Instr&, const AssignFields&, const Loc&, const Memory&)> before_write;
};

struct EvalContext {
    const Environment* env = nullptr;
    /// Required when labels are tracked; ignored in concrete mode.
    const AliasFunction* alias = nullptr;
    Label pc;
    std::uint64_t fuel = 100000;

    bool track_labels = true;
    Mutation mutation = Mutation::none;
    InvariantStats* stats = nullptr;
    const ExecHooks* hooks = nullptr;
    std::vector<AssertionResult>* assertions = nullptr;
};

struct Outcome {
    Memory memory;
    LabelMemory labels;
};

// ---------------------------------------------------------------------------
// Expressions

inline std::int64_t eval_binop(BinOpKind op, std::int64_t a, std::int64_t b) {
    // Wrap-around arithmetic without signed-overflow UB.
    const auto ua = static_cast<std::uint64_t>(a);
    const auto ub = static_cast<std::uint64_t>(b);
    switch (op) {
    case BinOpKind::Add: return static_cast<std::int64_t>(ua + ub);
    case BinOpKind::Sub: return static_cast<std::int64_t>(ua - ub);
    case BinOpKind::Mul: return static_cast<std::int64_t>(ua * ub);
    case BinOpKind::BitOr: return a | b;
    case BinOpKind::BitAnd: return a & b;
    case BinOpKind::Eq: return a == b ? 1 : 0;
    case BinOpKind::Lt: return a < b ? 1 : 0;
    }
    return 0;
}

inline bool istrue(const Val& v, SourcePos pos = {}) {
    if (const auto* n = std::get_if<Num>(&v)) {
        return n->value != 0;
    }
    throw Fault(FaultKind::type_mismatch, pos, "condition is not an integer");
}

inline std::pair<Val, Label> eval_expr(const EvalContext& ctx, const Memory& m, const LabelMemory& g, const Expr& e);

/// Index of an lvalue: absent for a plain variable, else the index value and label.
inline std::pair<std::optional<std::int64_t>, Label> eval_offset(const EvalContext& ctx, const Memory& m,
                                                                  const LabelMemory& g, const ExprPtr& index) {
    if (!index) {
        return {std::nullopt, Label::bottom()};
    }
    auto [v, s] = eval_expr(ctx, m, g, *index);
    const auto* n = std::get_if<Num>(&v);
    if (n == nullptr) {
        throw Fault(FaultKind::type_mismatch, index->pos, "array index is not an integer");
    }
    return {n->value, s};
}

inline std::pair<Loc, Label> eval_lval(const EvalContext& ctx, const Memory& m, const LabelMemory& g,
                                       const Lval& lv) {
    if (const auto* v = std::get_if<Lval::Var>(&lv.node)) {
        const auto it = ctx.env->find(v->name);
        if (it == ctx.env->end()) {
            throw Fault(FaultKind::type_mismatch, lv.pos, "unbound variable '" + v->name + "'");
        }
        auto [off, s] = eval_offset(ctx, m, g, v->index);
        return {Loc{it->second, off}, s};
    }
    const auto& d = std::get<Lval::Deref>(lv.node);
    auto [pv, s] = eval_expr(ctx, m, g, *d.pointer);
    if (const auto* p = std::get_if<Ptr>(&pv)) {
        return {p->loc, s};
    }
    if (std::holds_alternative<Uninit>(pv)) {
        throw Fault(FaultKind::uninitialized_deref, lv.pos, "");
    }
    throw Fault(FaultKind::type_mismatch, lv.pos, "dereference of an integer");
}

namespace detail {

inline Label label_of(const EvalContext& ctx, const LabelMemory& g, BlockId b) {
    return ctx.track_labels ? g.at(b) : Label::bottom();
}

inline void check_index(const ArrayVal& arr, std::int64_t i, SourcePos pos) {
    if (i < 0 || static_cast<std::uint64_t>(i) >= arr.elems.size()) {
        throw Fault(FaultKind::out_of_bounds, pos,
                    "index " + std::to_string(i) + " outside [0, " + std::to_string(arr.elems.size()) + ")");
    }
}

inline const Val& load(const Memory& m, const Loc& loc, SourcePos pos) {
    if (!m.contains(loc.block)) {
        throw Fault(FaultKind::type_mismatch, pos, "location outside memory");
    }
    const BlockVal& bv = m.at(loc.block);
    if (!loc.offset) {
        if (const auto* sv = std::get_if<ScalarVal>(&bv)) {
            return sv->value;
        }
        throw Fault(FaultKind::type_mismatch, pos, "array read without index");
    }
    const auto* arr = std::get_if<ArrayVal>(&bv);
    if (arr == nullptr) {
        throw Fault(FaultKind::type_mismatch, pos, "indexed read of a scalar");
    }
    check_index(*arr, *loc.offset, pos);
    return arr->elems[static_cast<std::size_t>(*loc.offset)];
}

} // namespace detail

inline std::pair<Val, Label> eval_expr(const EvalContext& ctx, const Memory& m, const LabelMemory& g, const Expr& e) {
    return std::visit(
        overloaded{
            [](const Expr::Const& c) -> std::pair<Val, Label> { return {Num{c.value}, Label::bottom()}; },
            [&](const Expr::Read& r) -> std::pair<Val, Label> {
                auto [loc, sl] = eval_lval(ctx, m, g, r.lval);
                const Val& v = detail::load(m, loc, e.pos);
                return {v, sl | detail::label_of(ctx, g, loc.block)};
            },
            [&](const Expr::AddrOf& a) -> std::pair<Val, Label> {
                auto [loc, sl] = eval_lval(ctx, m, g, a.lval);
                return {Ptr{loc}, sl};
            },
            [&](const Expr::BinOp& b) -> std::pair<Val, Label> {
                auto [va, sa] = eval_expr(ctx, m, g, *b.lhs);
                auto [vb, sb] = eval_expr(ctx, m, g, *b.rhs);
                const auto* na = std::get_if<Num>(&va);
                const auto* nb = std::get_if<Num>(&vb);
                if (na == nullptr || nb == nullptr) {
                    throw Fault(FaultKind::type_mismatch, e.pos,
                                std::string("operator '") + to_string(b.op) + "' on a non-integer");
                }
                return {Num{eval_binop(b.op, na->value, nb->value)}, sa | sb};
            },
            [&](const Expr::PtrAdd& a) -> std::pair<Val, Label> {
                auto [pv, sp] = eval_expr(ctx, m, g, *a.pointer);
                auto [ov, so] = eval_expr(ctx, m, g, *a.offset);
                const auto* off = std::get_if<Num>(&ov);
                if (off == nullptr) {
                    throw Fault(FaultKind::type_mismatch, e.pos, "pointer offset is not an integer");
                }
                if (std::holds_alternative<Uninit>(pv)) {
                    throw Fault(FaultKind::uninitialized_deref, e.pos, "arithmetic on an uninitialized pointer");
                }
                const auto* p = std::get_if<Ptr>(&pv);
                if (p == nullptr) {
                    throw Fault(FaultKind::type_mismatch, e.pos, "pointer arithmetic on an integer");
                }
                if (!p->loc.offset) {
                    throw Fault(FaultKind::scalar_pointer_arith, e.pos, "");
                }
                const std::int64_t moved = eval_binop(BinOpKind::Add, *p->loc.offset, off->value);
                return {Ptr{Loc{p->loc.block, moved}}, sp | so};
            },
        },
        e.node);
}

// ---------------------------------------------------------------------------
// Statements

namespace detail {

class Executor {
  public:
    explicit Executor(EvalContext& ctx) : ctx_(ctx) {
        if (ctx_.env == nullptr) {
            throw std::logic_error("EvalContext has no environment");
        }
        if (ctx_.track_labels && ctx_.alias == nullptr) {
            throw std::logic_error("monitor mode needs an alias function");
        }
    }

    void run(const Instr& i, Label pc, Memory& m, LabelMemory& g) {
        std::visit(overloaded{
                       [](const Instr::Skip&) {},
                       [&](const Instr::Assign& a) { assignment(i, a, pc, m, g); },
                       [&](const Instr::AssignArrayElem& a) { assignment(i, a, pc, m, g); },
                       [&](const Instr::Seq& s) {
                           run(*s.first, pc, m, g);
                           run(*s.second, pc, m, g);
                       },
                       [&](const Instr::If& s) {
                           auto [v, sc] = eval_expr(with_pc(pc), m, g, *s.cond);
                           const Label pc2 = sc | pc;
                           const bool taken = istrue(v, s.cond->pos);
                           run(taken ? *s.then_branch : *s.else_branch, pc2, m, g);
                           join_updates(taken ? *s.else_branch : *s.then_branch, pc2, g);
                       },
                       [&](const Instr::While& s) { loop(i, s, pc, m, g); },
                       [&](const Instr::Assert& a) { assertion(i, a, pc, m, g); },
                   },
                   i.node);
    }

  private:
    EvalContext with_pc(Label pc) const {
        EvalContext c = ctx_;
        c.pc = pc;
        return c;
    }

    void loop(const Instr& i, const Instr::While& s, Label pc, Memory& m, LabelMemory& g) {
        // Each iteration re-enters the While under the raised pc, so the
        // context label only ever grows across iterations.
        Label cur = pc;
        for (;;) {
            auto [v, sc] = eval_expr(with_pc(cur), m, g, *s.cond);
            cur = sc | cur;
            if (!istrue(v, s.cond->pos)) {
                join_updates(*s.body, cur, g);
                return;
            }
            if (ctx_.fuel == 0) {
                throw FuelExhausted(i.pos);
            }
            --ctx_.fuel;
            run(*s.body, cur, m, g);
        }
    }

    void join_updates(const Instr& branch, Label s, LabelMemory& g) {
        if (!ctx_.track_labels) {
            return;
        }
        for (const BlockId b : collect_updates(*ctx_.alias, branch)) {
            const Label before = g.at(b);
            g.at(b) = before | s;
            note_update(before, g.at(b), s);
        }
    }

    void note_update(Label before, Label after, Label pc) {
        if (ctx_.stats == nullptr) {
            return;
        }
        ++ctx_.stats->update_checks;
        if (!label_leq(before, after)) {
            ++ctx_.stats->update_failures;
        }
        ++ctx_.stats->pc_checks;
        if (!label_leq(pc, after)) {
            ++ctx_.stats->pc_failures;
        }
    }

    void assignment(const Instr& i, const AssignFields& a, Label pc, Memory& m, LabelMemory& g) {
        if (ctx_.hooks != nullptr && ctx_.hooks->before_assign) {
            ctx_.hooks->before_assign(i, a, m);
        }
        const EvalContext ectx = with_pc(pc);
        auto [loc, sl] = eval_lval(ectx, m, g, a.target);
        auto [v, sv] = eval_expr(ectx, m, g, *a.value);
        if (ctx_.hooks != nullptr && ctx_.hooks->before_write) {
            ctx_.hooks->before_write(i, a, loc, m);
        }
        if (!m.contains(loc.block)) {
            throw Fault(FaultKind::type_mismatch, i.pos, "write outside memory");
        }
        BlockVal& bv = m.at(loc.block);
        if (!loc.offset) {
            auto* sv_cell = std::get_if<ScalarVal>(&bv);
            if (sv_cell == nullptr) {
                throw Fault(FaultKind::type_mismatch, i.pos, "assignment to a whole array");
            }
            sv_cell->value = v;
        } else {
            auto* arr = std::get_if<ArrayVal>(&bv);
            if (arr == nullptr) {
                throw Fault(FaultKind::type_mismatch, i.pos, "indexed write to a scalar");
            }
            check_index(*arr, *loc.offset, i.pos);
            arr->elems[static_cast<std::size_t>(*loc.offset)] = v;
        }
        if (!ctx_.track_labels) {
            return;
        }

        const Label s = sl | sv | pc;
        Label& cell = g.at(loc.block);
        if (!loc.offset) {
            // Strong update.
            cell = ctx_.mutation == Mutation::drop_pc_in_scalar_assign ? (sl | sv) : s;
            if (ctx_.stats != nullptr) {
                ++ctx_.stats->pc_checks;
                if (!label_leq(pc, cell)) {
                    ++ctx_.stats->pc_failures;
                }
            }
        } else {
            // Weak update: an array's summary label only ever grows.
            const Label before = cell;
            cell = ctx_.mutation == Mutation::strong_array_update ? s : (s | before);
            if (ctx_.stats != nullptr) {
                ++ctx_.stats->array_chain_checks;
                if (!label_leq(before, cell)) {
                    ++ctx_.stats->array_chain_failures;
                }
                ++ctx_.stats->pc_checks;
                if (!label_leq(pc, cell)) {
                    ++ctx_.stats->pc_failures;
                }
            }
        }
        // The alias set contains the target itself, so the mutation has to
        // drop pc from this join as well to be observable.
        join_updates(i, ctx_.mutation == Mutation::drop_pc_in_scalar_assign && !loc.offset ? sl : (sl | pc), g);
    }

    void assertion(const Instr& i, const Instr::Assert& a, Label pc, const Memory& m, const LabelMemory& g) {
        Label actual;
        if (a.label_expr) {
            auto [v, s] = eval_expr(with_pc(pc), m, g, *a.label_expr);
            const auto* n = std::get_if<Num>(&v);
            if (n == nullptr) {
                throw Fault(FaultKind::type_mismatch, i.pos, "asserted label is not an integer");
            }
            actual = Label{static_cast<std::uint64_t>(n->value)};
        } else {
            const auto it = ctx_.env->find(a.var);
            if (it == ctx_.env->end()) {
                throw Fault(FaultKind::type_mismatch, i.pos, "unbound variable '" + a.var + "'");
            }
            actual = detail::label_of(ctx_, g, it->second);
        }
        if (ctx_.assertions != nullptr) {
            ctx_.assertions->push_back({i.pos, a.var, a.bound, actual, label_leq(actual, a.bound)});
        }
    }

    EvalContext& ctx_;
};

} // namespace detail

/// Runs `i` from (m, g) under ctx.pc. Consumes ctx.fuel. Throws Fault or
/// FuelExhausted.
inline Outcome exec(EvalContext& ctx, const Instr& i, Memory m, LabelMemory g) {
    detail::Executor ex(ctx);
    ex.run(i, ctx.pc, m, g);
    return Outcome{std::move(m), std::move(g)};
}

enum class ExecStatus { ok, fault, timeout };

struct ExecResult {
    ExecStatus status = ExecStatus::ok;
    Outcome outcome;
    std::optional<Fault> fault;
    std::vector<AssertionResult> assertions;
};

struct ExecOptions {
    std::uint64_t fuel = 100000;
    bool track_labels = true;
    Mutation mutation = Mutation::none;
    InvariantStats* stats = nullptr;
    const ExecHooks* hooks = nullptr;
};

/// Non-throwing wrapper: faults and fuel exhaustion become statuses.
inline ExecResult run_program(const Environment& env, const AliasFunction* alias, const Instr& body, Memory m,
                              LabelMemory g, const ExecOptions& opts = {}) {
    ExecResult r;
    EvalContext ctx;
    ctx.env = &env;
    ctx.alias = alias;
    ctx.fuel = opts.fuel;
    ctx.track_labels = opts.track_labels;
    ctx.mutation = opts.mutation;
    ctx.stats = opts.stats;
    ctx.hooks = opts.hooks;
    ctx.assertions = &r.assertions;
    try {
        r.outcome = exec(ctx, body, std::move(m), std::move(g));
    } catch (const Fault& f) {
        r.status = ExecStatus::fault;
        r.fault = f;
    } catch (const FuelExhausted&) {
        r.status = ExecStatus::timeout;
    }
    return r;
}

} // namespace flowmon
