#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "flowmon/diagnostic.hpp"
#include "flowmon/label.hpp"

namespace flowmon {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

enum class BinOpKind { Add, Sub, Mul, BitOr, BitAnd, Eq, Lt };

inline const char* to_string(BinOpKind op) {
    switch (op) {
    case BinOpKind::Add: return "+";
    case BinOpKind::Sub: return "-";
    case BinOpKind::Mul: return "*";
    case BinOpKind::BitOr: return "|";
    case BinOpKind::BitAnd: return "&";
    case BinOpKind::Eq: return "==";
    case BinOpKind::Lt: return "<";
    }
    return "?";
}

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Lval {
    /// `x` or `x[index]`; a null index is NoOffset.
    struct Var {
        std::string name;
        ExprPtr index;
    };
    struct Deref {
        ExprPtr pointer;
    };

    std::variant<Var, Deref> node;
    SourcePos pos;
};

struct Expr {
    struct Const {
        std::int64_t value;
    };
    /// The `Lval` constructor: the value stored at an lvalue.
    struct Read {
        Lval lval;
    };
    struct AddrOf {
        Lval lval;
    };
    struct BinOp {
        BinOpKind op;
        ExprPtr lhs;
        ExprPtr rhs;
    };
    struct PtrAdd {
        ExprPtr pointer;
        ExprPtr offset;
    };

    std::variant<Const, Read, AddrOf, BinOp, PtrAdd> node;
    SourcePos pos;
};

// Builders ------------------------------------------------------------------

inline Lval var(std::string name, SourcePos pos = {}) { return Lval{Lval::Var{std::move(name), nullptr}, pos}; }
inline Lval elem(std::string name, ExprPtr index, SourcePos pos = {}) {
    return Lval{Lval::Var{std::move(name), std::move(index)}, pos};
}
inline Lval deref(ExprPtr pointer, SourcePos pos = {}) { return Lval{Lval::Deref{std::move(pointer)}, pos}; }

inline ExprPtr constant(std::int64_t v, SourcePos pos = {}) {
    return std::make_shared<const Expr>(Expr{Expr::Const{v}, pos});
}
inline ExprPtr read(Lval lv, SourcePos pos = {}) {
    return std::make_shared<const Expr>(Expr{Expr::Read{std::move(lv)}, pos});
}
inline ExprPtr read_var(std::string name) { return read(var(std::move(name))); }
inline ExprPtr addr_of(Lval lv, SourcePos pos = {}) {
    return std::make_shared<const Expr>(Expr{Expr::AddrOf{std::move(lv)}, pos});
}
inline ExprPtr binop(BinOpKind op, ExprPtr a, ExprPtr b, SourcePos pos = {}) {
    return std::make_shared<const Expr>(Expr{Expr::BinOp{op, std::move(a), std::move(b)}, pos});
}
inline ExprPtr ptr_add(ExprPtr p, ExprPtr off, SourcePos pos = {}) {
    return std::make_shared<const Expr>(Expr{Expr::PtrAdd{std::move(p), std::move(off)}, pos});
}

// Statements ------------------------------------------------------------------

struct Instr;
using InstrPtr = std::shared_ptr<const Instr>;

/// Fields shared by both assignment forms. `id` numbers assignment
/// occurrences in program order; it keys the alias function.
struct AssignFields {
    Lval target;
    ExprPtr value;
    int id = -1;
};

struct Instr {
    struct Skip {};
    struct Assign : AssignFields {};
    struct AssignArrayElem : AssignFields {};
    struct Seq {
        InstrPtr first;
        InstrPtr second;
    };
    struct If {
        ExprPtr cond;
        InstrPtr then_branch;
        InstrPtr else_branch;
    };
    struct While {
        ExprPtr cond;
        InstrPtr body;
    };
    /// Policy check. Source form queries the monitor label of `var`
    /// (`security_status(x) == L`); instrumented form checks an integer
    /// label expression (`x_status == L`). Passes iff the label is below `bound`.
    struct Assert {
        std::string var;
        ExprPtr label_expr;
        Label bound;
    };

    std::variant<Skip, Assign, AssignArrayElem, Seq, If, While, Assert> node;
    SourcePos pos;
};

inline InstrPtr skip(SourcePos pos = {}) { return std::make_shared<const Instr>(Instr{Instr::Skip{}, pos}); }
inline InstrPtr assign(Lval target, ExprPtr value, SourcePos pos = {}) {
    return std::make_shared<const Instr>(Instr{Instr::Assign{{std::move(target), std::move(value), -1}}, pos});
}
inline InstrPtr assign_array_elem(Lval target, ExprPtr value, SourcePos pos = {}) {
    return std::make_shared<const Instr>(
        Instr{Instr::AssignArrayElem{{std::move(target), std::move(value), -1}}, pos});
}
inline InstrPtr if_then_else(ExprPtr c, InstrPtr t, InstrPtr e, SourcePos pos = {}) {
    return std::make_shared<const Instr>(Instr{Instr::If{std::move(c), std::move(t), std::move(e)}, pos});
}
inline InstrPtr while_loop(ExprPtr c, InstrPtr body, SourcePos pos = {}) {
    return std::make_shared<const Instr>(Instr{Instr::While{std::move(c), std::move(body)}, pos});
}
inline InstrPtr assert_status(std::string var_name, Label bound, SourcePos pos = {}) {
    return std::make_shared<const Instr>(Instr{Instr::Assert{std::move(var_name), nullptr, bound}, pos});
}
inline InstrPtr assert_label(ExprPtr label_expr, Label bound, SourcePos pos = {}) {
    return std::make_shared<const Instr>(Instr{Instr::Assert{{}, std::move(label_expr), bound}, pos});
}

namespace detail {
inline void flatten_into(const InstrPtr& i, std::vector<InstrPtr>& out) {
    if (const auto* s = std::get_if<Instr::Seq>(&i->node)) {
        flatten_into(s->first, out);
        flatten_into(s->second, out);
    } else {
        out.push_back(i);
    }
}
} // namespace detail

/// Statements of a (possibly nested) sequence, in order.
inline std::vector<InstrPtr> flatten_seq(const InstrPtr& i) {
    std::vector<InstrPtr> out;
    detail::flatten_into(i, out);
    return out;
}

/// Canonical right-nested sequence; every AST built by this library goes
/// through here, so printing and reparsing reproduce the same tree.
inline InstrPtr make_seq(const std::vector<InstrPtr>& items) {
    std::vector<InstrPtr> flat;
    for (const auto& i : items) {
        detail::flatten_into(i, flat);
    }
    if (flat.empty()) {
        return skip();
    }
    InstrPtr acc = flat.back();
    for (auto it = flat.rbegin() + 1; it != flat.rend(); ++it) {
        acc = std::make_shared<const Instr>(Instr{Instr::Seq{*it, acc}, (*it)->pos});
    }
    return acc;
}

inline const AssignFields* assign_fields(const Instr& i) {
    if (const auto* a = std::get_if<Instr::Assign>(&i.node)) {
        return a;
    }
    if (const auto* a = std::get_if<Instr::AssignArrayElem>(&i.node)) {
        return a;
    }
    return nullptr;
}

/// Pre-order walk over every statement node.
inline void for_each_instr(const InstrPtr& i, const std::function<void(const Instr&)>& f) {
    f(*i);
    std::visit(overloaded{
                   [&](const Instr::Seq& s) {
                       for_each_instr(s.first, f);
                       for_each_instr(s.second, f);
                   },
                   [&](const Instr::If& s) {
                       for_each_instr(s.then_branch, f);
                       for_each_instr(s.else_branch, f);
                   },
                   [&](const Instr::While& s) { for_each_instr(s.body, f); },
                   [](const auto&) {},
               },
               i->node);
}

// Structural equality (positions ignored) -----------------------------------

inline bool equal(const Expr& a, const Expr& b);

inline bool equal(const ExprPtr& a, const ExprPtr& b) {
    if (!a || !b) {
        return !a && !b;
    }
    return equal(*a, *b);
}

inline bool equal(const Lval& a, const Lval& b) {
    if (a.node.index() != b.node.index()) {
        return false;
    }
    if (const auto* va = std::get_if<Lval::Var>(&a.node)) {
        const auto& vb = std::get<Lval::Var>(b.node);
        return va->name == vb.name && equal(va->index, vb.index);
    }
    return equal(std::get<Lval::Deref>(a.node).pointer, std::get<Lval::Deref>(b.node).pointer);
}

inline bool equal(const Expr& a, const Expr& b) {
    if (a.node.index() != b.node.index()) {
        return false;
    }
    return std::visit(overloaded{
                          [&](const Expr::Const& x) { return x.value == std::get<Expr::Const>(b.node).value; },
                          [&](const Expr::Read& x) { return equal(x.lval, std::get<Expr::Read>(b.node).lval); },
                          [&](const Expr::AddrOf& x) { return equal(x.lval, std::get<Expr::AddrOf>(b.node).lval); },
                          [&](const Expr::BinOp& x) {
                              const auto& y = std::get<Expr::BinOp>(b.node);
                              return x.op == y.op && equal(x.lhs, y.lhs) && equal(x.rhs, y.rhs);
                          },
                          [&](const Expr::PtrAdd& x) {
                              const auto& y = std::get<Expr::PtrAdd>(b.node);
                              return equal(x.pointer, y.pointer) && equal(x.offset, y.offset);
                          },
                      },
                      a.node);
}

inline bool equal(const InstrPtr& a, const InstrPtr& b);

inline bool equal(const Instr& a, const Instr& b) {
    if (a.node.index() != b.node.index()) {
        return false;
    }
    return std::visit(
        overloaded{
            [](const Instr::Skip&) { return true; },
            [&](const Instr::Assign& x) {
                const auto& y = std::get<Instr::Assign>(b.node);
                return x.id == y.id && equal(x.target, y.target) && equal(x.value, y.value);
            },
            [&](const Instr::AssignArrayElem& x) {
                const auto& y = std::get<Instr::AssignArrayElem>(b.node);
                return x.id == y.id && equal(x.target, y.target) && equal(x.value, y.value);
            },
            [&](const Instr::Seq& x) {
                const auto& y = std::get<Instr::Seq>(b.node);
                return equal(x.first, y.first) && equal(x.second, y.second);
            },
            [&](const Instr::If& x) {
                const auto& y = std::get<Instr::If>(b.node);
                return equal(x.cond, y.cond) && equal(x.then_branch, y.then_branch) &&
                       equal(x.else_branch, y.else_branch);
            },
            [&](const Instr::While& x) {
                const auto& y = std::get<Instr::While>(b.node);
                return equal(x.cond, y.cond) && equal(x.body, y.body);
            },
            [&](const Instr::Assert& x) {
                const auto& y = std::get<Instr::Assert>(b.node);
                return x.var == y.var && x.bound == y.bound && equal(x.label_expr, y.label_expr);
            },
        },
        a.node);
}

inline bool equal(const InstrPtr& a, const InstrPtr& b) {
    if (!a || !b) {
        return !a && !b;
    }
    return equal(*a, *b);
}

} // namespace flowmon
