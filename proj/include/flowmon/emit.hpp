#pragma once

#include <sstream>
#include <string>

#include "flowmon/ast.hpp"
#include "flowmon/program.hpp"

namespace flowmon {

namespace detail {

enum Prec : int { kOr = 1, kAnd, kEq, kLt, kAdd, kMul, kUnary, kPrimary };

inline int prec_of(BinOpKind op) {
    switch (op) {
    case BinOpKind::BitOr: return kOr;
    case BinOpKind::BitAnd: return kAnd;
    case BinOpKind::Eq: return kEq;
    case BinOpKind::Lt: return kLt;
    case BinOpKind::Add:
    case BinOpKind::Sub: return kAdd;
    case BinOpKind::Mul: return kMul;
    }
    return kPrimary;
}

inline std::string print_expr(const Expr& e, int min_prec = kOr);

inline std::string print_lval(const Lval& lv) {
    if (const auto* v = std::get_if<Lval::Var>(&lv.node)) {
        return v->index ? v->name + "[" + print_expr(*v->index) + "]" : v->name;
    }
    return "*" + print_expr(*std::get<Lval::Deref>(lv.node).pointer, kUnary);
}

inline std::string print_expr(const Expr& e, int min_prec) {
    int prec = kPrimary;
    std::string s = std::visit(overloaded{
                                   [&](const Expr::Const& c) {
                                       prec = c.value < 0 ? kUnary : kPrimary;
                                       return std::to_string(c.value);
                                   },
                                   [&](const Expr::Read& r) {
                                       prec = std::holds_alternative<Lval::Deref>(r.lval.node) ? kUnary : kPrimary;
                                       return print_lval(r.lval);
                                   },
                                   [&](const Expr::AddrOf& a) {
                                       prec = kUnary;
                                       return "&" + print_lval(a.lval);
                                   },
                                   [&](const Expr::BinOp& b) {
                                       prec = prec_of(b.op);
                                       return print_expr(*b.lhs, prec) + " " + to_string(b.op) + " " +
                                              print_expr(*b.rhs, prec + 1);
                                   },
                                   [&](const Expr::PtrAdd& a) {
                                       prec = kAdd;
                                       return print_expr(*a.pointer, kAdd) + " + " + print_expr(*a.offset, kAdd + 1);
                                   },
                               },
                               e.node);
    return prec < min_prec ? "(" + s + ")" : s;
}

inline std::string print_level(Label l) {
    if (l.bits() == 0) {
        return "public";
    }
    if (l.bits() == 1) {
        return "private";
    }
    return std::to_string(l.bits());
}

inline std::string print_value(const TypedProgram& p, const Val& v) {
    return std::visit(overloaded{
                          [](const Num& n) { return std::to_string(n.value); },
                          [&](const Ptr& ptr) {
                              const auto& name = p.var_info(ptr.loc.block).name;
                              return ptr.loc.offset ? "&" + name + "[" + std::to_string(*ptr.loc.offset) + "]"
                                                    : "&" + name;
                          },
                          [](const Uninit&) { return std::string("uninit"); },
                      },
                      v);
}

inline bool is_default(const Val& v) {
    return std::holds_alternative<Uninit>(v) || v == Val{Num{0}};
}

inline std::string print_declaration(const TypedProgram& p, const VarInfo& info) {
    std::string s = c_declaration(info.type, info.name);
    const BlockVal& bv = p.initial_memory.at(info.block);
    if (const auto* sv = std::get_if<ScalarVal>(&bv)) {
        if (!is_default(sv->value)) {
            s += " = " + print_value(p, sv->value);
        }
    } else {
        const auto& arr = std::get<ArrayVal>(bv);
        bool all_default = true;
        for (const auto& v : arr.elems) {
            all_default = all_default && is_default(v);
        }
        if (!all_default) {
            s += " = {";
            for (std::size_t i = 0; i < arr.elems.size(); ++i) {
                s += (i ? ", " : "") + print_value(p, arr.elems[i]);
            }
            s += "}";
        }
    }
    s += ";";
    if (info.annotation) {
        s += info.annotation->is_bottom() ? " /*@ public */" : " /*@ private */";
    }
    return s;
}

struct Printer {
    const TypedProgram& prog;
    bool c_mode = false;
    std::ostringstream out;

    void line(int depth, const std::string& s) { out << std::string(static_cast<std::size_t>(depth) * 4, ' ') << s << "\n"; }

    void block(const InstrPtr& body, int depth) {
        const auto items = flatten_seq(body);
        if (items.size() == 1 && std::holds_alternative<Instr::Skip>(items.front()->node)) {
            return;
        }
        for (const auto& s : items) {
            stmt(*s, depth);
        }
    }

    static std::string assignment(const AssignFields& a) {
        const std::string lhs = print_lval(a.target);
        if (const auto* b = std::get_if<Expr::BinOp>(&a.value->node); b && b->op == BinOpKind::BitOr) {
            if (const auto* r = std::get_if<Expr::Read>(&b->lhs->node); r && equal(r->lval, a.target)) {
                return lhs + " |= " + print_expr(*b->rhs) + ";";
            }
        }
        if (const auto* pa = std::get_if<Expr::PtrAdd>(&a.value->node)) {
            if (const auto* r = std::get_if<Expr::Read>(&pa->pointer->node); r && equal(r->lval, a.target)) {
                return lhs + " += " + print_expr(*pa->offset) + ";";
            }
        }
        return lhs + " = " + print_expr(*a.value) + ";";
    }

    void stmt(const Instr& i, int depth) {
        std::visit(overloaded{
                       [&](const Instr::Skip&) { line(depth, ";"); },
                       [&](const Instr::Assign& a) { line(depth, assignment(a)); },
                       [&](const Instr::AssignArrayElem& a) { line(depth, assignment(a)); },
                       [&](const Instr::Seq& s) {
                           stmt(*s.first, depth);
                           stmt(*s.second, depth);
                       },
                       [&](const Instr::If& s) {
                           line(depth, "if (" + print_expr(*s.cond) + ") {");
                           block(s.then_branch, depth + 1);
                           if (std::holds_alternative<Instr::Skip>(s.else_branch->node)) {
                               line(depth, "}");
                           } else {
                               line(depth, "} else {");
                               block(s.else_branch, depth + 1);
                               line(depth, "}");
                           }
                       },
                       [&](const Instr::While& s) {
                           line(depth, "while (" + print_expr(*s.cond) + ") {");
                           block(s.body, depth + 1);
                           line(depth, "}");
                       },
                       [&](const Instr::Assert& a) {
                           if (c_mode && a.label_expr) {
                               line(depth, "if ((" + print_expr(*a.label_expr) + ") & ~" +
                                               std::to_string(a.bound.bits()) + ") report_violation(" +
                                               std::to_string(i.pos.line) + ");");
                           } else if (a.label_expr) {
                               line(depth, "//@ assert (" + print_expr(*a.label_expr) + ") == " +
                                               print_level(a.bound) + ";");
                           } else {
                               line(depth, "//@ assert security_status(" + a.var + ") == " + print_level(a.bound) +
                                               ";");
                           }
                       },
                   },
                   i.node);
    }
};

} // namespace detail

inline std::string emit_expr(const Expr& e) { return detail::print_expr(e); }
inline std::string emit_lval(const Lval& lv) { return detail::print_lval(lv); }
inline std::string emit_value(const TypedProgram& p, const Val& v) { return detail::print_value(p, v); }

/// Deterministic mini-C rendering; reparsing and elaborating the text yields
/// a structurally equal program.
inline std::string emit(const TypedProgram& p) {
    detail::Printer pr{p, false, {}};
    for (const auto& v : p.vars) {
        pr.line(0, detail::print_declaration(p, v));
    }
    if (!p.vars.empty() && !std::holds_alternative<Instr::Skip>(p.body->node)) {
        pr.out << "\n";
    }
    pr.block(p.body, 0);
    return pr.out.str();
}

/// C99 rendering: globals for declarations, the body inside main(). Label
/// assertions become calls to report_violation(line), which the preamble
/// must define.
inline std::string emit_c(const TypedProgram& p, const std::string& preamble = {}) {
    detail::Printer pr{p, true, {}};
    pr.out << preamble;
    if (!preamble.empty() && preamble.back() != '\n') {
        pr.out << "\n";
    }
    for (const auto& v : p.vars) {
        pr.line(0, detail::print_declaration(p, v));
    }
    pr.out << "\nint main(void) {\n";
    pr.block(p.body, 1);
    pr.line(1, "return 0;");
    pr.out << "}\n";
    return pr.out.str();
}

} // namespace flowmon
