#pragma once

#include <optional>
#include <string>
#include <utility>

#include "flowmon/ast.hpp"
#include "flowmon/diagnostic.hpp"
#include "flowmon/program.hpp"

namespace flowmon {

namespace detail {

class Elaborator {
  public:
    explicit Elaborator(TypedProgram& out) : prog_(out) {}

    void declare(const Declaration& d) {
        if (prog_.env.contains(d.name)) {
            throw TypeError(d.pos, "duplicate declaration of '" + d.name + "'");
        }
        if (d.type.is_array() && d.type.inner().is_array()) {
            throw TypeError(d.pos, "multi-dimensional arrays are not supported");
        }
        BlockVal init;
        if (d.type.is_array()) {
            const ObjType& elem_t = d.type.inner();
            ArrayVal arr;
            if (d.init.empty()) {
                arr.elems.assign(static_cast<std::size_t>(d.type.length()), default_value(elem_t));
            } else {
                if (!d.braced) {
                    throw TypeError(d.pos, "array '" + d.name + "' needs a brace initializer");
                }
                if (static_cast<std::int64_t>(d.init.size()) != d.type.length()) {
                    throw TypeError(d.pos, "initializer for '" + d.name + "' has " + std::to_string(d.init.size()) +
                                               " elements, declared length is " + std::to_string(d.type.length()));
                }
                for (const auto& e : d.init) {
                    arr.elems.push_back(constant_value(*e, elem_t));
                }
            }
            init = std::move(arr);
        } else {
            if (d.braced) {
                throw TypeError(d.pos, "brace initializer on scalar '" + d.name + "'");
            }
            init = ScalarVal{d.init.empty() ? default_value(d.type) : constant_value(*d.init.front(), d.type)};
        }
        const BlockId b = prog_.initial_memory.push(std::move(init));
        prog_.initial_labels.push(d.annotation.value_or(Label::bottom()));
        prog_.env.emplace(d.name, b);
        prog_.vars.push_back(VarInfo{d.name, d.type, b, d.annotation, d.pos});
    }

    InstrPtr instr(const InstrPtr& i) {
        const SourcePos pos = i->pos;
        return std::visit(
            overloaded{
                [&](const Instr::Skip&) { return i; },
                [&](const Instr::Assign& a) { return assignment(a, pos); },
                [&](const Instr::AssignArrayElem& a) { return assignment(a, pos); },
                [&](const Instr::Seq& s) { return make_seq({instr(s.first), instr(s.second)}); },
                [&](const Instr::If& s) {
                    auto c = condition(s.cond);
                    auto t = instr(s.then_branch);
                    auto e = instr(s.else_branch);
                    return if_then_else(std::move(c), std::move(t), std::move(e), pos);
                },
                [&](const Instr::While& s) {
                    auto c = condition(s.cond);
                    return while_loop(std::move(c), instr(s.body), pos);
                },
                [&](const Instr::Assert& a) {
                    if (a.label_expr) {
                        auto [e, t] = expr(a.label_expr);
                        if (!t.is_int()) {
                            throw TypeError(pos, "asserted label expression must be an integer");
                        }
                        return assert_label(std::move(e), a.bound, pos);
                    }
                    if (!prog_.env.contains(a.var)) {
                        throw TypeError(pos, "security_status of undeclared variable '" + a.var + "'");
                    }
                    return i;
                },
            },
            i->node);
    }

  private:
    static Val default_value(const ObjType& t) {
        if (t.is_int()) {
            return Num{0};
        }
        return Uninit{};
    }

    Val constant_value(const Expr& e, const ObjType& t) {
        if (t.is_int()) {
            if (const auto* c = std::get_if<Expr::Const>(&e.node)) {
                return Num{c->value};
            }
            throw TypeError(e.pos, "integer initializer must be a constant");
        }
        const auto* a = std::get_if<Expr::AddrOf>(&e.node);
        const auto* v = a ? std::get_if<Lval::Var>(&a->lval.node) : nullptr;
        if (v == nullptr) {
            throw TypeError(e.pos, "pointer initializer must be &name or &name[constant]");
        }
        const auto it = prog_.env.find(v->name);
        if (it == prog_.env.end()) {
            throw TypeError(e.pos, "initializer refers to '" + v->name + "' before its declaration");
        }
        const ObjType& target_t = prog_.vars[it->second.index].type;
        if (v->index) {
            const auto* idx = std::get_if<Expr::Const>(&v->index->node);
            if (idx == nullptr || !target_t.is_array()) {
                throw TypeError(e.pos, "pointer initializer must be &name or &name[constant]");
            }
            if (idx->value < 0 || idx->value >= target_t.length()) {
                throw TypeError(e.pos, "initializer index out of bounds for '" + v->name + "'");
            }
            if (!(ObjType::ptr_to(target_t.inner()) == t)) {
                throw TypeError(e.pos, "initializer type mismatch for pointer");
            }
            return Ptr{Loc{it->second, idx->value}};
        }
        if (target_t.is_array()) {
            throw TypeError(e.pos, "cannot take the address of a whole array");
        }
        if (!(ObjType::ptr_to(target_t) == t)) {
            throw TypeError(e.pos, "initializer type mismatch for pointer");
        }
        return Ptr{Loc{it->second, std::nullopt}};
    }

    ExprPtr condition(const ExprPtr& c) {
        auto [e, t] = expr(c);
        if (!t.is_int()) {
            throw TypeError(c->pos, "condition must be an integer");
        }
        return e;
    }

    InstrPtr assignment(const AssignFields& a, SourcePos pos) {
        auto [target, target_t] = lval(a.target);
        if (target_t.is_array()) {
            throw TypeError(pos, "whole-array assignment is not supported");
        }
        auto [value, value_t] = expr(a.value);
        if (!(target_t == value_t)) {
            throw TypeError(pos, "assignment of " + to_string(value_t) + " to " + to_string(target_t));
        }
        const auto* v = std::get_if<Lval::Var>(&target.node);
        const bool array_elem = v != nullptr && v->index != nullptr;
        const int id = prog_.assign_count++;
        if (array_elem) {
            return std::make_shared<const Instr>(Instr{Instr::AssignArrayElem{{target, value, id}}, pos});
        }
        return std::make_shared<const Instr>(Instr{Instr::Assign{{target, value, id}}, pos});
    }

    std::pair<Lval, ObjType> lval(const Lval& lv) {
        if (const auto* v = std::get_if<Lval::Var>(&lv.node)) {
            const auto it = prog_.env.find(v->name);
            if (it == prog_.env.end()) {
                throw TypeError(lv.pos, "undeclared variable '" + v->name + "'");
            }
            const ObjType& t = prog_.vars[it->second.index].type;
            if (!v->index) {
                return {lv, t};
            }
            if (!t.is_array()) {
                throw TypeError(lv.pos, "'" + v->name + "' is not an array and cannot be indexed");
            }
            auto [idx, idx_t] = expr(v->index);
            if (!idx_t.is_int()) {
                throw TypeError(lv.pos, "array index must be an integer");
            }
            return {elem(v->name, std::move(idx), lv.pos), t.inner()};
        }
        const auto& d = std::get<Lval::Deref>(lv.node);
        auto [p, p_t] = expr(d.pointer);
        if (!p_t.is_ptr()) {
            throw TypeError(lv.pos, "dereference of non-pointer of type " + to_string(p_t));
        }
        return {deref(std::move(p), lv.pos), p_t.inner()};
    }

    std::pair<ExprPtr, ObjType> expr(const ExprPtr& e) {
        const SourcePos pos = e->pos;
        return std::visit(
            overloaded{
                [&](const Expr::Const&) -> std::pair<ExprPtr, ObjType> { return {e, ObjType::int_type()}; },
                [&](const Expr::Read& r) -> std::pair<ExprPtr, ObjType> {
                    auto [lv, t] = lval(r.lval);
                    if (t.is_array()) {
                        throw TypeError(pos, "array read without index");
                    }
                    return {read(std::move(lv), pos), t};
                },
                [&](const Expr::AddrOf& a) -> std::pair<ExprPtr, ObjType> {
                    auto [lv, t] = lval(a.lval);
                    if (t.is_array()) {
                        throw TypeError(pos, "cannot take the address of a whole array");
                    }
                    return {addr_of(std::move(lv), pos), ObjType::ptr_to(t)};
                },
                [&](const Expr::BinOp& b) -> std::pair<ExprPtr, ObjType> {
                    auto [lhs, lt] = expr(b.lhs);
                    auto [rhs, rt] = expr(b.rhs);
                    if (b.op == BinOpKind::Add && lt.is_ptr() && rt.is_int()) {
                        return {ptr_add(std::move(lhs), std::move(rhs), pos), lt};
                    }
                    if (!lt.is_int() || !rt.is_int()) {
                        throw TypeError(pos, std::string("operator '") + to_string(b.op) + "' applied to " +
                                                 to_string(lt) + " and " + to_string(rt));
                    }
                    return {binop(b.op, std::move(lhs), std::move(rhs), pos), lt};
                },
                [&](const Expr::PtrAdd& a) -> std::pair<ExprPtr, ObjType> {
                    auto [p, pt] = expr(a.pointer);
                    auto [off, ot] = expr(a.offset);
                    if (!pt.is_ptr() || !ot.is_int()) {
                        throw TypeError(pos, "pointer addition needs a pointer and an integer");
                    }
                    return {ptr_add(std::move(p), std::move(off), pos), pt};
                },
            },
            e->node);
    }

    TypedProgram& prog_;
};

} // namespace detail

/// Allocates one block per declaration (in order), builds the initial stores,
/// types the body and classifies each assignment. Throws TypeError.
inline TypedProgram elaborate(const SourceProgram& p) {
    TypedProgram out;
    detail::Elaborator el(out);
    for (const auto& d : p.decls) {
        el.declare(d);
    }
    out.body = el.instr(p.body);
    return out;
}

/// Static type of an elaborated expression.
inline ObjType type_of(const TypedProgram& p, const Expr& e);

inline ObjType type_of(const TypedProgram& p, const Lval& lv) {
    if (const auto* v = std::get_if<Lval::Var>(&lv.node)) {
        const auto* info = p.find_var(v->name);
        if (info == nullptr) {
            throw TypeError(lv.pos, "undeclared variable '" + v->name + "'");
        }
        return v->index ? info->type.inner() : info->type;
    }
    return type_of(p, *std::get<Lval::Deref>(lv.node).pointer).inner();
}

inline ObjType type_of(const TypedProgram& p, const Expr& e) {
    return std::visit(overloaded{
                          [](const Expr::Const&) { return ObjType::int_type(); },
                          [&](const Expr::Read& r) { return type_of(p, r.lval); },
                          [&](const Expr::AddrOf& a) { return ObjType::ptr_to(type_of(p, a.lval)); },
                          [](const Expr::BinOp&) { return ObjType::int_type(); },
                          [&](const Expr::PtrAdd& a) { return type_of(p, *a.pointer); },
                      },
                      e.node);
}

} // namespace flowmon
