#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flowmon/alias.hpp"
#include "flowmon/ast.hpp"
#include "flowmon/diagnostic.hpp"
#include "flowmon/elaborate.hpp"
#include "flowmon/label_layout.hpp"
#include "flowmon/program.hpp"

namespace flowmon {

/// Names the instrumenter generates: anything containing `_status`, the top
/// level `pc` and the per-branch `pc_<n>`.
inline bool is_reserved_name(std::string_view name) {
    if (name.find("_status") != std::string_view::npos || name == "pc") {
        return true;
    }
    if (name.size() > 3 && name.substr(0, 3) == "pc_") {
        return std::all_of(name.begin() + 3, name.end(), [](char c) { return c >= '0' && c <= '9'; });
    }
    return false;
}

/// Where the shadow state of an instrumented program lives, plus the
/// operations that relate it to monitor state.
class InstrumentationPlan {
  public:
    struct VarLabels {
        std::string var;
        BlockId original;
        ObjType type = ObjType::int_type();
        std::vector<LabelDecl> decls;
        std::vector<BlockId> blocks;
    };

    std::vector<VarLabels> vars;
    std::vector<std::string> pc_names;
    std::vector<std::string> tmp_names;
    std::size_t original_block_count = 0;
    Environment env;
    Memory template_memory;

    /// Block of the depth-0 label (array summary or scalar label) of an original block.
    [[nodiscard]] BlockId status_block(BlockId original) const { return vars.at(original.index).blocks.front(); }

    /// Block of a label pointer (depth >= 1) or of an array's exact label array (depth 0).
    [[nodiscard]] BlockId label_block(BlockId original, LabelKind kind, int depth) const {
        const auto& v = vars.at(original.index);
        for (std::size_t i = 0; i < v.decls.size(); ++i) {
            const auto& l = v.decls[i].label;
            if (l.depth != depth) {
                continue;
            }
            if (depth == 0 && v.type.is_array() ? l.kind == LabelKind::Exact : l.kind == kind) {
                return v.blocks[i];
            }
        }
        throw std::out_of_range("no " + std::string(to_string(kind)) + " label at depth " + std::to_string(depth) +
                                " for '" + v.var + "'");
    }

    /// Value a label pointer of the given kind and depth must hold when the
    /// object pointer it shadows holds `v`.
    [[nodiscard]] Val mirror_value(const Val& v, LabelKind kind, int depth) const {
        const auto* p = std::get_if<Ptr>(&v);
        if (p == nullptr) {
            return Uninit{};
        }
        const BlockId target = p->loc.block;
        if (target.index >= vars.size()) {
            return Uninit{};
        }
        if (depth == 1) {
            if (kind == LabelKind::Summary || !vars[target.index].type.is_array()) {
                return Ptr{Loc{status_block(target), std::nullopt}};
            }
            return Ptr{Loc{label_block(target, LabelKind::Exact, 0), p->loc.offset}};
        }
        return Ptr{Loc{label_block(target, kind, depth - 1), p->loc.offset}};
    }

    /// Instrumented initial memory matching the monitor state (M, Γ).
    [[nodiscard]] Memory lift_memory(const Memory& m, const LabelMemory& g) const {
        Memory out = template_memory;
        for (std::uint32_t i = 0; i < original_block_count; ++i) {
            out.at(BlockId{i}) = m.at(BlockId{i});
        }
        for (const auto& v : vars) {
            for (std::size_t d = 0; d < v.decls.size(); ++d) {
                out.at(v.blocks[d]) = lifted(v, v.decls[d], m, g);
            }
        }
        return out;
    }

    /// Reads the depth-0 labels of an instrumented memory back as a label memory
    /// over the original blocks.
    [[nodiscard]] LabelMemory project_labels(const Memory& instrumented) const {
        LabelMemory out;
        for (const auto& v : vars) {
            const auto& bv = std::get<ScalarVal>(instrumented.at(v.blocks.front()));
            const auto* n = std::get_if<Num>(&bv.value);
            out.push(Label{n ? static_cast<std::uint64_t>(n->value) : 0});
        }
        return out;
    }

    /// First violation of the pointer mirroring invariant, if any.
    [[nodiscard]] std::optional<std::string> check_mirror(const Memory& instrumented) const {
        for (const auto& v : vars) {
            const BlockVal& obj = instrumented.at(v.original);
            for (std::size_t d = 0; d < v.decls.size(); ++d) {
                const auto& l = v.decls[d].label;
                if (l.depth == 0) {
                    continue;
                }
                const BlockVal& shadow = instrumented.at(v.blocks[d]);
                if (const auto* s = std::get_if<ScalarVal>(&obj)) {
                    if (std::get<ScalarVal>(shadow).value != mirror_value(s->value, l.kind, l.depth)) {
                        return v.decls[d].name + " does not mirror " + v.var;
                    }
                    continue;
                }
                const auto& cells = std::get<ArrayVal>(obj).elems;
                const auto& shadow_cells = std::get<ArrayVal>(shadow).elems;
                for (std::size_t c = 0; c < cells.size(); ++c) {
                    if (shadow_cells[c] != mirror_value(cells[c], l.kind, l.depth)) {
                        return v.decls[d].name + "[" + std::to_string(c) + "] does not mirror " + v.var + "[" +
                               std::to_string(c) + "]";
                    }
                }
            }
        }
        return std::nullopt;
    }

    /// True for assignments carried over from the source program, false for
    /// inserted monitor code.
    [[nodiscard]] bool is_original(const AssignFields& a) const { return only_original_names(a.target); }

  private:
    [[nodiscard]] BlockVal lifted(const VarLabels& v, const LabelDecl& d, const Memory& m, const LabelMemory& g) const {
        if (d.label.depth == 0) {
            const Val lbl = Num{static_cast<std::int64_t>(g.at(v.original).bits())};
            if (d.label.shape.is_array()) {
                return ArrayVal{std::vector<Val>(static_cast<std::size_t>(d.label.shape.length()), lbl)};
            }
            return ScalarVal{lbl};
        }
        const BlockVal& obj = m.at(v.original);
        if (const auto* s = std::get_if<ScalarVal>(&obj)) {
            return ScalarVal{mirror_value(s->value, d.label.kind, d.label.depth)};
        }
        ArrayVal out;
        for (const Val& cell : std::get<ArrayVal>(obj).elems) {
            out.elems.push_back(mirror_value(cell, d.label.kind, d.label.depth));
        }
        return out;
    }

    [[nodiscard]] bool is_original_var(const std::string& name) const {
        const auto it = env.find(name);
        return it != env.end() && it->second.index < original_block_count;
    }

    [[nodiscard]] bool only_original_names(const Lval& lv) const {
        if (const auto* v = std::get_if<Lval::Var>(&lv.node)) {
            return is_original_var(v->name) && (!v->index || only_original_names(*v->index));
        }
        return only_original_names(*std::get<Lval::Deref>(lv.node).pointer);
    }

    [[nodiscard]] bool only_original_names(const Expr& e) const {
        return std::visit(overloaded{
                              [](const Expr::Const&) { return true; },
                              [&](const Expr::Read& r) { return only_original_names(r.lval); },
                              [&](const Expr::AddrOf& a) { return only_original_names(a.lval); },
                              [&](const Expr::BinOp& b) {
                                  return only_original_names(*b.lhs) && only_original_names(*b.rhs);
                              },
                              [&](const Expr::PtrAdd& a) {
                                  return only_original_names(*a.pointer) && only_original_names(*a.offset);
                              },
                          },
                          e.node);
    }
};

struct Instrumented {
    TypedProgram program;
    InstrumentationPlan plan;
};

namespace detail {

class Instrumenter {
  public:
    Instrumenter(const TypedProgram& p, const AliasFunction& alias) : p_(p), alias_(alias) {}

    Instrumented run() {
        validate();
        SourceProgram src;
        for (const auto& v : p_.vars) {
            src.decls.push_back(original_declaration(v));
        }
        std::vector<std::vector<LabelDecl>> layouts;
        for (const auto& v : p_.vars) {
            layouts.push_back(label_decls(v.name, v.type));
            for (const auto& d : layouts.back()) {
                src.decls.push_back(label_declaration(v, d));
            }
        }
        Declaration top_pc{"pc", ObjType::int_type(), {constant(0)}, false, std::nullopt, {}};
        src.decls.push_back(top_pc);

        std::vector<InstrPtr> body;
        stmt(p_.body, "pc", body);
        src.body = make_seq(body);

        for (const auto& name : pc_names_) {
            src.decls.push_back(Declaration{name, ObjType::int_type(), {}, false, std::nullopt, {}});
        }
        for (const auto& name : tmp_names_) {
            src.decls.push_back(Declaration{name, ObjType::int_type(), {}, false, std::nullopt, {}});
        }

        Instrumented out{elaborate(src), {}};
        auto& plan = out.plan;
        plan.original_block_count = p_.vars.size();
        plan.env = out.program.env;
        plan.template_memory = out.program.initial_memory;
        plan.pc_names.push_back("pc");
        plan.pc_names.insert(plan.pc_names.end(), pc_names_.begin(), pc_names_.end());
        plan.tmp_names = tmp_names_;
        for (std::size_t i = 0; i < p_.vars.size(); ++i) {
            InstrumentationPlan::VarLabels vl{p_.vars[i].name, p_.vars[i].block, p_.vars[i].type, layouts[i], {}};
            for (const auto& d : layouts[i]) {
                vl.blocks.push_back(out.program.env.at(d.name));
            }
            plan.vars.push_back(std::move(vl));
        }
        return out;
    }

  private:
    // -- validation and declarations ---------------------------------------

    void validate() const {
        if (alias_.size() != static_cast<std::size_t>(p_.assign_count)) {
            throw std::invalid_argument("alias function does not cover every assignment");
        }
        for (const auto& v : p_.vars) {
            if (is_reserved_name(v.name)) {
                throw InstrumentError(v.pos, "'" + v.name + "' collides with a reserved instrumentation name");
            }
            if (v.type.pointer_depth() > 2) {
                throw InstrumentError(v.pos, "'" + v.name + "' has pointer depth " +
                                                 std::to_string(v.type.pointer_depth()) +
                                                 "; at most 2 levels are supported");
            }
        }
    }

    ExprPtr value_expr(const Val& v) const {
        if (const auto* n = std::get_if<Num>(&v)) {
            return constant(n->value);
        }
        const auto& loc = std::get<Ptr>(v).loc;
        const auto& name = p_.var_info(loc.block).name;
        return addr_of(loc.offset ? elem(name, constant(*loc.offset)) : var(name));
    }

    /// Declaration whose initializer reproduces `contents`; `{}` means defaults.
    void set_initializer(Declaration& d, const BlockVal& contents) const {
        if (const auto* s = std::get_if<ScalarVal>(&contents)) {
            if (!std::holds_alternative<Uninit>(s->value)) {
                d.init.push_back(value_expr(s->value));
            }
            return;
        }
        const auto& cells = std::get<ArrayVal>(contents).elems;
        const auto uninit = std::count_if(cells.begin(), cells.end(),
                                          [](const Val& c) { return std::holds_alternative<Uninit>(c); });
        if (uninit == static_cast<std::ptrdiff_t>(cells.size())) {
            return;
        }
        if (uninit != 0) {
            throw InstrumentError(d.pos, "initial value of '" + d.name + "' mixes set and unset pointers");
        }
        d.braced = true;
        for (const Val& c : cells) {
            d.init.push_back(value_expr(c));
        }
    }

    Declaration original_declaration(const VarInfo& v) const {
        Declaration d{v.name, v.type, {}, false, v.annotation, v.pos};
        set_initializer(d, p_.initial_memory.at(v.block));
        return d;
    }

    Declaration label_declaration(const VarInfo& v, const LabelDecl& ld) const {
        Declaration d{ld.name, ld.label.shape, {}, false, std::nullopt, v.pos};
        const Label initial = p_.initial_labels.at(v.block);
        if (ld.init == LabelInit::annotation) {
            if (!initial.is_bottom()) {
                const auto bits = static_cast<std::int64_t>(initial.bits());
                if (ld.label.shape.is_array()) {
                    d.braced = true;
                    d.init.assign(static_cast<std::size_t>(ld.label.shape.length()), constant(bits));
                } else {
                    d.init.push_back(constant(bits));
                }
            }
            return d;
        }
        // Label pointers start out mirroring the object pointer.
        const BlockVal& obj = p_.initial_memory.at(v.block);
        if (const auto* s = std::get_if<ScalarVal>(&obj)) {
            if (const auto* ptr = std::get_if<Ptr>(&s->value)) {
                d.init.push_back(mirror_address(ptr->loc, ld.label.kind, ld.label.depth));
            }
            return d;
        }
        const auto& cells = std::get<ArrayVal>(obj).elems;
        if (std::holds_alternative<Ptr>(cells.front())) {
            d.braced = true;
            for (const Val& c : cells) {
                d.init.push_back(mirror_address(std::get<Ptr>(c).loc, ld.label.kind, ld.label.depth));
            }
        }
        return d;
    }

    /// `&label` for the label a pointer to `loc` is shadowed by.
    ExprPtr mirror_address(const Loc& loc, LabelKind kind, int depth) const {
        const VarInfo& target = p_.var_info(loc.block);
        std::string name;
        std::optional<std::int64_t> offset = loc.offset;
        if (depth == 1 && (kind == LabelKind::Summary || !target.type.is_array())) {
            name = label_name(target.name, kind, 0);
            offset.reset();
        } else if (depth == 1) {
            name = label_name(target.name, LabelKind::Exact, 0, true);
        } else {
            name = label_name(target.name, kind, depth - 1);
        }
        return addr_of(offset ? elem(name, constant(*offset)) : var(name));
    }

    // -- label expressions --------------------------------------------------

    using Stabilize = std::function<ExprPtr(const ExprPtr&)>;

    [[nodiscard]] const VarInfo& info(const std::string& name) const {
        const auto* v = p_.find_var(name);
        if (v == nullptr) {
            throw std::logic_error("unknown variable '" + name + "'");
        }
        return *v;
    }

    static ExprPtr status(const std::string& name) { return read_var(name + "_status"); }

    /// Expression for the label pointer of kind `kind` at depth `k` that
    /// shadows the pointer value of `e`.
    ExprPtr mirror(const Expr& e, int k, LabelKind kind, const Stabilize& stab) const {
        return std::visit(
            overloaded{
                [&](const Expr::Read& r) -> ExprPtr { return read(lhs_mirror(r.lval, k, kind, stab)); },
                [&](const Expr::AddrOf& a) -> ExprPtr {
                    if (const auto* v = std::get_if<Lval::Var>(&a.lval.node)) {
                        if (!v->index) {
                            return addr_of(var(k == 1 ? v->name + "_status" : label_name(v->name, kind, k - 1)));
                        }
                        if (k == 1 && kind == LabelKind::Summary) {
                            return addr_of(var(v->name + "_status"));
                        }
                        const std::string n =
                            k == 1 ? label_name(v->name, LabelKind::Exact, 0, true) : label_name(v->name, kind, k - 1);
                        return addr_of(elem(n, stab(v->index)));
                    }
                    return mirror(*std::get<Lval::Deref>(a.lval.node).pointer, k, kind, stab);
                },
                [&](const Expr::PtrAdd& a) -> ExprPtr {
                    // Offsets stay inside one block, so the summary target is unchanged.
                    if (k == 1 && kind == LabelKind::Summary) {
                        return mirror(*a.pointer, k, kind, stab);
                    }
                    return ptr_add(mirror(*a.pointer, k, kind, stab), stab(a.offset));
                },
                [](const auto&) -> ExprPtr { throw std::logic_error("mirror of a non-pointer expression"); },
            },
            e.node);
    }

    /// Lvalue of the label pointer shadowing the pointer stored at `lv`.
    Lval lhs_mirror(const Lval& lv, int k, LabelKind kind, const Stabilize& stab) const {
        if (const auto* v = std::get_if<Lval::Var>(&lv.node)) {
            const std::string n = label_name(v->name, kind, k);
            return v->index ? elem(n, stab(v->index)) : var(n);
        }
        return deref(mirror(*std::get<Lval::Deref>(lv.node).pointer, k + 1, kind, stab));
    }

    void atoms(const Expr& e, const Stabilize& stab, std::vector<ExprPtr>& out) const {
        std::visit(overloaded{
                       [&](const Expr::Const&) { out.push_back(constant(0)); },
                       [&](const Expr::Read& r) {
                           if (const auto* v = std::get_if<Lval::Var>(&r.lval.node)) {
                               out.push_back(status(v->name));
                               if (v->index) {
                                   atoms(*v->index, stab, out);
                               }
                               return;
                           }
                           const auto& q = *std::get<Lval::Deref>(r.lval.node).pointer;
                           atoms(q, stab, out);
                           out.push_back(read(deref(mirror(q, 1, LabelKind::Summary, stab))));
                       },
                       [&](const Expr::AddrOf& a) {
                           out.push_back(constant(0));
                           location_atoms(a.lval, stab, out);
                       },
                       [&](const Expr::BinOp& b) {
                           atoms(*b.lhs, stab, out);
                           atoms(*b.rhs, stab, out);
                       },
                       [&](const Expr::PtrAdd& a) {
                           atoms(*a.pointer, stab, out);
                           atoms(*a.offset, stab, out);
                       },
                   },
                   e.node);
    }

    /// Label of the location an lvalue denotes (not of its contents).
    void location_atoms(const Lval& lv, const Stabilize& stab, std::vector<ExprPtr>& out) const {
        if (const auto* v = std::get_if<Lval::Var>(&lv.node)) {
            if (v->index) {
                atoms(*v->index, stab, out);
            }
            return;
        }
        atoms(*std::get<Lval::Deref>(lv.node).pointer, stab, out);
    }

    /// Right-nested join of the atoms, duplicates removed.
    static ExprPtr fold(const std::vector<ExprPtr>& in) {
        std::vector<ExprPtr> uniq;
        for (const auto& a : in) {
            if (std::none_of(uniq.begin(), uniq.end(), [&](const ExprPtr& u) { return equal(u, a); })) {
                uniq.push_back(a);
            }
        }
        if (uniq.empty()) {
            return constant(0);
        }
        ExprPtr acc = uniq.back();
        for (auto it = uniq.rbegin() + 1; it != uniq.rend(); ++it) {
            acc = binop(BinOpKind::BitOr, *it, acc);
        }
        return acc;
    }

    static InstrPtr join_into(Lval target, ExprPtr s) {
        ExprPtr current = read(target);
        return assign(std::move(target), binop(BinOpKind::BitOr, std::move(current), std::move(s)));
    }

    // -- statements ---------------------------------------------------------

    [[nodiscard]] bool reads_unstable(const Expr& e, const BlockSet& written) const {
        return std::visit(overloaded{
                              [](const Expr::Const&) { return false; },
                              [&](const Expr::Read& r) { return lval_unstable(r.lval, written); },
                              [&](const Expr::AddrOf& a) { return lval_unstable(a.lval, written); },
                              [&](const Expr::BinOp& b) {
                                  return reads_unstable(*b.lhs, written) || reads_unstable(*b.rhs, written);
                              },
                              [&](const Expr::PtrAdd& a) {
                                  return reads_unstable(*a.pointer, written) || reads_unstable(*a.offset, written);
                              },
                          },
                          e.node);
    }

    [[nodiscard]] bool lval_unstable(const Lval& lv, const BlockSet& written) const {
        if (const auto* v = std::get_if<Lval::Var>(&lv.node)) {
            return written.contains(info(v->name).block) || (v->index && reads_unstable(*v->index, written));
        }
        return true;
    }

    /// True if a label expression reads a label that the inserted writes of
    /// an assignment with alias set `written` may change.
    [[nodiscard]] bool label_unstable(const Expr& e, const BlockSet& written) const {
        return std::visit(overloaded{
                              [](const Expr::Const&) { return false; },
                              [&](const Expr::Read& r) {
                                  const auto* v = std::get_if<Lval::Var>(&r.lval.node);
                                  if (v == nullptr) {
                                      return true;
                                  }
                                  for (const BlockId b : written) {
                                      if (v->name.starts_with(p_.var_info(b).name + "_status")) {
                                          return true;
                                      }
                                  }
                                  return v->index && label_unstable(*v->index, written);
                              },
                              [](const Expr::AddrOf&) { return false; },
                              [&](const Expr::BinOp& b) {
                                  return label_unstable(*b.lhs, written) || label_unstable(*b.rhs, written);
                              },
                              [&](const Expr::PtrAdd& a) {
                                  return label_unstable(*a.pointer, written) || label_unstable(*a.offset, written);
                              },
                          },
                          e.node);
    }

    void joins(const BlockSet& blocks, const std::string& pc, std::vector<InstrPtr>& out) const {
        for (const BlockId b : blocks) {
            out.push_back(join_into(var(p_.var_info(b).name + "_status"), read_var(pc)));
        }
    }

    void assignment(const Instr& i, const AssignFields& a, const std::string& pc, std::vector<InstrPtr>& out) {
        const BlockSet& written = alias_.at(a.id);
        std::vector<InstrPtr> pre;
        std::vector<std::pair<ExprPtr, std::string>> hoisted;
        // Index and offset expressions are copied into code that runs after
        // the original statement; anything the statement may change is
        // captured beforehand.
        const Stabilize stab = [&](const ExprPtr& e) -> ExprPtr {
            if (!reads_unstable(*e, written)) {
                return e;
            }
            for (const auto& [expr, name] : hoisted) {
                if (equal(expr, e)) {
                    return read_var(name);
                }
            }
            const std::string name = "tmp_status_" + std::to_string(tmp_names_.size() + 1);
            tmp_names_.push_back(name);
            hoisted.emplace_back(e, name);
            pre.push_back(assign(var(name), e));
            return read_var(name);
        };

        // Labels are read in the pre-state. An expression used after inserted
        // writes that may change what it reads is evaluated up front.
        const auto settle = [&](ExprPtr e) {
            if (!label_unstable(*e, written)) {
                return e;
            }
            const std::string name = "tmp_status_" + std::to_string(tmp_names_.size() + 1);
            tmp_names_.push_back(name);
            pre.push_back(assign(var(name), std::move(e)));
            return read_var(name);
        };

        std::vector<ExprPtr> parts;
        atoms(*a.value, stab, parts);
        location_atoms(a.target, stab, parts);
        parts.push_back(read_var(pc));
        const bool scalar_target = std::holds_alternative<Lval::Var>(a.target.node) &&
                                   !std::get<Lval::Var>(a.target.node).index;
        // A scalar target uses s once, before any other inserted write.
        const ExprPtr s = scalar_target ? fold(parts) : settle(fold(parts));

        std::vector<InstrPtr> post;
        const ObjType target_t = type_of(p_, a.target);
        const int depth = target_t.pointer_depth();
        auto mirrors = [&] {
            for (int k = 1; k <= depth; ++k) {
                for (const LabelKind kind : {LabelKind::Summary, LabelKind::Exact}) {
                    post.push_back(assign(lhs_mirror(a.target, k, kind, stab), mirror(*a.value, k, kind, stab)));
                }
            }
        };
        if (const auto* v = std::get_if<Lval::Var>(&a.target.node)) {
            if (!v->index) {
                post.push_back(assign(var(v->name + "_status"), s));
            } else {
                post.push_back(join_into(var(v->name + "_status"), s));
                post.push_back(assign(elem(label_name(v->name, LabelKind::Exact, 0, true), stab(v->index)), s));
            }
            mirrors();
        } else {
            const auto& q = *std::get<Lval::Deref>(a.target.node).pointer;
            post.push_back(join_into(deref(mirror(q, 1, LabelKind::Summary, stab)), s));
            post.push_back(assign(deref(mirror(q, 1, LabelKind::Exact, stab)), s));
            mirrors();
        }
        if (written.size() > 1) {
            std::vector<ExprPtr> loc_parts;
            location_atoms(a.target, stab, loc_parts);
            loc_parts.push_back(read_var(pc));
            const ExprPtr j = settle(fold(loc_parts));
            for (const BlockId b : written) {
                post.push_back(join_into(var(p_.var_info(b).name + "_status"), j));
            }
        }

        out.insert(out.end(), pre.begin(), pre.end());
        out.push_back(std::make_shared<const Instr>(Instr{Instr::Assign{{a.target, a.value, -1}}, i.pos}));
        out.insert(out.end(), post.begin(), post.end());
    }

    ExprPtr condition_label(const std::string& base, const Expr& cond) const {
        std::vector<ExprPtr> parts{read_var(base)};
        atoms(cond, [](const ExprPtr& e) { return e; }, parts);
        return fold(parts);
    }

    std::string fresh_pc() {
        pc_names_.push_back("pc_" + std::to_string(pc_names_.size() + 1));
        return pc_names_.back();
    }

    void stmt(const InstrPtr& ip, const std::string& pc, std::vector<InstrPtr>& out) {
        const Instr& i = *ip;
        std::visit(overloaded{
                       [&](const Instr::Skip&) {},
                       [&](const Instr::Assign& a) { assignment(i, a, pc, out); },
                       [&](const Instr::AssignArrayElem& a) { assignment(i, a, pc, out); },
                       [&](const Instr::Seq& s) {
                           stmt(s.first, pc, out);
                           stmt(s.second, pc, out);
                       },
                       [&](const Instr::If& s) {
                           const std::string inner = fresh_pc();
                           out.push_back(assign(var(inner), condition_label(pc, *s.cond)));
                           std::vector<InstrPtr> then_out;
                           std::vector<InstrPtr> else_out;
                           stmt(s.then_branch, inner, then_out);
                           joins(collect_updates(alias_, *s.else_branch), inner, then_out);
                           stmt(s.else_branch, inner, else_out);
                           joins(collect_updates(alias_, *s.then_branch), inner, else_out);
                           out.push_back(if_then_else(s.cond, make_seq(then_out), make_seq(else_out), i.pos));
                       },
                       [&](const Instr::While& s) {
                           const std::string inner = fresh_pc();
                           out.push_back(assign(var(inner), condition_label(pc, *s.cond)));
                           std::vector<InstrPtr> body_out;
                           stmt(s.body, inner, body_out);
                           body_out.push_back(assign(var(inner), condition_label(inner, *s.cond)));
                           out.push_back(while_loop(s.cond, make_seq(body_out), i.pos));
                           joins(collect_updates(alias_, *s.body), inner, out);
                       },
                       [&](const Instr::Assert& a) {
                           if (a.label_expr) {
                               out.push_back(ip);
                           } else {
                               out.push_back(assert_label(status(a.var), a.bound, i.pos));
                           }
                       },
                   },
                   i.node);
    }

    const TypedProgram& p_;
    const AliasFunction& alias_;
    std::vector<std::string> pc_names_;
    std::vector<std::string> tmp_names_;
};

} // namespace detail

/// Inlines the monitor into `p`. The result is an ordinary program whose
/// `<x>_status` variables track the monitor's labels when run concretely.
/// Throws InstrumentError for reserved names or pointers deeper than two levels.
inline Instrumented instrument(const TypedProgram& p, const AliasFunction& alias) {
    return detail::Instrumenter(p, alias).run();
}

inline Instrumented instrument(const TypedProgram& p) { return instrument(p, compute_alias(p)); }

} // namespace flowmon
