#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flowmon/ast.hpp"
#include "flowmon/model.hpp"

namespace flowmon {

/// One declaration as written: `int *p = &x; /*@ private */`.
struct Declaration {
    std::string name;
    ObjType type = ObjType::int_type();
    /// Scalar initializer is a single expression; brace initializers list one per element.
    std::vector<ExprPtr> init;
    bool braced = false;
    std::optional<Label> annotation;
    SourcePos pos;
};

/// Parser output: declarations plus an untyped body (every `+` is a BinOp
/// and every assignment an Assign until elaboration).
struct SourceProgram {
    std::vector<Declaration> decls;
    InstrPtr body = skip();
};

struct VarInfo {
    std::string name;
    ObjType type = ObjType::int_type();
    BlockId block;
    std::optional<Label> annotation;
    SourcePos pos;
};

struct AssertionSite {
    SourcePos pos;
    std::string var;
    Label bound;
};

struct TypedProgram {
    std::vector<VarInfo> vars;
    Environment env;
    Memory initial_memory;
    LabelMemory initial_labels;
    InstrPtr body = skip();
    int assign_count = 0;

    [[nodiscard]] const VarInfo& var_info(BlockId b) const { return vars.at(b.index); }

    [[nodiscard]] const VarInfo* find_var(std::string_view name) const {
        const auto it = env.find(name);
        return it == env.end() ? nullptr : &vars[it->second.index];
    }

    [[nodiscard]] std::vector<AssertionSite> assertions() const {
        std::vector<AssertionSite> out;
        for_each_instr(body, [&](const Instr& i) {
            if (const auto* a = std::get_if<Instr::Assert>(&i.node)) {
                out.push_back({i.pos, a->var, a->bound});
            }
        });
        return out;
    }
};

/// Same variables, same initial stores, same body.
inline bool structurally_equal(const TypedProgram& a, const TypedProgram& b) {
    if (a.vars.size() != b.vars.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.vars.size(); ++i) {
        const auto& va = a.vars[i];
        const auto& vb = b.vars[i];
        if (va.name != vb.name || !(va.type == vb.type) || va.block != vb.block || va.annotation != vb.annotation) {
            return false;
        }
    }
    return a.initial_memory == b.initial_memory && a.initial_labels == b.initial_labels &&
           a.assign_count == b.assign_count && equal(a.body, b.body);
}

} // namespace flowmon
