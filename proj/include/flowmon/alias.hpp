#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flowmon/alias_function.hpp"
#include "flowmon/interpreter.hpp"
#include "flowmon/program.hpp"

namespace flowmon {

namespace detail {

/// Inclusion-based points-to over blocks. Array cells are collapsed into
/// their block; offsets never leave a block, so pointer arithmetic keeps
/// the pointee set.
class PointsTo {
  public:
    PointsTo(const TypedProgram& p, std::span<const Memory> seeds) : prog_(p), pts_(p.vars.size()) {
        for (const Memory& m : seeds) {
            for (std::uint32_t i = 0; i < m.size() && i < pts_.size(); ++i) {
                std::visit(overloaded{
                               [&](const ScalarVal& s) { seed(i, s.value); },
                               [&](const ArrayVal& a) {
                                   for (const Val& v : a.elems) {
                                       seed(i, v);
                                   }
                               },
                           },
                           m.at(BlockId{i}));
            }
        }
        for_each_instr(p.body, [&](const Instr& i) {
            if (const auto* a = assign_fields(i)) {
                assigns_.push_back(a);
            }
        });
        solve();
    }

    [[nodiscard]] BlockSet targets(const Lval& lv) const {
        if (const auto* v = std::get_if<Lval::Var>(&lv.node)) {
            const auto it = prog_.env.find(v->name);
            return it == prog_.env.end() ? BlockSet{} : BlockSet{it->second};
        }
        return vals(*std::get<Lval::Deref>(lv.node).pointer);
    }

    [[nodiscard]] AliasFunction result() const {
        std::vector<BlockSet> sets(static_cast<std::size_t>(prog_.assign_count));
        for (const AssignFields* a : assigns_) {
            sets.at(static_cast<std::size_t>(a->id)) = targets(a->target);
        }
        return AliasFunction(std::move(sets));
    }

  private:
    void seed(std::uint32_t holder, const Val& v) {
        if (const auto* p = std::get_if<Ptr>(&v); p && p->loc.block.index < pts_.size()) {
            pts_[holder].insert(p->loc.block);
        }
    }

    [[nodiscard]] BlockSet vals(const Expr& e) const {
        return std::visit(overloaded{
                              [&](const Expr::Read& r) {
                                  BlockSet out;
                                  for (const BlockId t : targets(r.lval)) {
                                      out.insert(pts_[t.index].begin(), pts_[t.index].end());
                                  }
                                  return out;
                              },
                              [&](const Expr::AddrOf& a) { return targets(a.lval); },
                              [&](const Expr::PtrAdd& a) { return vals(*a.pointer); },
                              [](const auto&) { return BlockSet{}; },
                          },
                          e.node);
    }

    void solve() {
        // Naive iteration; the programs are small and every round adds a block.
        bool changed = true;
        while (changed) {
            changed = false;
            for (const AssignFields* a : assigns_) {
                const BlockSet v = vals(*a->value);
                if (v.empty()) {
                    continue;
                }
                for (const BlockId t : targets(a->target)) {
                    const std::size_t before = pts_[t.index].size();
                    pts_[t.index].insert(v.begin(), v.end());
                    changed = changed || pts_[t.index].size() != before;
                }
            }
        }
    }

    const TypedProgram& prog_;
    std::vector<BlockSet> pts_;
    std::vector<const AssignFields*> assigns_;
};

} // namespace detail

/// Points-to analysis seeded from the program's initial memory.
inline AliasFunction compute_alias(const TypedProgram& p) {
    return detail::PointsTo(p, std::span<const Memory>(&p.initial_memory, 1)).result();
}

/// Variant seeded from several possible initial memories, for runs that do
/// not start from the declared initializers.
inline AliasFunction compute_alias(const TypedProgram& p, std::span<const Memory> initial_memories) {
    std::vector<Memory> seeds(initial_memories.begin(), initial_memories.end());
    seeds.push_back(p.initial_memory);
    return detail::PointsTo(p, seeds).result();
}

struct AdmissibilityVerdict {
    enum class Kind { pass, counterexample, timeout };
    Kind kind = Kind::pass;
    int assign_id = -1;
    SourcePos pos;
    BlockId block;
    std::optional<Memory> snapshot;

    [[nodiscard]] bool passed() const { return kind == Kind::pass; }
};

namespace detail {
struct StopAdmissibility {};
} // namespace detail

/// Follows the concrete run from `m` and checks, at each assignment reached,
/// that the written block is in the alias set. Faults propagate.
inline AdmissibilityVerdict check_admissible(const AliasFunction& f, const TypedProgram& p, std::uint64_t fuel,
                                             const Memory& m) {
    AdmissibilityVerdict verdict;
    ExecHooks hooks;
    hooks.before_write = [&](const Instr& i, const AssignFields& a, const Loc& loc, const Memory& cur) {
        if (a.id >= 0 && static_cast<std::size_t>(a.id) < f.size() && f.at(a.id).contains(loc.block)) {
            return;
        }
        verdict.kind = AdmissibilityVerdict::Kind::counterexample;
        verdict.assign_id = a.id;
        verdict.pos = i.pos;
        verdict.block = loc.block;
        verdict.snapshot = cur;
        throw detail::StopAdmissibility{};
    };
    EvalContext ctx;
    ctx.env = &p.env;
    ctx.fuel = fuel;
    ctx.track_labels = false;
    ctx.hooks = &hooks;
    try {
        exec(ctx, *p.body, m, LabelMemory{});
    } catch (const detail::StopAdmissibility&) {
        return verdict;
    } catch (const FuelExhausted&) {
        verdict.kind = AdmissibilityVerdict::Kind::timeout;
    }
    return verdict;
}

inline AdmissibilityVerdict check_admissible(const AliasFunction& f, const TypedProgram& p, std::uint64_t fuel) {
    return check_admissible(f, p, fuel, p.initial_memory);
}

/// One line per assignment occurrence: `<file:line:col> -> {x, y}`.
inline std::string format_alias(const AliasFunction& f, const TypedProgram& p, const std::string& file) {
    std::vector<std::pair<int, SourcePos>> sites;
    for_each_instr(p.body, [&](const Instr& i) {
        if (const auto* a = assign_fields(i)) {
            sites.emplace_back(a->id, i.pos);
        }
    });
    std::sort(sites.begin(), sites.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    std::string out;
    for (const auto& [id, pos] : sites) {
        out += file + ":" + to_string(pos) + " -> {";
        bool first = true;
        for (const BlockId b : f.at(id)) {
            out += (first ? "" : ", ") + p.var_info(b).name;
            first = false;
        }
        out += "}\n";
    }
    return out;
}

} // namespace flowmon
