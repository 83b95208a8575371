#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "flowmon/ast.hpp"
#include "flowmon/model.hpp"

namespace flowmon {

using BlockSet = std::set<BlockId>;

/// S_P: for every assignment occurrence (keyed by its elaboration id), the
/// blocks it may write.
class AliasFunction {
  public:
    AliasFunction() = default;
    explicit AliasFunction(std::vector<BlockSet> sets) : sets_(std::move(sets)) {}

    /// Every assignment may write every block.
    static AliasFunction top(int assign_count, std::size_t block_count) {
        BlockSet all;
        for (std::uint32_t i = 0; i < block_count; ++i) {
            all.insert(BlockId{i});
        }
        return AliasFunction(std::vector<BlockSet>(static_cast<std::size_t>(assign_count), all));
    }

    [[nodiscard]] std::size_t size() const { return sets_.size(); }

    [[nodiscard]] const BlockSet& at(int assign_id) const {
        if (assign_id < 0 || static_cast<std::size_t>(assign_id) >= sets_.size()) {
            throw std::out_of_range("no alias entry for assignment #" + std::to_string(assign_id));
        }
        return sets_[static_cast<std::size_t>(assign_id)];
    }
    BlockSet& at(int assign_id) {
        if (assign_id < 0 || static_cast<std::size_t>(assign_id) >= sets_.size()) {
            throw std::out_of_range("no alias entry for assignment #" + std::to_string(assign_id));
        }
        return sets_[static_cast<std::size_t>(assign_id)];
    }

    bool operator==(const AliasFunction&) const = default;

  private:
    std::vector<BlockSet> sets_;
};

/// Blocks the statement may modify, by structural recursion.
inline BlockSet collect_updates(const AliasFunction& alias, const Instr& i) {
    BlockSet out;
    std::visit(overloaded{
                   [&](const Instr::Assign& a) { out = alias.at(a.id); },
                   [&](const Instr::AssignArrayElem& a) { out = alias.at(a.id); },
                   [&](const Instr::Seq& s) {
                       out = collect_updates(alias, *s.first);
                       out.merge(collect_updates(alias, *s.second));
                   },
                   [&](const Instr::If& s) {
                       out = collect_updates(alias, *s.then_branch);
                       out.merge(collect_updates(alias, *s.else_branch));
                   },
                   [&](const Instr::While& s) { out = collect_updates(alias, *s.body); },
                   [](const auto&) {},
               },
               i.node);
    return out;
}

/// Joins `s` onto the label of every block the statement may modify.
inline LabelMemory update(const AliasFunction& alias, const Instr& i, Label s, LabelMemory g) {
    for (const BlockId b : collect_updates(alias, i)) {
        g.at(b) = label_join(g.at(b), s);
    }
    return g;
}

} // namespace flowmon
