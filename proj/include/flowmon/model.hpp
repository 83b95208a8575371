#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "flowmon/label.hpp"

namespace flowmon {

/// Dense block identifier, assigned in declaration order.
struct BlockId {
    std::uint32_t index = 0;

    auto operator<=>(const BlockId&) const = default;
};

/// A block plus an offset; the offset is present iff the location is an
/// array element.
struct Loc {
    BlockId block;
    std::optional<std::int64_t> offset;

    bool operator==(const Loc&) const = default;
};

struct Num {
    std::int64_t value = 0;
    bool operator==(const Num&) const = default;
};

struct Ptr {
    Loc loc;
    bool operator==(const Ptr&) const = default;
};

/// Value of a pointer declared without an initializer; traps on dereference.
struct Uninit {
    bool operator==(const Uninit&) const = default;
};

using Val = std::variant<Num, Ptr, Uninit>;

struct ScalarVal {
    Val value;
    bool operator==(const ScalarVal&) const = default;
};

struct ArrayVal {
    std::vector<Val> elems;
    bool operator==(const ArrayVal&) const = default;
};

using BlockVal = std::variant<ScalarVal, ArrayVal>;

/// Block -> contents. Total over the program's blocks; shapes never change.
class Memory {
  public:
    Memory() = default;
    explicit Memory(std::vector<BlockVal> blocks) : blocks_(std::move(blocks)) {}

    [[nodiscard]] std::size_t size() const { return blocks_.size(); }
    [[nodiscard]] bool contains(BlockId b) const { return b.index < blocks_.size(); }

    [[nodiscard]] const BlockVal& at(BlockId b) const {
        if (!contains(b)) {
            throw std::out_of_range("block " + std::to_string(b.index) + " not in memory");
        }
        return blocks_[b.index];
    }
    BlockVal& at(BlockId b) {
        if (!contains(b)) {
            throw std::out_of_range("block " + std::to_string(b.index) + " not in memory");
        }
        return blocks_[b.index];
    }

    BlockId push(BlockVal v) {
        blocks_.push_back(std::move(v));
        return BlockId{static_cast<std::uint32_t>(blocks_.size() - 1)};
    }

    bool operator==(const Memory&) const = default;

  private:
    std::vector<BlockVal> blocks_;
};

/// Block -> label (the monitor's Γ).
class LabelMemory {
  public:
    LabelMemory() = default;
    explicit LabelMemory(std::vector<Label> labels) : labels_(std::move(labels)) {}

    [[nodiscard]] std::size_t size() const { return labels_.size(); }
    [[nodiscard]] bool contains(BlockId b) const { return b.index < labels_.size(); }

    [[nodiscard]] Label at(BlockId b) const {
        if (!contains(b)) {
            throw std::out_of_range("block " + std::to_string(b.index) + " not in label memory");
        }
        return labels_[b.index];
    }
    Label& at(BlockId b) {
        if (!contains(b)) {
            throw std::out_of_range("block " + std::to_string(b.index) + " not in label memory");
        }
        return labels_[b.index];
    }

    void push(Label l) { labels_.push_back(l); }

    bool operator==(const LabelMemory&) const = default;

  private:
    std::vector<Label> labels_;
};

using Environment = std::map<std::string, BlockId, std::less<>>;

// ---------------------------------------------------------------------------
// Object types

class ObjType {
  public:
    enum class Kind { Int, Ptr, Array };

    static ObjType int_type() { return ObjType{Kind::Int, nullptr, 0}; }
    static ObjType ptr_to(ObjType t) { return ObjType{Kind::Ptr, std::make_shared<const ObjType>(std::move(t)), 0}; }
    static ObjType array_of(ObjType elem, std::int64_t length) {
        if (length <= 0) {
            throw std::invalid_argument("array length must be positive");
        }
        return ObjType{Kind::Array, std::make_shared<const ObjType>(std::move(elem)), length};
    }

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] bool is_int() const { return kind_ == Kind::Int; }
    [[nodiscard]] bool is_ptr() const { return kind_ == Kind::Ptr; }
    [[nodiscard]] bool is_array() const { return kind_ == Kind::Array; }

    /// Pointee for pointers, element type for arrays.
    [[nodiscard]] const ObjType& inner() const {
        if (!inner_) {
            throw std::logic_error("TInt has no inner type");
        }
        return *inner_;
    }
    [[nodiscard]] std::int64_t length() const { return length_; }

    /// Number of dereferences a value of this type admits (arrays: of the element).
    [[nodiscard]] int pointer_depth() const {
        switch (kind_) {
        case Kind::Int: return 0;
        case Kind::Ptr: return 1 + inner_->pointer_depth();
        case Kind::Array: return inner_->pointer_depth();
        }
        return 0;
    }

    friend bool operator==(const ObjType& a, const ObjType& b) {
        if (a.kind_ != b.kind_ || a.length_ != b.length_) {
            return false;
        }
        if (a.kind_ == Kind::Int) {
            return true;
        }
        return *a.inner_ == *b.inner_;
    }

  private:
    ObjType(Kind k, std::shared_ptr<const ObjType> inner, std::int64_t length)
        : kind_(k), inner_(std::move(inner)), length_(length) {}

    Kind kind_;
    std::shared_ptr<const ObjType> inner_;
    std::int64_t length_;
};

/// Renders in the constructor notation: `TArray (TPtr TInt) 10`.
inline std::string to_string(const ObjType& t) {
    switch (t.kind()) {
    case ObjType::Kind::Int: return "TInt";
    case ObjType::Kind::Ptr: {
        const auto inner = to_string(t.inner());
        return "TPtr " + (t.inner().is_int() ? inner : "(" + inner + ")");
    }
    case ObjType::Kind::Array: {
        const auto inner = to_string(t.inner());
        return "TArray " + (t.inner().is_int() ? inner : "(" + inner + ")") + " " + std::to_string(t.length());
    }
    }
    return "?";
}

/// C declaration of `name` with type `t`, e.g. `int *b[10]`.
inline std::string c_declaration(const ObjType& t, const std::string& name) {
    std::string declarator = name;
    const ObjType* cur = &t;
    std::string suffix;
    if (cur->is_array()) {
        suffix = "[" + std::to_string(cur->length()) + "]";
        cur = &cur->inner();
    }
    std::string stars;
    while (cur->is_ptr()) {
        stars += "*";
        cur = &cur->inner();
    }
    if (!cur->is_int()) {
        throw std::logic_error("type has no C declarator in this dialect: " + to_string(t));
    }
    return "int " + stars + declarator + suffix;
}

// ---------------------------------------------------------------------------
// Equivalence predicates

/// Structural equality of the contents of block `b` in both memories.
inline bool mem_equal(const Memory& m1, const Memory& m2, BlockId b) {
    if (!m1.contains(b) || !m2.contains(b)) {
        throw std::domain_error("mem_equal: block " + std::to_string(b.index) + " missing");
    }
    return m1.at(b) == m2.at(b);
}

/// Γ, s ⊢ M₁ ∼ M₂: memories agree on every block whose label is below s.
inline bool s_equivalent(const LabelMemory& g, Label s, const Memory& m1, const Memory& m2) {
    for (std::uint32_t i = 0; i < g.size(); ++i) {
        const BlockId b{i};
        if (label_leq(g.at(b), s) && !mem_equal(m1, m2, b)) {
            return false;
        }
    }
    return true;
}

/// s ⊢ Γ₂ ⊑ Γ₁: Γ₂ is below Γ₁ on every block whose Γ₁ label is below s.
inline bool less_restrictive_up_to(Label s, const LabelMemory& g2, const LabelMemory& g1) {
    for (std::uint32_t i = 0; i < g1.size(); ++i) {
        const BlockId b{i};
        if (label_leq(g1.at(b), s) && !label_leq(g2.at(b), g1.at(b))) {
            return false;
        }
    }
    return true;
}

} // namespace flowmon
