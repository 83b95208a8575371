#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace flowmon {

/// A security level: a 64-bit vector where every bit is an independent
/// secrecy dimension. Bottom is the empty set, join is union, order is subset.
class Label {
  public:
    constexpr Label() = default;
    constexpr explicit Label(std::uint64_t bits) : bits_(bits) {}

    static constexpr Label bottom() { return Label{}; }
    static constexpr Label top() { return Label{~std::uint64_t{0}}; }
    static constexpr Label public_level() { return Label{}; }
    static constexpr Label private_level() { return Label{1}; }

    [[nodiscard]] constexpr std::uint64_t bits() const { return bits_; }
    [[nodiscard]] constexpr bool is_bottom() const { return bits_ == 0; }

    constexpr bool operator==(const Label&) const = default;

  private:
    std::uint64_t bits_ = 0;
};

constexpr Label label_join(Label a, Label b) { return Label{a.bits() | b.bits()}; }

constexpr bool label_leq(Label a, Label b) { return (a.bits() & ~b.bits()) == 0; }

constexpr Label operator|(Label a, Label b) { return label_join(a, b); }

constexpr Label& operator|=(Label& a, Label b) {
    a = label_join(a, b);
    return a;
}

inline std::string to_string(Label l) {
    if (l.bits() == 0) {
        return "public";
    }
    if (l.bits() == 1) {
        return "private";
    }
    return std::to_string(l.bits());
}

} // namespace flowmon
