#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "flowmon/ast.hpp"
#include "flowmon/elaborate.hpp"
#include "flowmon/program.hpp"

namespace flowmon {

/// Knobs for random program generation. Every pool may be empty except `ints`.
struct GenConfig {
    std::uint64_t seed = 0;
    int max_stmts = 8;
    int max_expr_depth = 2;
    int ints = 3;
    int int_arrays = 1;
    int pointers = 2;
    int pointer_arrays = 1;
    int double_pointers = 1;
    /// Probability that a block starts with a non-bottom label.
    double secret_fraction = 0.4;
    /// Labels are drawn from this many low bits.
    int label_bits = 2;
    std::uint64_t fuel = 2000;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of instance `index` in a run seeded with `seed`.
inline std::uint64_t instance_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ index);
}

/// Loop counters are named with this prefix; random stores never point at them.
inline constexpr char kCounterPrefix = 'k';

namespace detail {

class ProgramGenerator {
  public:
    explicit ProgramGenerator(const GenConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {}

    SourceProgram run() {
        SourceProgram out;
        for (int i = 0; i < std::max(cfg_.ints, 1); ++i) {
            ints_.push_back("v" + std::to_string(i));
            out.decls.push_back(scalar(ints_.back(), ObjType::int_type(), constant(small())));
        }
        for (int i = 0; i < cfg_.int_arrays; ++i) {
            const std::int64_t len = std::int64_t{1} << pick(0, 3);
            arrays_.emplace_back("a" + std::to_string(i), len);
            Declaration d{arrays_.back().first, ObjType::array_of(ObjType::int_type(), len), {}, true, {}, {}};
            for (std::int64_t k = 0; k < len; ++k) {
                d.init.push_back(constant(small()));
            }
            out.decls.push_back(std::move(d));
        }
        const bool have_int_ptrs = cfg_.pointers + cfg_.pointer_arrays > 0;
        for (int i = 0; i < cfg_.pointers; ++i) {
            ptrs_.push_back("p" + std::to_string(i));
            out.decls.push_back(scalar(ptrs_.back(), ObjType::ptr_to(ObjType::int_type()), int_address()));
        }
        for (int i = 0; i < cfg_.pointer_arrays; ++i) {
            const std::int64_t len = std::int64_t{1} << pick(0, 2);
            ptr_arrays_.emplace_back("b" + std::to_string(i), len);
            Declaration d{ptr_arrays_.back().first, ObjType::array_of(ObjType::ptr_to(ObjType::int_type()), len),
                          {},
                          true,
                          {},
                          {}};
            for (std::int64_t k = 0; k < len; ++k) {
                d.init.push_back(int_address());
            }
            out.decls.push_back(std::move(d));
        }
        for (int i = 0; have_int_ptrs && i < cfg_.double_pointers; ++i) {
            dptrs_.push_back("q" + std::to_string(i));
            out.decls.push_back(
                scalar(dptrs_.back(), ObjType::ptr_to(ObjType::ptr_to(ObjType::int_type())), ptr_address()));
        }
        for (int i = 0; i < kMaxLoopNesting; ++i) {
            out.decls.push_back(scalar(std::string(1, kCounterPrefix) + std::to_string(i), ObjType::int_type(), nullptr));
        }
        int budget = std::max(cfg_.max_stmts, 1);
        out.body = make_seq(block(budget, 0, 0));
        return out;
    }

  private:
    static constexpr int kMaxLoopNesting = 2;

    static Declaration scalar(std::string name, ObjType t, ExprPtr init) {
        Declaration d{std::move(name), std::move(t), {}, false, {}, {}};
        if (init) {
            d.init.push_back(std::move(init));
        }
        return d;
    }

    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
    std::int64_t small() { return pick(-3, 9); }

    template <class T>
    const T& any(const std::vector<T>& v) {
        return v[static_cast<std::size_t>(pick(0, static_cast<int>(v.size()) - 1))];
    }

    [[nodiscard]] bool has_int_ptrs() const { return !ptrs_.empty() || !ptr_arrays_.empty(); }

    // -- constant initializers ------------------------------------------------

    ExprPtr int_address() {
        if (!arrays_.empty() && chance(0.4)) {
            const auto& [name, len] = any(arrays_);
            return addr_of(elem(name, constant(pick(0, static_cast<int>(len) - 1))));
        }
        return addr_of(var(any(ints_)));
    }

    ExprPtr ptr_address() {
        if (!ptr_arrays_.empty() && (ptrs_.empty() || chance(0.4))) {
            const auto& [name, len] = any(ptr_arrays_);
            return addr_of(elem(name, constant(pick(0, static_cast<int>(len) - 1))));
        }
        return addr_of(var(any(ptrs_)));
    }

    // -- expressions ----------------------------------------------------------

    ExprPtr index(std::int64_t len, int d) {
        if (len == 1) {
            return constant(0);
        }
        return binop(BinOpKind::BitAnd, int_expr(d - 1), constant(len - 1));
    }

    ExprPtr int_expr(int d) {
        if (d < -1) {
            return chance(0.5) ? constant(small()) : read_var(any(ints_));
        }
        for (;;) {
            switch (pick(0, 9)) {
            case 0:
            case 1: return constant(small());
            case 2:
            case 3:
            case 4: return read_var(any(ints_));
            case 5:
                if (!arrays_.empty()) {
                    const auto& [name, len] = any(arrays_);
                    return read(elem(name, index(len, d)));
                }
                break;
            case 6:
                if (has_int_ptrs()) {
                    return read(deref(ptr_expr(d - 1)));
                }
                break;
            default:
                if (d > 0) {
                    static constexpr BinOpKind ops[] = {BinOpKind::Add, BinOpKind::Sub, BinOpKind::Mul,
                                                        BinOpKind::BitOr, BinOpKind::BitAnd, BinOpKind::Eq,
                                                        BinOpKind::Lt};
                    return binop(ops[pick(0, 6)], int_expr(d - 1), int_expr(d - 1));
                }
                break;
            }
        }
    }

    /// Expression of type `int *`.
    ExprPtr ptr_expr(int d) {
        if (d < -1) {
            return ptrs_.empty() || chance(0.5) ? addr_of(var(any(ints_))) : read_var(any(ptrs_));
        }
        for (;;) {
            switch (pick(0, 9)) {
            case 0:
            case 1:
                if (!ptrs_.empty()) {
                    return read_var(any(ptrs_));
                }
                break;
            case 2:
                if (!ptr_arrays_.empty()) {
                    const auto& [name, len] = any(ptr_arrays_);
                    return read(elem(name, index(len, d)));
                }
                break;
            case 3:
                if (!dptrs_.empty() && d > 0) {
                    return read(deref(dptr_expr(d - 1)));
                }
                break;
            case 4:
            case 5: return addr_of(var(any(ints_)));
            case 6:
                if (!arrays_.empty()) {
                    const auto& [name, len] = any(arrays_);
                    return addr_of(elem(name, index(len, d)));
                }
                break;
            case 7:
            case 8:
                if (!arrays_.empty()) {
                    const auto& [name, len] = any(arrays_);
                    return ptr_add(addr_of(elem(name, constant(0))), index(len, d));
                }
                break;
            default:
                // Unchecked arithmetic; may leave the block or hit a scalar.
                if (chance(0.3)) {
                    return ptr_add(ptr_expr(d - 1), constant(pick(0, 1)));
                }
                break;
            }
        }
    }

    /// Expression of type `int **`.
    ExprPtr dptr_expr(int d) {
        if (d < -1) {
            return dptrs_.empty() ? addr_of(var(any(ptrs_))) : read_var(any(dptrs_));
        }
        for (;;) {
            switch (pick(0, 4)) {
            case 0:
            case 1:
                if (!dptrs_.empty()) {
                    return read_var(any(dptrs_));
                }
                break;
            case 2:
                if (!ptrs_.empty()) {
                    return addr_of(var(any(ptrs_)));
                }
                break;
            case 3:
                if (!ptr_arrays_.empty()) {
                    const auto& [name, len] = any(ptr_arrays_);
                    return addr_of(elem(name, index(len, d)));
                }
                break;
            default:
                if (!ptr_arrays_.empty()) {
                    const auto& [name, len] = any(ptr_arrays_);
                    return ptr_add(addr_of(elem(name, constant(0))), index(len, d));
                }
                break;
            }
        }
    }

    // -- statements -----------------------------------------------------------

    InstrPtr assignment() {
        const int d = cfg_.max_expr_depth;
        for (;;) {
            switch (pick(0, 9)) {
            case 0:
            case 1:
            case 2: return assign(var(any(ints_)), int_expr(d));
            case 3:
                if (!arrays_.empty()) {
                    const auto& [name, len] = any(arrays_);
                    return assign(elem(name, index(len, d)), int_expr(d));
                }
                break;
            case 4:
                if (has_int_ptrs()) {
                    return assign(deref(ptr_expr(d - 1)), int_expr(d));
                }
                break;
            case 5:
            case 6:
                if (!ptrs_.empty()) {
                    return assign(var(any(ptrs_)), ptr_expr(d));
                }
                break;
            case 7:
                if (!ptr_arrays_.empty()) {
                    const auto& [name, len] = any(ptr_arrays_);
                    return assign(elem(name, index(len, d)), ptr_expr(d));
                }
                break;
            case 8:
                if (!dptrs_.empty()) {
                    return assign(deref(dptr_expr(d - 1)), ptr_expr(d));
                }
                break;
            default:
                if (!dptrs_.empty()) {
                    return assign(var(any(dptrs_)), dptr_expr(d));
                }
                break;
            }
        }
    }

    std::vector<InstrPtr> block(int& budget, int if_depth, int loop_depth) {
        std::vector<InstrPtr> out;
        const int length = pick(1, std::max(1, std::min(budget, 4)));
        for (int n = 0; n < length && budget > 0; ++n) {
            --budget;
            const int kind = pick(0, 9);
            if (kind == 0 && if_depth < 2) {
                auto cond = int_expr(cfg_.max_expr_depth);
                auto t = block(budget, if_depth + 1, loop_depth);
                auto e = chance(0.6) ? block(budget, if_depth + 1, loop_depth) : std::vector<InstrPtr>{};
                out.push_back(if_then_else(std::move(cond), make_seq(t), make_seq(e)));
            } else if (kind == 1 && loop_depth < kMaxLoopNesting) {
                loop(budget, if_depth, loop_depth, out);
            } else {
                out.push_back(assignment());
            }
        }
        return out;
    }

    void loop(int& budget, int if_depth, int loop_depth, std::vector<InstrPtr>& out) {
        const std::string k = std::string(1, kCounterPrefix) + std::to_string(loop_depth);
        const ExprPtr bound =
            chance(0.5) ? constant(pick(0, 3)) : binop(BinOpKind::BitAnd, int_expr(cfg_.max_expr_depth - 1), constant(3));
        out.push_back(assign(var(k), constant(0)));
        auto body = block(budget, if_depth, loop_depth + 1);
        // Rarely leave out the increment so divergence is exercised.
        if (!chance(0.02)) {
            body.push_back(assign(var(k), binop(BinOpKind::Add, read_var(k), constant(1))));
        }
        out.push_back(while_loop(binop(BinOpKind::Lt, read_var(k), bound), make_seq(body)));
    }

    const GenConfig& cfg_;
    std::mt19937_64 rng_;
    std::vector<std::string> ints_;
    std::vector<std::pair<std::string, std::int64_t>> arrays_;
    std::vector<std::string> ptrs_;
    std::vector<std::pair<std::string, std::int64_t>> ptr_arrays_;
    std::vector<std::string> dptrs_;
};

} // namespace detail

/// Type-directed random program over every statement and expression form.
inline SourceProgram generate_source(const GenConfig& cfg) { return detail::ProgramGenerator(cfg).run(); }

/// generate_source followed by elaboration, which cannot fail for generated input.
inline TypedProgram generate_program(const GenConfig& cfg) { return elaborate(generate_source(cfg)); }

// ---------------------------------------------------------------------------
// Random stores

namespace detail {

inline bool pointable(const VarInfo& v) { return v.name.empty() || v.name.front() != kCounterPrefix; }

/// A valid value for a cell of type `t`: any integer, or the address of a
/// cell of the pointee type.
inline Val random_value(const TypedProgram& p, const ObjType& t, std::mt19937_64& rng) {
    if (t.is_int()) {
        return Num{std::uniform_int_distribution<std::int64_t>(-3, 9)(rng)};
    }
    std::vector<Loc> targets;
    for (const auto& v : p.vars) {
        if (!pointable(v)) {
            continue;
        }
        if (v.type == t.inner()) {
            targets.push_back(Loc{v.block, std::nullopt});
        } else if (v.type.is_array() && v.type.inner() == t.inner()) {
            for (std::int64_t k = 0; k < v.type.length(); ++k) {
                targets.push_back(Loc{v.block, k});
            }
        }
    }
    if (targets.empty()) {
        return Uninit{};
    }
    return Ptr{targets[std::uniform_int_distribution<std::size_t>(0, targets.size() - 1)(rng)]};
}

inline BlockVal random_block(const TypedProgram& p, const VarInfo& v, std::mt19937_64& rng) {
    if (!v.type.is_array()) {
        return ScalarVal{random_value(p, v.type, rng)};
    }
    ArrayVal a;
    for (std::int64_t k = 0; k < v.type.length(); ++k) {
        a.elems.push_back(random_value(p, v.type.inner(), rng));
    }
    return a;
}

} // namespace detail

/// Well-typed random memory for `p`. Loop counters keep their declared value.
inline Memory random_memory(const TypedProgram& p, std::mt19937_64& rng) {
    Memory m = p.initial_memory;
    for (const auto& v : p.vars) {
        if (detail::pointable(v)) {
            m.at(v.block) = detail::random_block(p, v, rng);
        }
    }
    return m;
}

/// Random initial labels: each block is non-bottom with probability
/// `secret_fraction`, drawing from the low `bits` bits.
inline LabelMemory random_labels(const TypedProgram& p, double secret_fraction, int bits, std::mt19937_64& rng) {
    LabelMemory g;
    const std::uint64_t top = (std::uint64_t{1} << bits) - 1;
    for (std::size_t i = 0; i < p.vars.size(); ++i) {
        const bool secret = std::bernoulli_distribution(secret_fraction)(rng);
        g.push(secret ? Label{std::uniform_int_distribution<std::uint64_t>(1, top)(rng)} : Label::bottom());
    }
    return g;
}

/// Two memories agreeing on every block whose initial label is below `s`;
/// every other block is redrawn in the second with probability 3/4.
inline std::pair<Memory, Memory> generate_s_equivalent_pair(const TypedProgram& p, Label s, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Memory m1 = random_memory(p, rng);
    Memory m2 = m1;
    for (const auto& v : p.vars) {
        if (!label_leq(p.initial_labels.at(v.block), s) && detail::pointable(v) &&
            std::bernoulli_distribution(0.75)(rng)) {
            m2.at(v.block) = detail::random_block(p, v, rng);
        }
    }
    return {std::move(m1), std::move(m2)};
}

} // namespace flowmon
