#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "flowmon/alias.hpp"
#include "flowmon/emit.hpp"
#include "flowmon/generator.hpp"
#include "flowmon/instrument.hpp"
#include "flowmon/interpreter.hpp"
#include "flowmon/parser.hpp"

namespace flowmon {

enum class VerdictKind { Pass, Timeout, Fault, Violation };

inline const char* to_string(VerdictKind k) {
    switch (k) {
    case VerdictKind::Pass: return "PASS";
    case VerdictKind::Timeout: return "TIMEOUT";
    case VerdictKind::Fault: return "FAULT";
    case VerdictKind::Violation: return "VIOLATION";
    }
    return "?";
}

enum class CheckKind { soundness, agreement, lemma };

inline const char* to_string(CheckKind k) {
    switch (k) {
    case CheckKind::soundness: return "soundness";
    case CheckKind::agreement: return "agreement";
    case CheckKind::lemma: return "lemma";
    }
    return "?";
}

/// Everything needed to rerun a failing instance without the generator.
struct Witness {
    CheckKind check = CheckKind::soundness;
    std::uint64_t seed = 0;
    std::uint64_t index = 0;
    TypedProgram program;
    Label s;
    Memory m1;
    Memory m2;
    LabelMemory g1;
    LabelMemory g2;
    /// Expression under test (lemma only).
    ExprPtr expr;
    std::optional<BlockId> block;
    std::string detail;
};

struct Verdict {
    VerdictKind kind = VerdictKind::Pass;
    std::string detail;
    std::optional<Witness> witness;
};

struct AdmissibilityTally {
    std::uint64_t checked = 0;
    std::uint64_t passed = 0;
    std::uint64_t timeouts = 0;
    std::uint64_t faults = 0;
};

struct CheckOptions {
    std::uint64_t fuel = 2000;
    Mutation mutation = Mutation::none;
    InvariantStats* stats = nullptr;
    AdmissibilityTally* admissibility = nullptr;
};

namespace detail {

inline std::string block_name(const TypedProgram& p, BlockId b) {
    return b.index < p.vars.size() ? p.var_info(b).name : "#" + std::to_string(b.index);
}

inline std::string show_block(const TypedProgram& p, const BlockVal& bv) {
    if (const auto* s = std::get_if<ScalarVal>(&bv)) {
        return print_value(p, s->value);
    }
    std::string out = "{";
    const auto& cells = std::get<ArrayVal>(bv).elems;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        out += (i ? ", " : "") + print_value(p, cells[i]);
    }
    return out + "}";
}

inline void tally_admissibility(const AliasFunction& f, const TypedProgram& p, const Memory& m,
                                const CheckOptions& opts) {
    if (opts.admissibility == nullptr) {
        return;
    }
    auto& t = *opts.admissibility;
    try {
        const auto v = check_admissible(f, p, opts.fuel, m);
        if (v.kind == AdmissibilityVerdict::Kind::timeout) {
            ++t.timeouts;
            return;
        }
        ++t.checked;
        if (v.passed()) {
            ++t.passed;
        }
    } catch (const Fault&) {
        ++t.faults;
    }
}

inline ExecOptions exec_options(const CheckOptions& opts) {
    ExecOptions e;
    e.fuel = opts.fuel;
    e.mutation = opts.mutation;
    e.stats = opts.stats;
    return e;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Soundness

/// Runs a soundness witness: both executions from (m1, g1) and (m2, g1)
/// under an alias function seeded with both memories.
inline Verdict replay_soundness(const Witness& w, const CheckOptions& opts = {}) {
    const TypedProgram& p = w.program;
    const std::array<Memory, 2> seeds{w.m1, w.m2};
    const AliasFunction alias = compute_alias(p, seeds);
    detail::tally_admissibility(alias, p, w.m1, opts);
    detail::tally_admissibility(alias, p, w.m2, opts);

    const auto eo = detail::exec_options(opts);
    const auto r1 = run_program(p.env, &alias, *p.body, w.m1, w.g1, eo);
    const auto r2 = run_program(p.env, &alias, *p.body, w.m2, w.g1, eo);
    Verdict v;
    if (r1.status == ExecStatus::timeout || r2.status == ExecStatus::timeout) {
        v.kind = VerdictKind::Timeout;
        return v;
    }
    if (r1.status == ExecStatus::fault || r2.status == ExecStatus::fault) {
        v.kind = VerdictKind::Fault;
        v.detail = (r1.fault ? *r1.fault : *r2.fault).describe();
        return v;
    }
    // The pair is symmetric, so the theorem applies in both directions.
    const std::array<const Outcome*, 2> out{&r1.outcome, &r2.outcome};
    for (int dir = 0; dir < 2; ++dir) {
        const Outcome& a = *out[static_cast<std::size_t>(dir)];
        const Outcome& b = *out[static_cast<std::size_t>(1 - dir)];
        for (std::uint32_t i = 0; i < a.labels.size(); ++i) {
            const BlockId blk{i};
            if (!label_leq(a.labels.at(blk), w.s)) {
                continue;
            }
            std::string problem;
            if (!label_leq(b.labels.at(blk), a.labels.at(blk))) {
                problem = "label " + to_string(b.labels.at(blk)) + " in run " + std::to_string(2 - dir) +
                          " exceeds " + to_string(a.labels.at(blk)) + " in run " + std::to_string(dir + 1);
            } else if (!mem_equal(a.memory, b.memory, blk)) {
                problem = "observable contents differ: " + detail::show_block(p, a.memory.at(blk)) + " vs " +
                          detail::show_block(p, b.memory.at(blk));
            }
            if (!problem.empty()) {
                v.kind = VerdictKind::Violation;
                v.detail = "block " + detail::block_name(p, blk) + ": " + problem;
                v.witness = w;
                v.witness->block = blk;
                v.witness->detail = v.detail;
                return v;
            }
        }
    }
    return v;
}

/// Monitor soundness on one generated s-equivalent pair, both runs from the
/// program's initial labels and pc = bottom.
inline Verdict check_soundness_instance(const TypedProgram& p, Label s, std::uint64_t seed,
                                        const CheckOptions& opts = {}) {
    auto [m1, m2] = generate_s_equivalent_pair(p, s, seed);
    Witness w;
    w.check = CheckKind::soundness;
    w.seed = seed;
    w.program = p;
    w.s = s;
    w.m1 = std::move(m1);
    w.m2 = std::move(m2);
    w.g1 = p.initial_labels;
    w.g2 = p.initial_labels;
    return replay_soundness(w, opts);
}

// ---------------------------------------------------------------------------
// Agreement between the monitor and the instrumented program

inline Verdict replay_agreement(const Witness& w, const CheckOptions& opts = {}) {
    const TypedProgram& p = w.program;
    const AliasFunction alias = compute_alias(p, std::span<const Memory>(&w.m1, 1));
    detail::tally_admissibility(alias, p, w.m1, opts);
    Verdict v;
    auto violation = [&](std::string msg) {
        v.kind = VerdictKind::Violation;
        v.detail = std::move(msg);
        v.witness = w;
        v.witness->detail = v.detail;
        return v;
    };

    const auto monitored = run_program(p.env, &alias, *p.body, w.m1, w.g1, detail::exec_options(opts));
    if (monitored.status == ExecStatus::timeout) {
        v.kind = VerdictKind::Timeout;
        return v;
    }
    if (monitored.status == ExecStatus::fault) {
        v.kind = VerdictKind::Fault;
        v.detail = monitored.fault->describe();
        return v;
    }

    const Instrumented ins = instrument(p, alias);
    const auto& plan = ins.plan;
    std::optional<std::string> mirror_problem;
    ExecHooks hooks;
    hooks.before_assign = [&](const Instr& i, const AssignFields& a, const Memory& m) {
        if (!mirror_problem && plan.is_original(a)) {
            if (auto err = plan.check_mirror(m)) {
                mirror_problem = "before line " + std::to_string(i.pos.line) + ": " + *err;
            }
        }
    };
    ExecOptions eo;
    eo.fuel = opts.fuel;
    eo.track_labels = false;
    eo.hooks = &hooks;
    const auto concrete = run_program(ins.program.env, nullptr, *ins.program.body, plan.lift_memory(w.m1, w.g1),
                                      LabelMemory{}, eo);
    if (concrete.status != ExecStatus::ok) {
        return violation(std::string("instrumented program ") +
                         (concrete.status == ExecStatus::fault ? "faulted: " + concrete.fault->describe()
                                                               : "ran out of fuel") +
                         " where the monitor terminated");
    }
    if (mirror_problem) {
        return violation("mirror invariant broken " + *mirror_problem);
    }
    if (auto err = plan.check_mirror(concrete.outcome.memory)) {
        return violation("mirror invariant broken at exit: " + *err);
    }
    const LabelMemory statuses = plan.project_labels(concrete.outcome.memory);
    for (std::uint32_t i = 0; i < p.vars.size(); ++i) {
        const BlockId b{i};
        if (statuses.at(b) != monitored.outcome.labels.at(b)) {
            auto out = violation(p.var_info(b).name + "_status = " + std::to_string(statuses.at(b).bits()) +
                                 " but the monitor computed " + std::to_string(monitored.outcome.labels.at(b).bits()));
            out.witness->block = b;
            return out;
        }
        if (!mem_equal(concrete.outcome.memory, monitored.outcome.memory, b)) {
            auto out = violation("original variable " + p.var_info(b).name + " ends with a different value");
            out.witness->block = b;
            return out;
        }
    }
    return v;
}

/// Runs the monitor and the instrumented program from the same random store
/// and compares every label and every original variable.
inline Verdict check_transform_agreement(const TypedProgram& p, std::uint64_t seed, const CheckOptions& opts = {}) {
    std::mt19937_64 rng(seed);
    Witness w;
    w.check = CheckKind::agreement;
    w.seed = seed;
    w.program = p;
    w.m1 = random_memory(p, rng);
    w.g1 = p.initial_labels;
    return replay_agreement(w, opts);
}

// ---------------------------------------------------------------------------
// Expression-evaluation lemma

struct LemmaOutcome {
    /// All premises held, so the conclusion was checked.
    bool premise = false;
    Verdict verdict;
};

inline LemmaOutcome replay_lemma(const Witness& w) {
    LemmaOutcome out;
    const TypedProgram& p = w.program;
    EvalContext ctx;
    ctx.env = &p.env;
    std::pair<Val, Label> r1;
    std::pair<Val, Label> r2;
    try {
        r1 = eval_expr(ctx, w.m1, w.g1, *w.expr);
        r2 = eval_expr(ctx, w.m2, w.g2, *w.expr);
    } catch (const Fault& f) {
        out.verdict.kind = VerdictKind::Fault;
        out.verdict.detail = f.describe();
        return out;
    }
    // Premises: M₁ and M₂ agree below s under Γ₁, Γ₂ ⊑ Γ₁ below s, and s₁ ⊑ s.
    if (!s_equivalent(w.g1, w.s, w.m1, w.m2) || !less_restrictive_up_to(w.s, w.g2, w.g1) ||
        !label_leq(r1.second, w.s)) {
        return out;
    }
    out.premise = true;
    if (r1.first != r2.first || !label_leq(r2.second, r1.second)) {
        out.verdict.kind = VerdictKind::Violation;
        out.verdict.detail = "expression " + emit_expr(*w.expr) + ": run 1 gives label " + to_string(r1.second) +
                             ", run 2 gives label " + to_string(r2.second) +
                             (r1.first != r2.first ? " and a different value" : "");
        out.verdict.witness = w;
        out.verdict.witness->detail = out.verdict.detail;
    }
    return out;
}

namespace detail {

inline void collect_exprs(const ExprPtr& e, std::vector<ExprPtr>& out);

inline void collect_lval_exprs(const Lval& lv, std::vector<ExprPtr>& out) {
    if (const auto* v = std::get_if<Lval::Var>(&lv.node)) {
        if (v->index) {
            collect_exprs(v->index, out);
        }
    } else {
        collect_exprs(std::get<Lval::Deref>(lv.node).pointer, out);
    }
}

inline void collect_exprs(const ExprPtr& e, std::vector<ExprPtr>& out) {
    out.push_back(e);
    std::visit(overloaded{
                   [&](const Expr::Read& r) { collect_lval_exprs(r.lval, out); },
                   [&](const Expr::AddrOf& a) { collect_lval_exprs(a.lval, out); },
                   [&](const Expr::BinOp& b) {
                       collect_exprs(b.lhs, out);
                       collect_exprs(b.rhs, out);
                   },
                   [&](const Expr::PtrAdd& a) {
                       collect_exprs(a.pointer, out);
                       collect_exprs(a.offset, out);
                   },
                   [](const auto&) {},
               },
               e->node);
}

/// A subexpression of the program, picked uniformly. Every one is well typed.
inline ExprPtr random_expression(const TypedProgram& p, std::mt19937_64& rng) {
    std::vector<ExprPtr> pool;
    for_each_instr(p.body, [&](const Instr& i) {
        if (const auto* a = assign_fields(i)) {
            collect_exprs(a->value, pool);
            collect_lval_exprs(a->target, pool);
        } else if (const auto* c = std::get_if<Instr::If>(&i.node)) {
            collect_exprs(c->cond, pool);
        } else if (const auto* w = std::get_if<Instr::While>(&i.node)) {
            collect_exprs(w->cond, pool);
        }
    });
    if (pool.empty()) {
        return constant(0);
    }
    return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
}

} // namespace detail

/// Lemma instance: random expression, random (M₁, Γ₁), Γ₂ below Γ₁ up to s,
/// and M₂ s-equivalent to M₁ under Γ₁.
inline LemmaOutcome check_lemma_instance(const TypedProgram& p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Witness w;
    w.check = CheckKind::lemma;
    w.seed = seed;
    w.program = p;
    w.expr = detail::random_expression(p, rng);
    w.s = Label{std::uniform_int_distribution<std::uint64_t>(0, 3)(rng)};
    w.m1 = random_memory(p, rng);
    w.g1 = random_labels(p, 0.5, 2, rng);
    w.m2 = w.m1;
    for (const auto& v : p.vars) {
        const Label l1 = w.g1.at(v.block);
        if (label_leq(l1, w.s)) {
            // Any subset of Γ₁(b).
            w.g2.push(Label{l1.bits() & rng()});
        } else {
            w.g2.push(Label{rng() & 3});
            if (detail::pointable(v) && std::bernoulli_distribution(0.75)(rng)) {
                w.m2.at(v.block) = detail::random_block(p, v, rng);
            }
        }
    }
    return replay_lemma(w);
}

// ---------------------------------------------------------------------------
// Fuzz driver

struct FuzzCounts {
    std::uint64_t pass = 0;
    std::uint64_t timeout = 0;
    std::uint64_t fault = 0;
    std::uint64_t violation = 0;

    void add(VerdictKind k) {
        switch (k) {
        case VerdictKind::Pass: ++pass; break;
        case VerdictKind::Timeout: ++timeout; break;
        case VerdictKind::Fault: ++fault; break;
        case VerdictKind::Violation: ++violation; break;
        }
    }
    [[nodiscard]] std::uint64_t total() const { return pass + timeout + fault + violation; }

    FuzzCounts& operator+=(const FuzzCounts& o) {
        pass += o.pass;
        timeout += o.timeout;
        fault += o.fault;
        violation += o.violation;
        return *this;
    }
};

inline std::string summary_line(const FuzzCounts& c) {
    return "PASS=" + std::to_string(c.pass) + " TIMEOUT=" + std::to_string(c.timeout) +
           " FAULT=" + std::to_string(c.fault) + " VIOLATION=" + std::to_string(c.violation);
}

struct FuzzOptions {
    std::uint64_t seed = 0;
    std::uint64_t start = 0;
    std::uint64_t count = 100;
    std::vector<CheckKind> checks{CheckKind::soundness};
    GenConfig gen;
    Mutation mutation = Mutation::none;
    /// Stop a check at its first violation.
    bool stop_at_violation = false;
    /// Keep at most this many witnesses per check.
    std::size_t max_witnesses = 5;
};

struct FuzzReport {
    struct PerCheck {
        CheckKind check = CheckKind::soundness;
        FuzzCounts counts;
        /// Lemma instances whose premise did not hold.
        std::uint64_t premise_unmet = 0;
        std::vector<Witness> witnesses;
    };
    std::vector<PerCheck> checks;
    InvariantStats stats;
    AdmissibilityTally admissibility;

    [[nodiscard]] FuzzCounts total() const {
        FuzzCounts t;
        for (const auto& c : checks) {
            t += c.counts;
        }
        return t;
    }
};

/// The program and label threshold of instance `index`: a generated program
/// whose initial labels are drawn at random, and s from {0, 1, 2}.
struct Instance {
    TypedProgram program;
    Label s;
    std::uint64_t seed = 0;
};

inline Instance make_instance(const GenConfig& base, std::uint64_t seed, std::uint64_t index) {
    Instance in;
    in.seed = instance_seed(seed, index);
    GenConfig cfg = base;
    cfg.seed = in.seed;
    in.program = generate_program(cfg);
    std::mt19937_64 rng(splitmix64(in.seed));
    in.program.initial_labels = random_labels(in.program, cfg.secret_fraction, cfg.label_bits, rng);
    in.s = Label{std::uniform_int_distribution<std::uint64_t>(0, 2)(rng)};
    return in;
}

inline Verdict run_instance(CheckKind check, const Instance& in, const CheckOptions& opts,
                            std::uint64_t* premise_unmet = nullptr) {
    switch (check) {
    case CheckKind::soundness: return check_soundness_instance(in.program, in.s, splitmix64(in.seed + 1), opts);
    case CheckKind::agreement: return check_transform_agreement(in.program, splitmix64(in.seed + 2), opts);
    case CheckKind::lemma: {
        auto r = check_lemma_instance(in.program, splitmix64(in.seed + 3));
        if (!r.premise && r.verdict.kind == VerdictKind::Pass && premise_unmet != nullptr) {
            ++*premise_unmet;
        }
        return r.verdict;
    }
    }
    return {};
}

/// Runs `count` instances of each requested check. Instances are independent
/// and fully determined by (seed, index).
inline FuzzReport fuzz(const FuzzOptions& o) {
    FuzzReport report;
    CheckOptions opts;
    opts.fuel = o.gen.fuel;
    opts.mutation = o.mutation;
    opts.stats = &report.stats;
    opts.admissibility = &report.admissibility;
    for (const CheckKind check : o.checks) {
        FuzzReport::PerCheck pc;
        pc.check = check;
        for (std::uint64_t i = o.start; i < o.start + o.count; ++i) {
            const Instance in = make_instance(o.gen, o.seed, i);
            std::uint64_t unmet_before = pc.premise_unmet;
            Verdict v = run_instance(check, in, opts, &pc.premise_unmet);
            if (pc.premise_unmet != unmet_before) {
                continue;
            }
            pc.counts.add(v.kind);
            if (v.kind == VerdictKind::Violation) {
                if (v.witness && pc.witnesses.size() < o.max_witnesses) {
                    v.witness->index = i;
                    pc.witnesses.push_back(*v.witness);
                }
                if (o.stop_at_violation) {
                    break;
                }
            }
        }
        report.checks.push_back(std::move(pc));
    }
    return report;
}

// ---------------------------------------------------------------------------
// Witness files

/// Human-readable store dump accompanying a witness's `.mc` file.
inline std::string format_witness_store(const Witness& w) {
    const TypedProgram& p = w.program;
    std::ostringstream out;
    out << "check " << to_string(w.check) << "\n";
    out << "seed " << w.seed << "\n";
    out << "index " << w.index << "\n";
    out << "s " << w.s.bits() << "\n";
    if (w.expr) {
        out << "expr " << emit_expr(*w.expr) << "\n";
    }
    if (w.block) {
        out << "block " << detail::block_name(p, *w.block) << "\n";
    }
    out << "detail " << w.detail << "\n";
    auto dump = [&](const char* tag, const Memory& m, const LabelMemory& g) {
        for (const auto& v : p.vars) {
            if (m.contains(v.block)) {
                out << tag << " " << v.name << " = " << detail::show_block(p, m.at(v.block));
                if (g.contains(v.block)) {
                    out << " label " << g.at(v.block).bits();
                }
                out << "\n";
            }
        }
    };
    dump("m1", w.m1, w.g1);
    if (w.check != CheckKind::agreement) {
        dump("m2", w.m2, w.check == CheckKind::lemma ? w.g2 : w.g1);
    }
    return out.str();
}

namespace detail {

inline Val parse_store_value(const TypedProgram& p, std::string_view t) {
    auto fail = [&]() -> Val { throw std::invalid_argument("bad value '" + std::string(t) + "' in witness store"); };
    if (t == "uninit") {
        return Uninit{};
    }
    if (!t.empty() && t.front() == '&') {
        std::string_view name = t.substr(1);
        std::optional<std::int64_t> off;
        if (const auto br = name.find('['); br != std::string_view::npos) {
            if (name.back() != ']') {
                return fail();
            }
            off = std::stoll(std::string(name.substr(br + 1, name.size() - br - 2)));
            name = name.substr(0, br);
        }
        const auto it = p.env.find(std::string(name));
        if (it == p.env.end()) {
            return fail();
        }
        return Ptr{Loc{it->second, off}};
    }
    try {
        std::size_t used = 0;
        const std::int64_t n = std::stoll(std::string(t), &used);
        if (used != t.size()) {
            return fail();
        }
        return Num{n};
    } catch (const std::logic_error&) {
        return fail();
    }
}

inline BlockVal parse_store_block(const TypedProgram& p, std::string_view t) {
    if (t.empty() || t.front() != '{') {
        return ScalarVal{parse_store_value(p, t)};
    }
    ArrayVal a;
    std::string_view inner = t.substr(1, t.size() - 2);
    while (!inner.empty()) {
        const auto comma = inner.find(',');
        std::string_view item = inner.substr(0, comma);
        while (!item.empty() && item.front() == ' ') {
            item.remove_prefix(1);
        }
        a.elems.push_back(parse_store_value(p, item));
        inner = comma == std::string_view::npos ? std::string_view{} : inner.substr(comma + 1);
    }
    return a;
}

} // namespace detail

/// Inverse of emit(program) plus format_witness_store. Throws on malformed
/// input (std::invalid_argument, or the frontend's diagnostics).
inline Witness parse_witness(std::string_view mc_text, std::string_view store_text) {
    Witness w;
    w.program = elaborate(parse(mc_text));
    const TypedProgram& p = w.program;
    std::vector<BlockVal> m1(p.vars.size());
    std::vector<BlockVal> m2(p.vars.size());
    std::vector<Label> g1(p.vars.size());
    std::vector<Label> g2(p.vars.size());
    bool has_m2 = false;
    std::istringstream in{std::string(store_text)};
    std::string line;
    while (std::getline(in, line)) {
        const auto sp = line.find(' ');
        const std::string key = line.substr(0, sp);
        const std::string rest = sp == std::string::npos ? "" : line.substr(sp + 1);
        if (key == "check") {
            if (rest == "soundness") {
                w.check = CheckKind::soundness;
            } else if (rest == "agreement") {
                w.check = CheckKind::agreement;
            } else if (rest == "lemma") {
                w.check = CheckKind::lemma;
            } else {
                throw std::invalid_argument("unknown check '" + rest + "' in witness store");
            }
        } else if (key == "seed") {
            w.seed = std::stoull(rest);
        } else if (key == "index") {
            w.index = std::stoull(rest);
        } else if (key == "s") {
            w.s = Label{std::stoull(rest)};
        } else if (key == "expr") {
            w.expr = parse_expression(rest);
        } else if (key == "block") {
            const auto it = p.env.find(rest);
            if (it != p.env.end()) {
                w.block = it->second;
            }
        } else if (key == "detail") {
            w.detail = rest;
        } else if (key == "m1" || key == "m2") {
            // <name> = <value> label <n>
            const auto eq = rest.find(" = ");
            const auto lab = rest.rfind(" label ");
            if (eq == std::string::npos || lab == std::string::npos || lab < eq) {
                throw std::invalid_argument("malformed store line '" + line + "'");
            }
            const auto it = p.env.find(rest.substr(0, eq));
            if (it == p.env.end()) {
                throw std::invalid_argument("unknown variable in store line '" + line + "'");
            }
            const BlockVal bv = detail::parse_store_block(p, rest.substr(eq + 3, lab - eq - 3));
            const Label l{std::stoull(rest.substr(lab + 7))};
            auto& mem = key == "m1" ? m1 : m2;
            auto& lab_mem = key == "m1" ? g1 : g2;
            mem[it->second.index] = bv;
            lab_mem[it->second.index] = l;
            has_m2 = has_m2 || key == "m2";
        }
    }
    w.m1 = Memory(m1);
    w.g1 = LabelMemory(g1);
    w.m2 = Memory(has_m2 ? m2 : m1);
    w.g2 = LabelMemory(has_m2 ? g2 : g1);
    if (w.check == CheckKind::lemma && !w.expr) {
        throw std::invalid_argument("lemma witness without an expression");
    }
    return w;
}

/// Reruns a witness and returns the same verdict if the failure is genuine.
inline Verdict replay(const Witness& w, const CheckOptions& opts = {}) {
    switch (w.check) {
    case CheckKind::soundness: return replay_soundness(w, opts);
    case CheckKind::agreement: return replay_agreement(w, opts);
    case CheckKind::lemma: return replay_lemma(w).verdict;
    }
    return {};
}

} // namespace flowmon
