#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "flowmon/alias.hpp"
#include "flowmon/emit.hpp"
#include "flowmon/harness.hpp"
#include "flowmon/instrument.hpp"
#include "flowmon/interpreter.hpp"
#include "flowmon/parser.hpp"

namespace flowmon::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_violation = 1,
    exit_usage = 2,
    exit_fault = 3,
    exit_fuzz_violation = 4,
};

struct RunReport {
    struct Row {
        std::string var;
        std::string value;
        Label label;
    };
    std::vector<Row> rows;
    std::vector<AssertionResult> assertions;
    std::optional<std::string> error;
    int exit_status = exit_ok;
};

namespace detail {

struct InputError {
    std::string message;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError{"cannot read '" + path + "'"};
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError{"cannot write '" + path + "'"};
    }
    out << text;
}

inline TypedProgram load(const std::string& path) { return elaborate(parse(read_file(path))); }

inline std::string show_block(const TypedProgram& p, const BlockVal& bv) { return flowmon::detail::show_block(p, bv); }

/// Runs `body` and maps frontend and instrumenter diagnostics onto exit codes.
template <class F> int guarded(const std::string& file, std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const InputError& e) {
        err << "error: " << e.message << "\n";
    } catch (const SyntaxError& e) {
        err << file << ":" << e.describe() << ": syntax error\n";
    } catch (const TypeError& e) {
        err << file << ":" << e.describe() << ": type error\n";
    } catch (const InstrumentError& e) {
        err << file << ":" << e.describe() << ": cannot instrument\n";
    } catch (const Fault& e) {
        err << file << ":" << e.describe() << ": runtime fault\n";
        return exit_fault;
    }
    return exit_usage;
}

} // namespace detail

/// Runs the monitor on a program from its declared initial store.
inline RunReport cmd_run(const TypedProgram& p, std::uint64_t fuel) {
    RunReport rep;
    const AliasFunction alias = compute_alias(p);
    ExecOptions opts;
    opts.fuel = fuel;
    const auto r = run_program(p.env, &alias, *p.body, p.initial_memory, p.initial_labels, opts);
    rep.assertions = r.assertions;
    if (r.status == ExecStatus::fault) {
        rep.error = r.fault->describe() + ": runtime fault";
        rep.exit_status = exit_fault;
        return rep;
    }
    if (r.status == ExecStatus::timeout) {
        rep.error = "fuel exhausted after " + std::to_string(fuel) + " steps";
        rep.exit_status = exit_fault;
        return rep;
    }
    for (const auto& v : p.vars) {
        rep.rows.push_back({v.name, detail::show_block(p, r.outcome.memory.at(v.block)), r.outcome.labels.at(v.block)});
    }
    for (const auto& a : rep.assertions) {
        if (!a.passed) {
            rep.exit_status = exit_violation;
        }
    }
    return rep;
}

inline void print_report(const RunReport& rep, std::ostream& out) {
    std::size_t wn = 3;
    std::size_t wv = 5;
    for (const auto& r : rep.rows) {
        wn = std::max(wn, r.var.size());
        wv = std::max(wv, r.value.size());
    }
    if (!rep.rows.empty()) {
        out << std::left << std::setw(static_cast<int>(wn)) << "var" << "  " << std::setw(static_cast<int>(wv))
            << "value" << "  label\n";
        for (const auto& r : rep.rows) {
            out << std::setw(static_cast<int>(wn)) << r.var << "  " << std::setw(static_cast<int>(wv)) << r.value
                << "  " << to_string(r.label) << "\n";
        }
    }
    for (const auto& a : rep.assertions) {
        out << "assert " << to_string(a.pos) << " " << (a.var.empty() ? "label" : a.var) << " "
            << to_string(a.actual) << " <= " << to_string(a.bound) << ": " << (a.passed ? "ok" : "VIOLATION")
            << "\n";
    }
}

struct TransformFlags {
    std::string output;
    bool emit_c = false;
    std::string c_preamble;
    bool dump_layout = false;
};

inline std::string dump_layout(const Instrumented& ins) {
    std::string out;
    for (const auto& v : ins.plan.vars) {
        for (const auto& d : v.decls) {
            out += layout_line(d) + "\n";
        }
    }
    return out;
}

inline std::optional<Mutation> parse_mutation(const std::string& s) {
    if (s == "none") {
        return Mutation::none;
    }
    if (s == "drop-pc") {
        return Mutation::drop_pc_in_scalar_assign;
    }
    if (s == "strong-array") {
        return Mutation::strong_array_update;
    }
    return std::nullopt;
}

struct FuzzFlags {
    std::uint64_t seed = 0;
    std::uint64_t count = 100;
    std::uint64_t start = 0;
    std::string check = "soundness";
    std::string mutate = "none";
    std::string witness_dir = "fuzz-witnesses";
    std::uint64_t fuel = 2000;
};

/// Writes `<dir>/<check>-<index>.mc` and `.store` for each witness.
inline void dump_witnesses(const FuzzReport& rep, const std::string& dir, std::ostream& err) {
    bool any = false;
    for (const auto& c : rep.checks) {
        any = any || !c.witnesses.empty();
    }
    if (!any) {
        return;
    }
    std::filesystem::create_directories(dir);
    for (const auto& c : rep.checks) {
        for (const auto& w : c.witnesses) {
            const std::string stem = dir + "/" + to_string(w.check) + "-" + std::to_string(w.index);
            detail::write_file(stem + ".mc", emit(w.program));
            detail::write_file(stem + ".store", format_witness_store(w));
            err << "witness: " << stem << ".mc " << stem << ".store (" << w.detail << ")\n";
        }
    }
}

inline int run_fuzz(const FuzzFlags& f, std::ostream& out, std::ostream& err) {
    FuzzOptions o;
    o.seed = f.seed;
    o.count = f.count;
    o.start = f.start;
    o.gen.fuel = f.fuel;
    if (f.check == "all") {
        o.checks = {CheckKind::soundness, CheckKind::agreement, CheckKind::lemma};
    } else if (f.check == "soundness") {
        o.checks = {CheckKind::soundness};
    } else if (f.check == "agreement") {
        o.checks = {CheckKind::agreement};
    } else if (f.check == "lemma") {
        o.checks = {CheckKind::lemma};
    } else {
        err << "error: unknown check '" << f.check << "'\n";
        return exit_usage;
    }
    const auto m = parse_mutation(f.mutate);
    if (!m) {
        err << "error: unknown mutation '" << f.mutate << "'\n";
        return exit_usage;
    }
    o.mutation = *m;
    const FuzzReport rep = fuzz(o);
    if (rep.checks.size() > 1) {
        for (const auto& c : rep.checks) {
            out << to_string(c.check) << ": " << summary_line(c.counts) << "\n";
        }
    }
    const FuzzCounts total = rep.total();
    out << summary_line(total) << "\n";
    try {
        dump_witnesses(rep, f.witness_dir, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
    }
    return total.violation > 0 ? exit_fuzz_violation : exit_ok;
}

} // namespace flowmon::cli

namespace flowmon {

/// Entry point of the `flowmon` tool. Reports go to `out`, diagnostics to `err`.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    using namespace cli;
    CLI::App app{"Hybrid information-flow monitor and instrumenter for mini-C"};
    app.require_subcommand(1);

    std::string file;
    std::uint64_t fuel = 100000;

    auto* run = app.add_subcommand("run", "Execute under the monitor and print final values and labels");
    run->add_option("file", file, "mini-C source")->required();
    run->add_option("--fuel", fuel, "Step budget");

    TransformFlags tf;
    auto* transform = app.add_subcommand("transform", "Emit the instrumented program");
    transform->add_option("file", file, "mini-C source")->required();
    transform->add_option("-o,--output", tf.output, "Write the program here instead of standard output");
    transform->add_flag("--emit-c", tf.emit_c, "Emit C99 instead of mini-C");
    transform->add_option("--c-preamble", tf.c_preamble, "File prepended to --emit-c output");
    transform->add_flag("--dump-layout", tf.dump_layout, "Print the label declarations of every variable");

    bool show_alias = true;
    auto* check = app.add_subcommand("check", "Print the alias function and its admissibility verdict");
    check->add_option("file", file, "mini-C source")->required();
    check->add_flag("--alias,!--no-alias", show_alias, "Print the alias sets (default on)");
    check->add_option("--fuel", fuel, "Step budget for the admissibility run");

    FuzzFlags ff;
    auto* fz = app.add_subcommand("fuzz", "Randomized checks of the monitor and the instrumenter");
    fz->add_option("--seed", ff.seed, "Base seed");
    fz->add_option("--count", ff.count, "Instances per check");
    fz->add_option("--start", ff.start, "First instance index");
    fz->add_option("--check", ff.check, "soundness|agreement|lemma|all");
    fz->add_option("--mutate", ff.mutate, "none|drop-pc|strong-array");
    fz->add_option("--witness-dir", ff.witness_dir, "Where violation witnesses are written");
    fz->add_option("--fuel", ff.fuel, "Step budget per run");

    std::string replay_stem;
    auto* rp = app.add_subcommand("replay", "Rerun a witness written by fuzz");
    rp->add_option("stem", replay_stem, "Witness path without the .mc/.store extension")->required();
    rp->add_option("--mutate", ff.mutate, "none|drop-pc|strong-array");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    if (*run) {
        return cli::detail::guarded(file, err, [&] {
            const auto rep = cmd_run(cli::detail::load(file), fuel);
            print_report(rep, out);
            if (rep.error) {
                err << file << ":" << *rep.error << "\n";
            }
            return rep.exit_status;
        });
    }
    if (*transform) {
        return cli::detail::guarded(file, err, [&] {
            const Instrumented ins = instrument(cli::detail::load(file));
            if (tf.dump_layout) {
                out << dump_layout(ins);
            }
            std::string text;
            if (tf.emit_c) {
                text = emit_c(ins.program, tf.c_preamble.empty() ? "" : cli::detail::read_file(tf.c_preamble));
            } else {
                text = emit(ins.program);
            }
            if (!tf.output.empty()) {
                cli::detail::write_file(tf.output, text);
            } else if (!tf.dump_layout) {
                out << text;
            }
            return int{exit_ok};
        });
    }
    if (*check) {
        return cli::detail::guarded(file, err, [&] {
            const TypedProgram p = cli::detail::load(file);
            const AliasFunction f = compute_alias(p);
            if (show_alias) {
                out << format_alias(f, p, file);
            }
            const auto v = check_admissible(f, p, fuel);
            switch (v.kind) {
            case AdmissibilityVerdict::Kind::pass: out << "admissible\n"; return int{exit_ok};
            case AdmissibilityVerdict::Kind::timeout:
                out << "admissible up to fuel exhaustion\n";
                return int{exit_ok};
            case AdmissibilityVerdict::Kind::counterexample:
                out << "NOT admissible: " << file << ":" << to_string(v.pos) << " writes "
                    << p.var_info(v.block).name << "\n";
                return int{exit_violation};
            }
            return int{exit_ok};
        });
    }
    if (*fz) {
        return run_fuzz(ff, out, err);
    }
    if (*rp) {
        return cli::detail::guarded(replay_stem, err, [&] {
            const auto m = parse_mutation(ff.mutate);
            if (!m) {
                err << "error: unknown mutation '" << ff.mutate << "'\n";
                return int{exit_usage};
            }
            const Witness w = parse_witness(cli::detail::read_file(replay_stem + ".mc"),
                                            cli::detail::read_file(replay_stem + ".store"));
            CheckOptions co;
            co.mutation = *m;
            const Verdict v = replay(w, co);
            out << to_string(v.kind) << (v.detail.empty() ? "" : ": " + v.detail) << "\n";
            return v.kind == VerdictKind::Violation ? int{exit_violation} : int{exit_ok};
        });
    }
    return exit_usage;
}

} // namespace flowmon
