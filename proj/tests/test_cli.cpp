#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "flowmon/cli.hpp"
#include "support.hpp"

using namespace flowmon;
using flowmon::test::slurp;
using flowmon::test::slurp_abs;
using flowmon::test::source_path;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "flowmon");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string corpus_file(const std::string& name) { return source_path("corpus/" + name + ".mc"); }

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("flowmon-test-" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string write(const std::filesystem::path& dir, const std::string& name, const std::string& text) {
    const auto path = (dir / name).string();
    std::ofstream(path) << text;
    return path;
}

} // namespace

TEST(Cli, RunPrintsAValueAndLabelTable) {
    const auto r = run({"run", corpus_file("explicit_flow")});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "var     value  label\n"
                     "x       42     private\n"
                     "y       0      public\n"
                     "z       42     private\n"
                     "secret  42     private\n");
}

TEST(Cli, RunReportsAssertionViolationsWithExitOne) {
    const auto r = run({"run", corpus_file("policy")});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("assert 9:1 y public <= public: ok"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("assert 10:1 z private <= public: VIOLATION"), std::string::npos) << r.out;
}

TEST(Cli, RunOnEmptyBodyShowsInitialLabels) {
    const auto dir = scratch("empty");
    const auto r = run({"run", write(dir, "e.mc", "int a = 1; /*@ private */ int b;")});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("a    1      private"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("b    0      public"), std::string::npos) << r.out;
}

TEST(Cli, ExitCodes) {
    const auto dir = scratch("codes");
    EXPECT_EQ(run({"run", write(dir, "syntax.mc", "int x; x = ;")}).code, 2);
    EXPECT_EQ(run({"run", write(dir, "type.mc", "int x; y = 1;")}).code, 2);
    EXPECT_EQ(run({"run", (dir / "missing.mc").string()}).code, 2);
    EXPECT_EQ(run({"run", write(dir, "fault.mc", "int a[2]; a[5] = 1;")}).code, 3);
    EXPECT_EQ(run({"run", "--fuel", "20", write(dir, "loop.mc", "int x = 1; while (x) x = 1;")}).code, 3);
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({"fuzz", "--check", "everything"}).code, 2);
    EXPECT_EQ(run({"fuzz", "--mutate", "nope"}).code, 2);
    const auto r = run({"run", write(dir, "pos.mc", "int x;\nx = ;")});
    EXPECT_NE(r.err.find("pos.mc:2:5"), std::string::npos) << r.err;
}

TEST(Cli, TransformMatchesTheGolden) {
    const auto r = run({"transform", corpus_file("array_pointer")});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, slurp("tests/golden/array_pointer.expected.mc"));
}

TEST(Cli, TransformWritesToAFileAndEmitsC) {
    const auto dir = scratch("transform");
    const auto out = (dir / "o.mc").string();
    EXPECT_EQ(run({"transform", corpus_file("array_flow"), "-o", out}).code, 0);
    EXPECT_EQ(slurp_abs(out), slurp("tests/golden/array_flow.expected.mc"));
    const auto pre = write(dir, "pre.h", "/* runtime */\n");
    const auto c = run({"transform", corpus_file("policy"), "--emit-c", "--c-preamble", pre});
    EXPECT_EQ(c.code, 0);
    EXPECT_EQ(c.out.rfind("/* runtime */\n", 0), 0u);
    EXPECT_NE(c.out.find("report_violation(10)"), std::string::npos) << c.out;
}

TEST(Cli, TransformDumpsTheLayoutOfAnArrayOfPointers) {
    const auto dir = scratch("layout");
    const auto r = run({"transform", "--dump-layout", write(dir, "b.mc", "int *b[10];")});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "b_status : int (kind=summary, depth=0)\n"
                     "b_status_d0 : int [10] (kind=exact, depth=0)\n"
                     "b_status_d1_summary : int *[10] (kind=summary, depth=1)\n"
                     "b_status_d1 : int *[10] (kind=exact, depth=1)\n");
}

TEST(Cli, RetransformingIsANameCollision) {
    const auto dir = scratch("again");
    const auto once = run({"transform", corpus_file("explicit_flow")});
    const auto r = run({"transform", write(dir, "i.mc", once.out)});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("_status"), std::string::npos) << r.err;
}

TEST(Cli, CheckPrintsAliasSetsAndVerdict) {
    const auto r = run({"check", corpus_file("pointer_flow")});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("pointer_flow.mc:12:1 -> {x, y}\n"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("admissible\n"), std::string::npos);
    const auto quiet = run({"check", "--no-alias", corpus_file("explicit_flow")});
    EXPECT_EQ(quiet.out, "admissible\n");
}

TEST(Cli, FuzzPrintsTheSummaryLine) {
    EXPECT_EQ(run({"fuzz", "--count", "0"}).out, "PASS=0 TIMEOUT=0 FAULT=0 VIOLATION=0\n");
    const auto r = run({"fuzz", "--seed", "9", "--count", "40", "--check", "all"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("lemma: PASS="), std::string::npos) << r.out;
}

TEST(Cli, FuzzViolationsExitFourAndReplay) {
    const auto dir = scratch("witness");
    const auto r = run({"fuzz", "--seed", "1", "--count", "2000", "--mutate", "strong-array", "--witness-dir",
                        dir.string()});
    EXPECT_EQ(r.code, 4);
    std::string stem;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.path().extension() == ".store") {
            stem = (e.path().parent_path() / e.path().stem()).string();
            break;
        }
    }
    ASSERT_FALSE(stem.empty());
    EXPECT_EQ(run({"replay", stem, "--mutate", "strong-array"}).code, 1);
    EXPECT_EQ(run({"replay", stem}).code, 0);
}
