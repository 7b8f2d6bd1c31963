#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dedc/cli.hpp"
#include "host_build.hpp"

using namespace dedc;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string corpus(const std::string& rel) { return std::string(DEDC_CORPUS_DIR) + "/" + rel; }

std::string write_temp(const std::string& name, const std::string& text) {
    auto path = host::scratch_dir() / name;
    std::ofstream(path) << text;
    return path.string();
}

}  // namespace

TEST(Cli, CheckAcceptsCorpus) {
    for (const char* p : {"touchblink", "blink", "blink_macros"}) {
        auto r = cli({"check", corpus(std::string("programs/") + p + ".dl")});
        EXPECT_EQ(r.code, 0) << r.err;
        EXPECT_EQ(r.err, "");
    }
}

TEST(Cli, CheckReportsDiagnosticsWithPositions) {
    auto file = write_temp("bad.dl", ".decl p\n.decl q\np :- !q.\nq :- p.\n");
    auto r = cli({"check", file});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find(file + ":3:1: error: negation cycle"), std::string::npos) << r.err;
}

TEST(Cli, ExpandPrintsCanonicalProgram) {
    auto r = cli({"expand", corpus("programs/blink_macros.dl")});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("now(T)@next :- #millis(T)."), std::string::npos);
    EXPECT_NE(r.out.find("turn_off :- setup."), std::string::npos);
    EXPECT_EQ(r.out.find("["), std::string::npos);
}

TEST(Cli, CompileWritesFile) {
    auto out = (host::scratch_dir() / "blink.c").string();
    auto r = cli({"compile", corpus("programs/blink.dl"), "-o", out, "--buffer-size", "128", "--no-arduino-header"});
    EXPECT_EQ(r.code, 0) << r.err;
    std::ifstream in(out);
    std::stringstream text;
    text << in.rdbuf();
    EXPECT_NE(text.str().find("#define DED_BUFFER_SIZE 128"), std::string::npos);
    EXPECT_NE(text.str().find("#include <arduino_shim.h>"), std::string::npos);
}

TEST(Cli, RunPrintsEventLog) {
    auto r = cli({"run", corpus("programs/blink.dl"), "--trace", corpus("traces/idle.trace")});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out.substr(0, 33), "[t=10] pinMode(13, OUTPUT)\n[t=102");
    EXPECT_NE(r.out.find("[t=1020] digitalWrite(13, HIGH)\n[t=2030] digitalWrite(13, LOW)\n"), std::string::npos);
}

TEST(Cli, RunDumpsFactsToStandardError) {
    auto r = cli({"run", corpus("programs/blink.dl"), "--trace", corpus("traces/idle.trace"), "--dump-facts",
                  "--max-steps", "2"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.err, "step 0: setup, now(0), off_since(0)\nstep 1: now(10), off_since(0)\n");
}

TEST(Cli, RunFaultExitsWithOne) {
    auto prog = write_temp("cap.dl", ".decl p(int)\np(1)@0.\np(2)@0.");
    auto trace = write_temp("short.trace", "end 10\n");
    auto r = cli({"run", prog, "--trace", trace, "--buffer-size", "5"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("FAULT buffer overflow inserting p"), std::string::npos);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(cli({}).code, 2);
    EXPECT_EQ(cli({"frobnicate"}).code, 2);
    EXPECT_EQ(cli({"run", corpus("programs/blink.dl")}).code, 2);
    EXPECT_EQ(cli({"check", "/nonexistent/file.dl"}).code, 2);
    EXPECT_EQ(cli({"compile", corpus("programs/blink.dl"), "--buffer-size", "zero"}).code, 2);
    EXPECT_EQ(cli({"--help"}).code, 0);
}
