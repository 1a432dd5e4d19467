#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using Catch::Matchers::ContainsSubstring;

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int code = -1;
    std::string out;  // stdout and stderr interleaved
};

RunResult run_cli(const std::string& args) {
    std::string cmd = std::string(GCONJ_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    std::size_t n = 0;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    int status = pclose(pipe);
    if (WIFEXITED(status)) r.code = WEXITSTATUS(status);
    return r;
}

std::string fixture(const char* name) {
    return (fs::path(GCONJ_FIXTURE_DIR) / name).string();
}

fs::path fresh_dir(const char* name) {
    fs::path dir = fs::temp_directory_path() / "gconj-cli-tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// true when the report contains the exact line "key = value"
bool has_line(const std::string& out, const std::string& key,
              const std::string& value) {
    std::string needle = key + " = " + value + "\n";
    return out.find(needle) != std::string::npos;
}

// drops lines that embed output paths so reports from different --out
// directories can be compared verbatim
std::string strip_path_lines(const std::string& out) {
    std::istringstream in(out);
    std::string line, kept;
    while (std::getline(in, line)) {
        if (line.find("_csv = ") == std::string::npos) kept += line + "\n";
    }
    return kept;
}

}  // namespace

TEST_CASE("check-coupling reports the axioms of a multiplier coupling", "[cli]") {
    RunResult r = run_cli("check-coupling " + fixture("qp.spec"));
    INFO(r.out);
    CHECK(r.code == 0);
    CHECK(has_line(r.out, "command", "check-coupling"));
    CHECK(has_line(r.out, "kind", "lagrangian"));
    CHECK(has_line(r.out, "rows", "301"));
    CHECK(has_line(r.out, "cols", "201"));
    CHECK(has_line(r.out, "d1_inf", "0"));
    CHECK(has_line(r.out, "d1_arg_x", "(1)"));
    CHECK(has_line(r.out, "d1_arg_y", "(0)"));
    CHECK(has_line(r.out, "d1_pass", "true"));
    CHECK(has_line(r.out, "has_zero", "true"));
    CHECK(has_line(r.out, "d2_pass", "true"));
    CHECK(has_line(r.out, "zero_slices", "true"));
    CHECK(has_line(r.out, "verdict", "PASS"));
}

TEST_CASE("check-coupling flags a strictly positive infimum", "[cli]") {
    RunResult strict = run_cli("check-coupling " + fixture("expgap.spec"));
    INFO(strict.out);
    CHECK(strict.code == 1);
    CHECK(has_line(strict.out, "d1_pass", "false"));
    CHECK(has_line(strict.out, "has_zero", "false"));
    CHECK(has_line(strict.out, "verdict", "FAIL"));

    // exp(-5) is below a loosened tolerance, so the verdict flips
    RunResult loose = run_cli("check-coupling " + fixture("expgap.spec") +
                              " --tol 0.01");
    INFO(loose.out);
    CHECK(loose.code == 0);
    CHECK(has_line(loose.out, "d1_pass", "true"));
    CHECK(has_line(loose.out, "has_zero", "false"));
    CHECK(has_line(loose.out, "verdict", "PASS"));
}

TEST_CASE("conjugate writes transform tables", "[cli]") {
    fs::path dir = fresh_dir("conjugate");
    RunResult r = run_cli("conjugate " + fixture("qp.spec") + " --out " +
                          dir.string());
    INFO(r.out);
    CHECK(r.code == 0);
    CHECK(has_line(r.out, "points_primal", "301"));
    CHECK(has_line(r.out, "points_dual", "201"));
    CHECK(has_line(r.out, "inf_f", "1"));
    CHECK(has_line(r.out, "inf_f_g", "-1"));
    CHECK(has_line(r.out, "inf_f_gg", "1"));
    CHECK(has_line(r.out, "young_violation", "0"));
    CHECK(has_line(r.out, "biconjugate_excess", "0"));
    CHECK(has_line(r.out, "verdict", "PASS"));

    std::string conj = slurp(dir / "conjugate.csv");
    CHECK_THAT(conj, ContainsSubstring("y_1,f_g\n0,-1\n"));

    std::string biconj = slurp(dir / "biconjugate.csv");
    CHECK_THAT(biconj, ContainsSubstring("x_1,f,f_gg\n1,1,1\n"));
}

TEST_CASE("duality solves both problems of the quadratic program", "[cli]") {
    RunResult r = run_cli("duality " + fixture("qp.spec"));
    INFO(r.out);
    CHECK(r.code == 0);
    CHECK(has_line(r.out, "f_g_proper", "true"));
    CHECK(has_line(r.out, "inf_gamma", "0"));
    CHECK(has_line(r.out, "member", "true"));
    CHECK(has_line(r.out, "primal_value", "1"));
    CHECK(has_line(r.out, "primal_arg", "(1)"));
    CHECK(has_line(r.out, "dual_value", "-1"));
    CHECK(has_line(r.out, "dual_arg", "(0)"));
    CHECK(has_line(r.out, "gap", "0"));
    CHECK(has_line(r.out, "biconj_inf_match", "true"));
    CHECK(has_line(r.out, "biconj_argmin_transfer", "true"));
    CHECK(has_line(r.out, "verdict", "PASS"));
}

TEST_CASE("saddle reports the minimax analysis", "[cli]") {
    RunResult r = run_cli("saddle " + fixture("qp.spec"));
    INFO(r.out);
    CHECK(r.code == 0);
    CHECK(has_line(r.out, "supinf", "1"));
    CHECK(has_line(r.out, "infsup", "1"));
    CHECK(has_line(r.out, "minimax_gap", "0"));
    CHECK(has_line(r.out, "member", "true"));
    CHECK(has_line(r.out, "zero_slices", "true"));
    CHECK(has_line(r.out, "primal_solutions", "1"));
    CHECK(has_line(r.out, "dual_solutions", "201"));
    CHECK(has_line(r.out, "saddle_count", "201"));
    CHECK(has_line(r.out, "saddle_0",
                   "(1) x (0) dom_f=true dual_opt=true biconj_touch=true "
                   "primal_dual=true"));
    CHECK(has_line(r.out, "converse_holds", "true"));
    CHECK(has_line(r.out, "equivalence_holds", "true"));
    CHECK(has_line(r.out, "verdict", "PASS"));
}

TEST_CASE("perturb ties the value function to its conjugate", "[cli]") {
    fs::path dir = fresh_dir("perturb");
    RunResult r = run_cli("perturb " + fixture("perturb.spec") + " --out " +
                          dir.string());
    INFO(r.out);
    CHECK(r.code == 0);
    CHECK(has_line(r.out, "alpha", "0"));
    CHECK(has_line(r.out, "beta", "0"));
    CHECK(has_line(r.out, "gap", "0"));
    CHECK(has_line(r.out, "identity_violation", "0"));
    CHECK(has_line(r.out, "verdict", "PASS"));

    std::string csv = slurp(dir / "perturb_gap.csv");
    CHECK_THAT(csv, ContainsSubstring("x_1,x_2,gap\n-1,-1,1\n"));
}

TEST_CASE("gap solves a variational inequality from an operator graph", "[cli]") {
    fs::path dir = fresh_dir("gap-vip");
    RunResult r = run_cli("gap " + fixture("gap_vip.spec") + " --out " +
                          dir.string());
    INFO(r.out);
    CHECK(r.code == 0);
    CHECK(has_line(r.out, "kind", "vip"));
    CHECK(has_line(r.out, "graph_pairs", "41"));
    CHECK(has_line(r.out, "monotone_violation", "0"));
    CHECK(has_line(r.out, "base_points_nonnegative", "true"));
    // the sampled gap is flat to one grid step around the solution
    CHECK(has_line(r.out, "solutions", "3"));
    CHECK(has_line(r.out, "solution_0", "(-0.05)"));
    CHECK(has_line(r.out, "solution_1", "(0)"));
    CHECK(has_line(r.out, "solution_2", "(0.05)"));
    CHECK(has_line(r.out, "verdict", "PASS"));

    std::string csv = slurp(dir / "gap.csv");
    CHECK_THAT(csv, ContainsSubstring("x_1,gap\n"));
}

TEST_CASE("gap analyses an equilibrium bifunction", "[cli]") {
    fs::path dir = fresh_dir("gap-ep");
    RunResult r = run_cli("gap " + fixture("gap_ep.spec") + " --out " +
                          dir.string());
    INFO(r.out);
    CHECK(r.code == 0);
    CHECK(has_line(r.out, "kind", "ep"));
    CHECK(has_line(r.out, "k_points", "21"));
    CHECK(has_line(r.out, "diag_zero", "true"));
    CHECK(has_line(r.out, "diag_max_abs", "0"));
    CHECK(has_line(r.out, "convex_in_y", "true"));
    CHECK(has_line(r.out, "solutions", "1"));
    CHECK(has_line(r.out, "solution_0", "(0)"));
    CHECK(has_line(r.out, "verdict", "PASS"));
    CHECK_THAT(r.out, ContainsSubstring("was not checked"));
}

TEST_CASE("stability reports exact decay of the shifted family", "[cli]") {
    fs::path dir = fresh_dir("stability");
    RunResult r = run_cli("stability " + fixture("stability_shift.spec") +
                          " --out " + dir.string());
    INFO(r.out);
    CHECK(r.code == 0);
    CHECK(has_line(r.out, "family", "shift"));
    CHECK(has_line(r.out, "k_1", "df=1 dg=0 dconj=1"));
    CHECK(has_line(r.out, "k_8", "df=0.125 dg=0 dconj=0.125"));
    CHECK(has_line(r.out, "hypotheses_ok", "true"));
    CHECK(has_line(r.out, "limit_member", "true"));
    CHECK(has_line(r.out, "limit_d2_checked", "true"));
    CHECK(has_line(r.out, "limit_d2_pass", "true"));
    CHECK(has_line(r.out, "verdict", "PASS"));

    CHECK(slurp(dir / "stability.csv") ==
          "k,df,dg,dconj\n"
          "1,1,0,1\n"
          "2,0.5,0,0.5\n"
          "4,0.25,0,0.25\n"
          "8,0.125,0,0.125\n"
          "verdict,pass,hypotheses and limit membership hold\n");
}

TEST_CASE("stability surfaces a broken hypothesis and fails", "[cli]") {
    fs::path dir = fresh_dir("stability-fail");
    RunResult r = run_cli("stability " + fixture("stability_scale.spec") +
                          " --out " + dir.string());
    INFO(r.out);
    CHECK(r.code == 1);
    CHECK(has_line(r.out, "hypotheses_ok", "false"));
    CHECK(has_line(r.out, "hypothesis_failure", "k=1: membership failed for f_k"));
    CHECK(has_line(r.out, "verdict", "FAIL"));

    CHECK_THAT(slurp(dir / "stability.csv"),
               ContainsSubstring("verdict,fail,k=1: membership failed for f_k"));
}

TEST_CASE("usage and input problems exit with code 2", "[cli]") {
    SECTION("no subcommand") {
        CHECK(run_cli("").code == 2);
    }
    SECTION("unknown subcommand") {
        CHECK(run_cli("frobnicate x.spec").code == 2);
    }
    SECTION("missing file") {
        RunResult r = run_cli("duality /nonexistent/nope.spec");
        CHECK(r.code == 2);
        CHECK_THAT(r.out, ContainsSubstring("cannot open"));
    }
    SECTION("malformed problem file names the line") {
        RunResult r = run_cli("duality " + fixture("badkey.spec"));
        CHECK(r.code == 2);
        CHECK_THAT(r.out, ContainsSubstring("line 4"));
        CHECK_THAT(r.out, ContainsSubstring("wibble"));
    }
    SECTION("command needs a section the file lacks") {
        RunResult r = run_cli("perturb " + fixture("minimal.spec"));
        CHECK(r.code == 2);
        CHECK_THAT(r.out, ContainsSubstring("[perturbation]"));
    }
    SECTION("rejected tolerance override") {
        CHECK(run_cli("duality " + fixture("qp.spec") + " --tol -1").code == 2);
    }
    SECTION("help succeeds") {
        RunResult r = run_cli("--help");
        CHECK(r.code == 0);
        CHECK_THAT(r.out, ContainsSubstring("check-coupling"));
    }
}

TEST_CASE("reports and artifacts are identical across thread counts", "[cli]") {
    fs::path d1 = fresh_dir("threads-1");
    fs::path d8 = fresh_dir("threads-8");

    for (const char* sub : {"conjugate", "duality", "saddle"}) {
        RunResult a = run_cli(std::string(sub) + " " + fixture("qp.spec") +
                              " --out " + d1.string() + " --threads 1");
        RunResult b = run_cli(std::string(sub) + " " + fixture("qp.spec") +
                              " --out " + d8.string() + " --threads 8");
        INFO(sub);
        CHECK(a.code == b.code);
        CHECK(strip_path_lines(a.out) == strip_path_lines(b.out));
    }
    CHECK(slurp(d1 / "conjugate.csv") == slurp(d8 / "conjugate.csv"));
    CHECK(slurp(d1 / "biconjugate.csv") == slurp(d8 / "biconjugate.csv"));

    // --seed is accepted and has no effect on deterministic commands
    RunResult s0 = run_cli("duality " + fixture("qp.spec"));
    RunResult s7 = run_cli("duality " + fixture("qp.spec") + " --seed 7");
    CHECK(s0.out == s7.out);
}
