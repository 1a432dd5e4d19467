#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <string>

#include <gconj/gconj.hpp>

using namespace gconj;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::MessageMatches;

namespace {

namespace fs = std::filesystem;

fs::path fixture(const char* name) { return fs::path(GCONJ_FIXTURE_DIR) / name; }

// Writes problem text to a fresh file under the system temp directory so each
// test sees exactly the lines it wrote (line numbers in errors stay honest).
fs::path temp_spec(const std::string& text) {
    static int counter = 0;
    fs::path dir = fs::temp_directory_path() / "gconj-spec-tests";
    fs::create_directories(dir);
    fs::path p = dir / ("case_" + std::to_string(counter++) + ".spec");
    std::ofstream out(p);
    out << text;
    if (!out) throw std::runtime_error("could not write " + p.string());
    return p;
}

}  // namespace

TEST_CASE("the quadratic-program problem file loads fully", "[spec]") {
    ProblemSpec spec = load_spec(fixture("qp.spec"));

    CHECK(spec.bounding_grid.size() == 501);
    CHECK(spec.bounding_grid.dimension() == 1);
    CHECK(spec.bounding_grid.is_cartesian());

    // x >= 1 cuts [-1, 4] down to 301 grid points starting exactly at 1.
    REQUIRE(spec.feasible_set.size() == 301);
    CHECK(spec.feasible_set.point(0)[0] == 1.0);
    CHECK(spec.feasible_set.point(300)[0] == 4.0);
    CHECK(spec.constraint_exprs.size() == 1);

    CHECK(spec.dual_grid.size() == 201);
    CHECK(spec.dual_grid.point(0)[0] == 0.0);
    CHECK(spec.dual_grid.point(200)[0] == 2.0);

    CHECK(spec.coupling.kind() == CouplingKind::lagrangian);
    CHECK(spec.tolerances.zero_tol == 1e-9);

    CHECK_FALSE(spec.perturbation.has_value());
    CHECK_FALSE(spec.gap.has_value());
    CHECK_FALSE(spec.stability.has_value());
    CHECK(spec.base_dir == fixture("qp.spec").parent_path());
}

TEST_CASE("omitted sections fall back to defaults", "[spec]") {
    ProblemSpec spec = load_spec(fixture("minimal.spec"));

    CHECK(spec.coupling.kind() == CouplingKind::zero);
    CHECK(spec.feasible_set == spec.bounding_grid);

    // no dual section: a single origin point of the primal dimension
    REQUIRE(spec.dual_grid.size() == 1);
    REQUIRE(spec.dual_grid.dimension() == 1);
    CHECK(spec.dual_grid.point(0)[0] == 0.0);

    ToleranceConfig defaults;
    CHECK(spec.tolerances.zero_tol == defaults.zero_tol);
    CHECK(spec.tolerances.feasibility_tol == defaults.feasibility_tol);
    CHECK(spec.tolerances.convexity_tol == defaults.convexity_tol);

    SampledFunction f = sample_expression(spec.objective, spec.bounding_grid);
    CHECK(f[0].value() == 1.0);  // abs(-1)
    CHECK(f[2].value() == 0.0);
}

TEST_CASE("gap blocks load their payloads", "[spec]") {
    SECTION("operator graphs are read relative to the problem file") {
        ProblemSpec spec = load_spec(fixture("gap_vip.spec"));
        REQUIRE(spec.gap.has_value());
        CHECK(spec.gap->kind == GapBlock::Kind::vip);
        REQUIRE(spec.gap->graph.has_value());
        CHECK(spec.gap->graph->size() == 41);
        CHECK(spec.gap->graph->dimension() == 1);
        CHECK(spec.gap->grid.size() == 41);
        CHECK(spec.gap->graph_path.filename() == "identity_graph.csv");
    }

    SECTION("bifunctions parse") {
        ProblemSpec spec = load_spec(fixture("gap_ep.spec"));
        REQUIRE(spec.gap.has_value());
        CHECK(spec.gap->kind == GapBlock::Kind::ep);
        REQUIRE(spec.gap->bifunction.has_value());
        CHECK(spec.gap->bifunction->to_string() == "y1^2 - x1^2");
        CHECK(spec.gap->grid.size() == 21);
    }
}

TEST_CASE("perturbation blocks load", "[spec]") {
    ProblemSpec spec = load_spec(fixture("perturb.spec"));
    REQUIRE(spec.perturbation.has_value());
    CHECK(spec.perturbation->u_dimension == 1);
    REQUIRE(spec.perturbation->u_axes.size() == 1);
    CHECK(spec.perturbation->u_axes[0].count == 5);
    CHECK(spec.perturbation->u_star_grid.size() == 5);
}

TEST_CASE("stability blocks load", "[spec]") {
    SECTION("shift family") {
        ProblemSpec spec = load_spec(fixture("stability_shift.spec"));
        REQUIRE(spec.stability.has_value());
        CHECK(spec.stability->family == SequenceFamily::shift);
        CHECK(spec.stability->a == 1.0);
        CHECK(spec.stability->k_values == std::vector<int>{1, 2, 4, 8});
    }
    SECTION("scale family with a custom coupling") {
        ProblemSpec spec = load_spec(fixture("stability_scale.spec"));
        REQUIRE(spec.stability.has_value());
        CHECK(spec.stability->family == SequenceFamily::scale);
        CHECK(spec.stability->b == 1.0);
        CHECK(spec.coupling.kind() == CouplingKind::custom);
    }
}

TEST_CASE("structural errors carry line numbers", "[spec]") {
    auto load = [](const std::string& text) { return load_spec(temp_spec(text)); };

    SECTION("unknown section") {
        CHECK_THROWS_MATCHES(load("[frobnicate]\n"), spec_error,
                             MessageMatches(ContainsSubstring("line 1") &&
                                            ContainsSubstring("unknown section")));
    }
    SECTION("unterminated section header") {
        CHECK_THROWS_MATCHES(load("[primal\n"), spec_error,
                             MessageMatches(ContainsSubstring("unterminated")));
    }
    SECTION("duplicate section") {
        try {
            load("[primal]\ngrid = 0:1:2\nf = \"x1\"\n[primal]\n");
            FAIL("expected spec_error");
        } catch (const spec_error& e) {
            CHECK(e.line() == 4);
            CHECK_THAT(e.what(), ContainsSubstring("duplicate section"));
        }
    }
    SECTION("key outside any section") {
        CHECK_THROWS_MATCHES(load("grid = 0:1:2\n"), spec_error,
                             MessageMatches(ContainsSubstring("line 1") &&
                                            ContainsSubstring("outside")));
    }
    SECTION("unknown key names itself and its section") {
        try {
            load_spec(fixture("badkey.spec"));
            FAIL("expected spec_error");
        } catch (const spec_error& e) {
            CHECK(e.line() == 4);
            CHECK_THAT(e.what(), ContainsSubstring("wibble"));
            CHECK_THAT(e.what(), ContainsSubstring("[primal]"));
        }
    }
    SECTION("duplicate key") {
        CHECK_THROWS_MATCHES(
            load("[primal]\ngrid = 0:1:2\ngrid = 0:1:2\nf = \"x1\"\n"), spec_error,
            MessageMatches(ContainsSubstring("line 3") &&
                           ContainsSubstring("duplicate key 'grid'")));
    }
    SECTION("missing '='") {
        CHECK_THROWS_MATCHES(load("[primal]\ngrid 0:1:2\n"), spec_error,
                             MessageMatches(ContainsSubstring("line 2") &&
                                            ContainsSubstring("'key = value'")));
    }
    SECTION("missing required section") {
        CHECK_THROWS_MATCHES(load("[dual]\ngrid = 0:1:2\n"), spec_error,
                             MessageMatches(ContainsSubstring("[primal]")));
    }
    SECTION("missing required key") {
        CHECK_THROWS_MATCHES(load("[primal]\ngrid = 0:1:2\n"), spec_error,
                             MessageMatches(ContainsSubstring("'f'")));
    }
    SECTION("comments do not shift line numbers") {
        CHECK_THROWS_MATCHES(
            load("# header\n[primal]\n# interior\ngrid = 0:1\n"), spec_error,
            MessageMatches(ContainsSubstring("line 4") &&
                           ContainsSubstring("lo:hi:count")));
    }
}

TEST_CASE("value errors carry line numbers", "[spec]") {
    auto load = [](const std::string& text) { return load_spec(temp_spec(text)); };

    SECTION("unquoted expression") {
        CHECK_THROWS_MATCHES(load("[primal]\ngrid = 0:1:2\nf = x1^2\n"), spec_error,
                             MessageMatches(ContainsSubstring("line 3") &&
                                            ContainsSubstring("quoted")));
    }
    SECTION("empty expression value") {
        CHECK_THROWS_MATCHES(load("[primal]\ngrid = 0:1:2\nf =\n"), spec_error,
                             MessageMatches(ContainsSubstring("quoted")));
    }
    SECTION("malformed expression") {
        CHECK_THROWS_MATCHES(load("[primal]\ngrid = 0:1:2\nf = \"x1 +\"\n"),
                             spec_error,
                             MessageMatches(ContainsSubstring("line 3") &&
                                            ContainsSubstring("bad expression")));
    }
    SECTION("axis with too few fields") {
        CHECK_THROWS_MATCHES(load("[primal]\ngrid = 0:1\nf = \"x1\"\n"), spec_error,
                             MessageMatches(ContainsSubstring("lo:hi:count")));
    }
    SECTION("axis count zero") {
        CHECK_THROWS_MATCHES(load("[primal]\ngrid = 0:1:0\nf = \"x1\"\n"),
                             spec_error,
                             MessageMatches(ContainsSubstring("positive integer")));
    }
    SECTION("reversed axis bounds") {
        CHECK_THROWS_MATCHES(load("[primal]\ngrid = 1:0:5\nf = \"x1\"\n"),
                             spec_error,
                             MessageMatches(ContainsSubstring("line 2") &&
                                            ContainsSubstring("bad grid")));
    }
    SECTION("dimension key disagrees with the axes") {
        CHECK_THROWS_MATCHES(
            load("[primal]\ndimension = 2\ngrid = 0:1:2\nf = \"x1\"\n"), spec_error,
            MessageMatches(ContainsSubstring("dimension does not match")));
    }
    SECTION("non-numeric tolerance") {
        CHECK_THROWS_MATCHES(load("[primal]\ngrid = 0:1:2\nf = \"x1\"\n"
                                  "[tolerances]\nzero_tol = tiny\n"),
                             spec_error,
                             MessageMatches(ContainsSubstring("line 5") &&
                                            ContainsSubstring("finite number")));
    }
    SECTION("non-positive tolerance") {
        CHECK_THROWS_MATCHES(load("[primal]\ngrid = 0:1:2\nf = \"x1\"\n"
                                  "[tolerances]\nzero_tol = 0\n"),
                             spec_error,
                             MessageMatches(ContainsSubstring("zero_tol")));
    }
}

TEST_CASE("semantic errors carry line numbers", "[spec]") {
    auto load = [](const std::string& text) { return load_spec(temp_spec(text)); };
    const std::string primal = "[primal]\ngrid = 0:1:3\nf = \"x1\"\n";

    SECTION("objective may not mention dual variables") {
        CHECK_THROWS_MATCHES(load("[primal]\ngrid = 0:1:3\nf = \"y1\"\n"),
                             spec_error,
                             MessageMatches(ContainsSubstring("only use x")));
    }
    SECTION("objective arity is bounded by the grid") {
        CHECK_THROWS_MATCHES(load("[primal]\ngrid = 0:1:3\nf = \"x2\"\n"),
                             spec_error,
                             MessageMatches(ContainsSubstring("more x variables")));
    }
    SECTION("constraints may not mention dual variables") {
        CHECK_THROWS_MATCHES(
            load("[primal]\ngrid = 0:1:3\nf = \"x1\"\nconstraints = \"y1\"\n"),
            spec_error, MessageMatches(ContainsSubstring("constraints may only")));
    }
    SECTION("lagrangian coupling needs constraints") {
        CHECK_THROWS_MATCHES(load_spec(fixture("lagrangian_missing_constraints.spec")),
                             spec_error,
                             MessageMatches(ContainsSubstring("line 6") &&
                                            ContainsSubstring("requires constraints")));
    }
    SECTION("expr is reserved for custom couplings") {
        CHECK_THROWS_MATCHES(
            load(primal + "[coupling]\nkind = zero\nexpr = \"x1\"\n"), spec_error,
            MessageMatches(ContainsSubstring("only valid for kind = custom")));
    }
    SECTION("blocks is reserved for min_lagrangian couplings") {
        CHECK_THROWS_MATCHES(
            load(primal + "[coupling]\nkind = zero\nblocks = 2\n"), spec_error,
            MessageMatches(ContainsSubstring("only valid for kind = min_lagrangian")));
    }
    SECTION("custom coupling without an expression") {
        CHECK_THROWS_MATCHES(load(primal + "[coupling]\nkind = custom\n"),
                             spec_error,
                             MessageMatches(ContainsSubstring("requires key 'expr'")));
    }
    SECTION("unknown coupling kind") {
        CHECK_THROWS_MATCHES(load(primal + "[coupling]\nkind = frob\n"), spec_error,
                             MessageMatches(ContainsSubstring("unknown coupling kind 'frob'")));
    }
    SECTION("coupling expressions stay within x and y") {
        CHECK_THROWS_MATCHES(
            load(primal + "[coupling]\nkind = custom\nexpr = \"x1 + u1\"\n"),
            spec_error, MessageMatches(ContainsSubstring("only use x and y")));
    }
    SECTION("bilinear coupling needs matching dimensions") {
        CHECK_THROWS_MATCHES(
            load(primal + "[dual]\ngrid = 0:1:2, 0:1:2\n[coupling]\nkind = bilinear\n"),
            spec_error, MessageMatches(ContainsSubstring("matching primal and dual")));
    }
    SECTION("lagrangian multiplier grid must match the constraints") {
        CHECK_THROWS_MATCHES(
            load("[primal]\ngrid = 0:1:3\nf = \"x1\"\nconstraints = \"x1\"\n"
                 "[dual]\ngrid = 0:1:2, 0:1:2\n[coupling]\nkind = lagrangian\n"),
            spec_error,
            MessageMatches(ContainsSubstring("one dual axis per constraint")));
    }
    SECTION("custom coupling arity is bounded by the dual grid") {
        CHECK_THROWS_MATCHES(
            load(primal + "[dual]\ngrid = 0:1:2\n[coupling]\nkind = custom\n"
                          "expr = \"x1 + y2\"\n"),
            spec_error, MessageMatches(ContainsSubstring("more y variables")));
    }
    SECTION("every feasible point removed") {
        CHECK_THROWS_AS(
            load("[primal]\ngrid = 0:1:3\nf = \"x1\"\nconstraints = \"1 + x1\"\n"),
            infeasible_error);
    }
}

TEST_CASE("optional-block errors carry line numbers", "[spec]") {
    auto load = [](const std::string& text) { return load_spec(temp_spec(text)); };
    const std::string primal = "[primal]\ngrid = 0:1:3\nf = \"x1\"\n";

    SECTION("perturbation grids must agree in dimension") {
        CHECK_THROWS_MATCHES(
            load(primal + "[perturbation]\nphi = \"x1 + u1\"\n"
                          "u_grid = 0:1:2\nu_star_grid = 0:1:2, 0:1:2\n"),
            spec_error, MessageMatches(ContainsSubstring("dimensions differ")));
    }
    SECTION("phi stays within x and u") {
        CHECK_THROWS_MATCHES(
            load(primal + "[perturbation]\nphi = \"x1 + y1\"\n"
                          "u_grid = 0:1:2\nu_star_grid = 0:1:2\n"),
            spec_error, MessageMatches(ContainsSubstring("only use x and u")));
    }
    SECTION("gap kind is restricted") {
        CHECK_THROWS_MATCHES(
            load(primal + "[gap]\nkind = banana\ngrid = 0:1:2\n"), spec_error,
            MessageMatches(ContainsSubstring("vip or ep")));
    }
    SECTION("missing operator graph file") {
        CHECK_THROWS_MATCHES(
            load(primal + "[gap]\nkind = vip\ngraph = nope.csv\ngrid = 0:1:2\n"),
            spec_error, MessageMatches(ContainsSubstring("not found")));
    }
    SECTION("corrupt operator graph file") {
        fs::path bad = temp_spec("y_1,v_1\n0,oops\n");
        CHECK_THROWS_MATCHES(load(primal + "[gap]\nkind = vip\ngraph = " +
                                  bad.string() + "\ngrid = 0:1:2\n"),
                             spec_error,
                             MessageMatches(ContainsSubstring("bad operator graph")));
    }
    SECTION("graph dimension must match the gap grid") {
        CHECK_THROWS_MATCHES(
            load(primal + "[gap]\nkind = vip\ngraph = " +
                 fixture("identity_graph.csv").string() +
                 "\ngrid = 0:1:2, 0:1:2\n"),
            spec_error, MessageMatches(ContainsSubstring("does not match the graph")));
    }
    SECTION("unknown stability family") {
        CHECK_THROWS_MATCHES(
            load(primal + "[stability]\nfamily = wobble\nk = 1\n"), spec_error,
            MessageMatches(ContainsSubstring("shift, scale or custom")));
    }
    SECTION("custom family without expressions") {
        CHECK_THROWS_MATCHES(
            load(primal + "[stability]\nfamily = custom\nk = 1\n"), spec_error,
            MessageMatches(ContainsSubstring("f_k or g_k")));
    }
    SECTION("k values must be positive integers") {
        CHECK_THROWS_MATCHES(
            load(primal + "[stability]\nfamily = shift\na = 1\nk = 1, 0\n"),
            spec_error,
            MessageMatches(ContainsSubstring("positive integers")));
        CHECK_THROWS_MATCHES(
            load(primal + "[stability]\nfamily = shift\na = 1\nk = 1.5\n"),
            spec_error,
            MessageMatches(ContainsSubstring("positive integers")));
    }
    SECTION("nonexistent file") {
        CHECK_THROWS_MATCHES(load_spec(fs::path("/nonexistent/nope.spec")),
                             std::invalid_argument,
                             MessageMatches(ContainsSubstring("cannot open")));
    }
}
