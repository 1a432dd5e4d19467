// Command-line front end: loads a problem file, runs one analysis command,
// prints a key = value report and writes CSV artifacts.
//
// Exit codes: 0 every checked property passed, 1 a property failed,
// 2 input or usage error.

#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <gconj/gconj.hpp>

namespace {

namespace fs = std::filesystem;
using namespace gconj;

constexpr int kExitPass = 0;
constexpr int kExitPropertyFail = 1;
constexpr int kExitInputError = 2;

struct CommonFlags {
    std::string spec_path;
    std::optional<double> tol;
    std::string out_dir = ".";
    long seed = 0;  // accepted for interface symmetry; commands are deterministic
    int threads = 1;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("spec", flags.spec_path, "problem spec file")->required();
    cmd->add_option("--tol", flags.tol, "override zero tolerance");
    cmd->add_option("--out", flags.out_dir, "directory for CSV outputs");
    cmd->add_option("--seed", flags.seed, "random seed (reserved; commands are deterministic)");
    cmd->add_option("--threads", flags.threads, "worker thread count");
}

std::string fmt_bool(bool b) { return b ? "true" : "false"; }

std::string fmt_point(std::span<const double> p) {
    std::string out = "(";
    for (std::size_t d = 0; d < p.size(); ++d) {
        if (d) out += ", ";
        out += format_double(p[d]);
    }
    out += ")";
    return out;
}

void kv(const std::string& key, const std::string& value) {
    std::cout << key << " = " << value << "\n";
}

struct LoadedProblem {
    ProblemSpec spec;
    SampledFunction f;        // objective on the feasible set
    ToleranceConfig tol;
};

LoadedProblem load_problem(const CommonFlags& flags) {
    parallel::set_threads(flags.threads);
    ProblemSpec spec = load_spec(flags.spec_path);
    ToleranceConfig tol = spec.tolerances;
    if (flags.tol) {
        tol.zero_tol = *flags.tol;
        tol.validate();
    }
    SampledFunction f =
        sample_expression(spec.objective, spec.feasible_set, 'x', {}, "f");
    return LoadedProblem{std::move(spec), std::move(f), tol};
}

fs::path ensure_out_dir(const CommonFlags& flags) {
    fs::path dir(flags.out_dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& p, const std::function<void(std::ostream&)>& body) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::invalid_argument("cannot write " + p.string());
    body(os);
}

int cmd_check_coupling(const CommonFlags& flags) {
    LoadedProblem prob = load_problem(flags);
    CouplingSample g = evaluate_coupling(prob.spec.coupling, prob.spec.feasible_set,
                                         prob.spec.dual_grid);
    CouplingVerdict v = verify_coupling(g, prob.tol, true);

    kv("command", "check-coupling");
    kv("kind", to_string(g.spec().kind()));
    kv("rows", std::to_string(g.rows()));
    kv("cols", std::to_string(g.cols()));
    kv("d1_inf", format_double(v.d1_inf));
    kv("d1_arg_x", fmt_point(g.a().point(v.d1_arg.first)));
    kv("d1_arg_y", fmt_point(g.b().point(v.d1_arg.second)));
    kv("d1_pass", fmt_bool(v.d1_pass));
    kv("has_zero", fmt_bool(v.has_zero));
    kv("d2_checked", fmt_bool(v.d2_checked));
    if (v.d2_checked) {
        kv("d2_max_violation", format_double(v.d2_max_violation));
        kv("d2_pass", fmt_bool(v.d2_pass));
    }
    kv("d2_note", v.d2_note);
    kv("zero_slices", fmt_bool(v.zero_slices_pass));

    bool pass = v.d1_pass && (!v.d2_checked || v.d2_pass);
    kv("verdict", pass ? "PASS" : "FAIL");
    return pass ? kExitPass : kExitPropertyFail;
}

int cmd_conjugate(const CommonFlags& flags) {
    LoadedProblem prob = load_problem(flags);
    CouplingSample g = evaluate_coupling(prob.spec.coupling, prob.spec.feasible_set,
                                         prob.spec.dual_grid);
    ConjugateResult conj = g_conjugate(prob.f, g);
    ConjugateResult biconj = g_biconjugate(conj.values, g);
    double young = young_violation(prob.f, conj.values, g);

    double upper = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < prob.f.size(); ++i) {
        if (!prob.f[i].is_finite()) continue;
        double d = biconj.values[i].value() - prob.f[i].value();
        if (d > upper) upper = d;
    }

    fs::path dir = ensure_out_dir(flags);
    write_file(dir / "conjugate.csv",
               [&](std::ostream& os) { write_conjugate_csv(os, conj.values); });
    write_file(dir / "biconjugate.csv", [&](std::ostream& os) {
        write_biconjugate_csv(os, prob.f, biconj.values);
    });

    kv("command", "conjugate");
    kv("points_primal", std::to_string(prob.f.size()));
    kv("points_dual", std::to_string(conj.values.size()));
    kv("inf_f", format_double(infimum(prob.f).value));
    kv("inf_f_g", format_double(infimum(conj.values).value));
    kv("inf_f_gg", format_double(infimum(biconj.values).value));
    kv("young_violation", format_double(young));
    kv("biconjugate_excess", format_double(upper));
    kv("conjugate_csv", (dir / "conjugate.csv").string());
    kv("biconjugate_csv", (dir / "biconjugate.csv").string());

    bool pass = young <= prob.tol.zero_tol && upper <= prob.tol.zero_tol;
    kv("verdict", pass ? "PASS" : "FAIL");
    return pass ? kExitPass : kExitPropertyFail;
}

int cmd_duality(const CommonFlags& flags) {
    LoadedProblem prob = load_problem(flags);
    CouplingSample g = evaluate_coupling(prob.spec.coupling, prob.spec.feasible_set,
                                         prob.spec.dual_grid);
    MembershipReport mem = check_family_membership(prob.f, g, prob.tol);
    DualityReport rep = solve_primal_dual(prob.f, g, prob.tol);
    BiconjugateLemmaReport lemma = check_biconjugate_lemma(prob.f, g, prob.tol);

    kv("command", "duality");
    kv("f_g_proper", fmt_bool(mem.f_g_proper));
    kv("inf_f", format_double(mem.inf_f));
    kv("inf_f_g", format_double(mem.inf_f_g));
    kv("inf_gamma", format_double(mem.inf_gamma));
    kv("member", fmt_bool(mem.member));
    kv("primal_value", format_double(rep.primal_value));
    kv("primal_arg", fmt_point(rep.primal_point));
    kv("dual_value", format_double(rep.dual_value));
    kv("dual_arg", fmt_point(rep.dual_point));
    kv("gap", format_double(rep.gap));
    kv("biconj_inf_f_gg", format_double(lemma.inf_f_gg));
    kv("biconj_inf_match", fmt_bool(lemma.inf_match));
    kv("biconj_argmin_transfer", fmt_bool(lemma.argmin_transfer));
    kv("biconj_excess", format_double(lemma.max_upper_violation));

    bool pass = mem.member && std::fabs(rep.gap) <= prob.tol.zero_tol &&
                lemma.inf_match && lemma.argmin_transfer &&
                lemma.max_upper_violation <= prob.tol.zero_tol;
    kv("verdict", pass ? "PASS" : "FAIL");
    return pass ? kExitPass : kExitPropertyFail;
}

int cmd_saddle(const CommonFlags& flags) {
    LoadedProblem prob = load_problem(flags);
    CouplingSample g = evaluate_coupling(prob.spec.coupling, prob.spec.feasible_set,
                                         prob.spec.dual_grid);
    MembershipReport mem = check_family_membership(prob.f, g, prob.tol);
    SaddleReport rep = saddle_report(prob.f, g, prob.tol);

    kv("command", "saddle");
    kv("supinf", format_double(rep.minimax.supinf));
    kv("infsup", format_double(rep.minimax.infsup));
    kv("minimax_gap", format_double(rep.minimax.gap));
    kv("member", fmt_bool(mem.member));
    kv("zero_slices", fmt_bool(rep.zero_slices_pass));
    kv("primal_solutions", std::to_string(rep.primal_solutions.size()));
    kv("dual_solutions", std::to_string(rep.dual_solutions.size()));
    kv("saddle_count", std::to_string(rep.saddles.size()));
    bool saddle_checks = true;
    for (std::size_t s = 0; s < rep.saddles.size(); ++s) {
        const SaddlePointChecks& c = rep.saddles[s];
        std::string line = fmt_point(g.a().point(c.x_index)) + " x " +
                           fmt_point(g.b().point(c.y_index)) + " dom_f=" +
                           fmt_bool(c.x_in_dom_f) + " dual_opt=" +
                           fmt_bool(c.y_dual_optimal) + " biconj_touch=" +
                           fmt_bool(c.biconjugate_touch) + " primal_dual=" +
                           fmt_bool(c.primal_dual_pair);
        kv("saddle_" + std::to_string(s), line);
        saddle_checks = saddle_checks && c.x_in_dom_f && c.y_dual_optimal &&
                        c.biconjugate_touch && c.primal_dual_pair;
    }
    kv("converse_holds", fmt_bool(rep.converse_holds));
    kv("equivalence_holds", fmt_bool(rep.equivalence_holds));

    bool pass = rep.minimax.gap >= -prob.tol.zero_tol;
    if (mem.member) pass = pass && rep.converse_holds;
    if (mem.member && rep.zero_slices_pass) {
        pass = pass && saddle_checks && rep.equivalence_holds;
    }
    kv("verdict", pass ? "PASS" : "FAIL");
    return pass ? kExitPass : kExitPropertyFail;
}

int cmd_perturb(const CommonFlags& flags) {
    LoadedProblem prob = load_problem(flags);
    if (!prob.spec.perturbation) {
        throw std::invalid_argument("spec has no [perturbation] section");
    }
    const PerturbationBlock& block = *prob.spec.perturbation;

    std::vector<GridAxis> joint_axes = prob.spec.bounding_grid.axes();
    joint_axes.insert(joint_axes.end(), block.u_axes.begin(), block.u_axes.end());
    PointSet joint = PointSet::cartesian(std::move(joint_axes));
    SampledFunction phi = sample_split(block.phi, joint, 'x',
                                       prob.spec.bounding_grid.dimension(), 'u',
                                       {}, "phi");
    PerturbationReport rep = perturbation_duality_report(
        phi, block.u_dimension, block.u_star_grid, prob.tol);

    fs::path dir = ensure_out_dir(flags);
    write_file(dir / "perturb_gap.csv",
               [&](std::ostream& os) { write_gap_csv(os, rep.gap_function); });

    kv("command", "perturb");
    kv("alpha", format_double(rep.alpha));
    kv("beta", format_double(rep.beta));
    kv("gap", format_double(rep.gap));
    kv("identity_violation", format_double(rep.identity_violation));
    kv("gap_csv", (dir / "perturb_gap.csv").string());

    bool pass = rep.identity_violation <= prob.tol.zero_tol &&
                rep.gap >= -prob.tol.zero_tol;
    kv("verdict", pass ? "PASS" : "FAIL");
    return pass ? kExitPass : kExitPropertyFail;
}

int cmd_gap(const CommonFlags& flags) {
    LoadedProblem prob = load_problem(flags);
    if (!prob.spec.gap) {
        throw std::invalid_argument("spec has no [gap] section");
    }
    const GapBlock& block = *prob.spec.gap;
    fs::path dir = ensure_out_dir(flags);

    if (block.kind == GapBlock::Kind::vip) {
        const OperatorGraphSample& graph = *block.graph;
        MonotoneCertificate mono = check_monotone(graph);
        SampledFunction h = vip_gap(graph, block.grid);
        std::vector<std::size_t> sols = gap_minimize(h, prob.tol);

        // h at the sampled base points never dips below zero; the matching
        // pair contributes exactly 0 to the max.
        bool base_nonneg = true;
        for (std::size_t p = 0; p < graph.size(); ++p) {
            auto yp = graph.y(p);
            double best = 0.0;
            for (std::size_t q = 0; q < graph.size(); ++q) {
                auto y = graph.y(q);
                auto v = graph.v(q);
                double dot = 0.0;
                for (std::size_t d = 0; d < yp.size(); ++d) {
                    dot += v[d] * (yp[d] - y[d]);
                }
                if (q == 0 || dot > best) best = dot;
            }
            if (best < 0.0) base_nonneg = false;
        }

        write_file(dir / "gap.csv", [&](std::ostream& os) { write_gap_csv(os, h); });

        kv("command", "gap");
        kv("kind", "vip");
        kv("graph_pairs", std::to_string(graph.size()));
        kv("monotone_violation", format_double(mono.max_violation));
        kv("monotone_worst_pair", "(" + std::to_string(mono.worst_pair.first) + ", " +
                                      std::to_string(mono.worst_pair.second) + ")");
        kv("base_points_nonnegative", fmt_bool(base_nonneg));
        kv("solutions", std::to_string(sols.size()));
        for (std::size_t s = 0; s < sols.size(); ++s) {
            kv("solution_" + std::to_string(s), fmt_point(block.grid.point(sols[s])));
        }
        kv("gap_csv", (dir / "gap.csv").string());

        bool pass = mono.max_violation <= prob.tol.zero_tol && base_nonneg;
        kv("verdict", pass ? "PASS" : "FAIL");
        return pass ? kExitPass : kExitPropertyFail;
    }

    BifunctionSample bf = sample_bifunction(*block.bifunction, block.grid);
    EpAssumptions assume = check_ep_assumptions(bf, prob.tol);
    SampledFunction gf = ep_gap(bf);
    std::vector<std::size_t> sols = gap_minimize(gf, prob.tol);

    write_file(dir / "gap.csv", [&](std::ostream& os) { write_gap_csv(os, gf); });

    kv("command", "gap");
    kv("kind", "ep");
    kv("k_points", std::to_string(bf.size()));
    kv("diag_zero", fmt_bool(assume.diag_zero));
    kv("diag_max_abs", format_double(assume.diag_max_abs));
    kv("convexity_checked", fmt_bool(assume.convexity_checked));
    if (assume.convexity_checked) {
        kv("convex_in_y", fmt_bool(assume.convex_in_y));
        kv("convexity_violation", format_double(assume.convexity_violation));
    }
    kv("usc_note", assume.usc_in_x_note);
    kv("solutions", std::to_string(sols.size()));
    for (std::size_t s = 0; s < sols.size(); ++s) {
        kv("solution_" + std::to_string(s), fmt_point(block.grid.point(sols[s])));
    }
    kv("gap_csv", (dir / "gap.csv").string());

    bool pass = assume.diag_zero && (!assume.convexity_checked || assume.convex_in_y);
    kv("verdict", pass ? "PASS" : "FAIL");
    return pass ? kExitPass : kExitPropertyFail;
}

int cmd_stability(const CommonFlags& flags) {
    LoadedProblem prob = load_problem(flags);
    if (!prob.spec.stability) {
        throw std::invalid_argument("spec has no [stability] section");
    }
    const StabilityBlock& block = *prob.spec.stability;
    CouplingSample g = evaluate_coupling(prob.spec.coupling, prob.spec.feasible_set,
                                         prob.spec.dual_grid);

    SequenceExperiment exp{prob.f,        g,        block.k_values, block.family,
                           block.a,       block.b,  block.f_k,      block.g_k};
    StabilityReport rep = run_stability_experiment(exp, prob.tol);

    fs::path dir = ensure_out_dir(flags);
    write_file(dir / "stability.csv",
               [&](std::ostream& os) { write_stability_csv(os, rep); });

    kv("command", "stability");
    kv("family", to_string(block.family));
    for (const StabilityRow& row : rep.rows) {
        kv("k_" + std::to_string(row.k),
           "df=" + format_double(row.f_distance) + " dg=" +
               format_double(row.g_distance) + " dconj=" +
               format_double(row.conjugate_distance));
    }
    kv("hypotheses_ok", fmt_bool(rep.hypotheses_ok));
    if (!rep.hypotheses_ok) kv("hypothesis_failure", rep.hypothesis_failure);
    kv("limit_member", fmt_bool(rep.limit_member));
    kv("limit_d2_checked", fmt_bool(rep.limit_d2_checked));
    if (rep.limit_d2_checked) kv("limit_d2_pass", fmt_bool(rep.limit_d2_pass));
    kv("stability_csv", (dir / "stability.csv").string());

    bool pass = rep.hypotheses_ok && rep.limit_member;
    kv("verdict", pass ? "PASS" : "FAIL");
    return pass ? kExitPass : kExitPropertyFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for generalized conjugation"};
    app.require_subcommand(1);

    CommonFlags flags;
    struct Cmd {
        const char* name;
        const char* help;
        int (*run)(const CommonFlags&);
    };
    const Cmd cmds[] = {
        {"check-coupling", "verify coupling axioms on the sampled grid", cmd_check_coupling},
        {"conjugate", "compute f^g and f^gg, write CSVs", cmd_conjugate},
        {"duality", "membership, primal/dual solve and biconjugate checks", cmd_duality},
        {"saddle", "minimax and saddle-point analysis", cmd_saddle},
        {"perturb", "perturbation-scheme duality report", cmd_perturb},
        {"gap", "VIP or EP gap function analysis", cmd_gap},
        {"stability", "stability of conjugates along a sequence", cmd_stability},
    };

    int (*selected)(const CommonFlags&) = nullptr;
    for (const Cmd& c : cmds) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        add_common(sub, flags);
        sub->callback([&selected, &c] { selected = c.run; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitPass : kExitInputError;
    }

    try {
        return selected(flags);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
}
