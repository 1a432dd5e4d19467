#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "gconj/conjugate.hpp"
#include "gconj/coupling.hpp"
#include "gconj/csv.hpp"
#include "gconj/duality.hpp"
#include "gconj/errors.hpp"
#include "gconj/parallel.hpp"
#include "gconj/sampled_function.hpp"
#include "gconj/sampling.hpp"
#include "gconj/tolerances.hpp"

namespace gconj {

enum class SequenceFamily { shift, scale, custom };

inline const char* to_string(SequenceFamily f) {
    switch (f) {
        case SequenceFamily::shift: return "shift";
        case SequenceFamily::scale: return "scale";
        case SequenceFamily::custom: return "custom";
    }
    return "?";
}

/// A sequence (f_k, g_k) converging to (base_f, base_g).
///
///   shift   f_k = f + a/k,        g_k = g
///   scale   f_k = f,              g_k = (1 + b/k) g
///   custom  f_k, g_k sampled from expressions with w1 bound to k
///
/// Every generated g_k must satisfy the coupling construction rules
/// (finite, nonnegative); every f_k must stay proper.
struct SequenceExperiment {
    SampledFunction base_f;
    CouplingSample base_g;
    std::vector<int> k_values;
    SequenceFamily family = SequenceFamily::shift;
    double a = 0.0;                     // shift amount
    double b = 0.0;                     // scale amount
    std::optional<Expression> f_k_expr; // custom: f_k(x; w1 = k)
    std::optional<Expression> g_k_expr; // custom: g_k(x, y; w1 = k)
};

struct StabilityRow {
    int k = 0;
    double f_distance = 0.0;
    double g_distance = 0.0;
    double conjugate_distance = 0.0;
};

/// One row per k plus limit verdicts. hypotheses_ok means every k passed
/// the zero-infimum check (d1) and membership for f_k; the first failure is
/// named in hypothesis_failure. The limit verdicts ask whether the base
/// pair itself is a member and, when every g_k passed the convexity check,
/// whether the base coupling does too.
struct StabilityReport {
    std::vector<StabilityRow> rows;
    bool hypotheses_ok = false;
    std::string hypothesis_failure;
    bool limit_member = false;
    bool limit_d2_checked = false;
    bool limit_d2_pass = false;
};

namespace detail {

inline double matrix_sup_distance(const CouplingSample& a, const CouplingSample& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("coupling matrices differ in shape");
    }
    double worst = 0.0;
    const auto& va = a.values();
    const auto& vb = b.values();
    for (std::size_t i = 0; i < va.size(); ++i) {
        double d = std::fabs(va[i] - vb[i]);
        if (d > worst) worst = d;
    }
    return worst;
}

}  // namespace detail

inline StabilityReport run_stability_experiment(const SequenceExperiment& exp,
                                                const ToleranceConfig& tol) {
    tol.validate();
    if (exp.k_values.empty()) {
        throw std::invalid_argument("k_values must be non-empty");
    }
    for (int k : exp.k_values) {
        if (k < 1) throw std::invalid_argument("k_values must be positive");
    }
    if (!(exp.base_f.domain() == exp.base_g.a())) {
        throw std::invalid_argument(
            "base_f must be sampled on the coupling's primal point set");
    }
    if (exp.family == SequenceFamily::custom &&
        !exp.f_k_expr && !exp.g_k_expr) {
        throw std::invalid_argument(
            "custom family needs an f_k or g_k expression");
    }

    const std::size_t nk = exp.k_values.size();
    const ConjugateResult base_conj = g_conjugate(exp.base_f, exp.base_g);

    struct PerK {
        StabilityRow row;
        bool d1_pass = false;
        bool member = false;
        bool d2_applicable = false;
        bool d2_pass = false;
        std::string error;
    };
    std::vector<PerK> results(nk);

    parallel::for_range(nk, [&](std::size_t idx) {
        PerK& r = results[idx];
        const int k = exp.k_values[idx];
        r.row.k = k;
        try {
            SampledFunction f_k = exp.base_f;
            CouplingSample g_k = exp.base_g;
            switch (exp.family) {
                case SequenceFamily::shift:
                    f_k = shifted(exp.base_f, exp.a / static_cast<double>(k));
                    break;
                case SequenceFamily::scale: {
                    const double factor = 1.0 + exp.b / static_cast<double>(k);
                    std::vector<double> scaled = exp.base_g.values();
                    for (double& v : scaled) v *= factor;
                    g_k = coupling_from_matrix(
                        exp.base_g.a(), exp.base_g.b(), std::move(scaled),
                        std::string("scale(") + to_string(exp.base_g.spec().kind()) +
                            ", k=" + std::to_string(k) + ")");
                    break;
                }
                case SequenceFamily::custom: {
                    const double w[] = {static_cast<double>(k)};
                    if (exp.f_k_expr) {
                        f_k = sample_expression(*exp.f_k_expr, exp.base_f.domain(),
                                                'x', w, exp.base_f.label());
                    }
                    if (exp.g_k_expr) {
                        const Expression& e = *exp.g_k_expr;
                        const PointSet& A = exp.base_g.a();
                        const PointSet& B = exp.base_g.b();
                        std::vector<double> values(A.size() * B.size());
                        for (std::size_t i = 0; i < A.size(); ++i) {
                            Bindings bind;
                            bind.x = A.point(i);
                            bind.w = w;
                            for (std::size_t j = 0; j < B.size(); ++j) {
                                bind.y = B.point(j);
                                ExtendedValue v = e.evaluate(bind);
                                if (!v.is_finite()) {
                                    throw eval_error("g_k overflowed to +inf");
                                }
                                values[i * B.size() + j] = v.value();
                            }
                        }
                        g_k = coupling_from_matrix(A, B, std::move(values),
                                                   "custom(k=" + std::to_string(k) + ")");
                    }
                    break;
                }
            }
            if (!f_k.is_proper()) {
                throw improper_function_error("f_k is +inf everywhere");
            }

            r.row.f_distance = sup_distance(f_k, exp.base_f);
            r.row.g_distance = detail::matrix_sup_distance(g_k, exp.base_g);

            ConjugateResult conj_k = g_conjugate(f_k, g_k);
            r.row.conjugate_distance = sup_distance(conj_k.values, base_conj.values);

            CouplingVerdict verdict = verify_coupling(g_k, tol, true);
            r.d1_pass = verdict.d1_pass;
            r.d2_applicable = verdict.d2_checked;
            r.d2_pass = verdict.d2_checked && verdict.d2_pass;

            MembershipReport mem = check_family_membership(f_k, g_k, tol);
            r.member = mem.member;
        } catch (const std::exception& e) {
            r.error = e.what();
        }
    });

    StabilityReport report;
    report.hypotheses_ok = true;
    bool all_d2 = true;
    for (std::size_t idx = 0; idx < nk; ++idx) {
        const PerK& r = results[idx];
        if (!r.error.empty()) {
            throw std::invalid_argument("k=" + std::to_string(exp.k_values[idx]) +
                                        ": " + r.error);
        }
        report.rows.push_back(r.row);
        if (report.hypotheses_ok) {
            if (!r.d1_pass) {
                report.hypotheses_ok = false;
                report.hypothesis_failure =
                    "k=" + std::to_string(r.row.k) + ": coupling infimum is not zero";
            } else if (!r.member) {
                report.hypotheses_ok = false;
                report.hypothesis_failure =
                    "k=" + std::to_string(r.row.k) + ": membership failed for f_k";
            }
        }
        all_d2 = all_d2 && r.d2_applicable && r.d2_pass;
    }

    MembershipReport limit = check_family_membership(exp.base_f, exp.base_g, tol);
    report.limit_member = limit.member;
    if (all_d2) {
        CouplingVerdict v = verify_coupling(exp.base_g, tol, true);
        report.limit_d2_checked = v.d2_checked;
        report.limit_d2_pass = v.d2_checked && v.d2_pass;
    }
    return report;
}

/// Rows "k,df,dg,dconj" then a final verdict line.
inline void write_stability_csv(std::ostream& os, const StabilityReport& report) {
    os << "k,df,dg,dconj\n";
    for (const auto& row : report.rows) {
        os << row.k << ',' << format_double(row.f_distance) << ','
           << format_double(row.g_distance) << ','
           << format_double(row.conjugate_distance) << '\n';
    }
    const bool pass = report.hypotheses_ok && report.limit_member;
    os << "verdict," << (pass ? "pass" : "fail") << ',';
    if (!report.hypotheses_ok) {
        std::string detail = report.hypothesis_failure;
        for (char& c : detail) {
            if (c == ',') c = ';';
        }
        os << detail;
    } else if (!report.limit_member) {
        os << "limit membership failed";
    } else {
        os << "hypotheses and limit membership hold";
    }
    os << '\n';
}

}  // namespace gconj
