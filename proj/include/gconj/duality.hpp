#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gconj/conjugate.hpp"
#include "gconj/coupling.hpp"
#include "gconj/errors.hpp"
#include "gconj/sampled_function.hpp"
#include "gconj/tolerances.hpp"

namespace gconj {

/// Does this coupling pair with f into a zero-gap dual? Membership needs a
/// proper conjugate and inf over (x, y) of f(x) + f^g(y) equal to zero.
struct MembershipReport {
    bool f_g_proper = false;
    double inf_f = 0.0;
    double inf_f_g = 0.0;
    double inf_gamma = 0.0;  // inf_f + inf_f_g; the two infima separate
    bool member = false;
};

inline MembershipReport check_family_membership(const SampledFunction& f,
                                                const CouplingSample& g,
                                                const ToleranceConfig& tol) {
    tol.validate();
    MembershipReport r;
    ConjugateResult conj = g_conjugate(f, g);
    r.f_g_proper = conj.values.is_proper();

    r.inf_f = infimum(f).value;
    r.inf_f_g = infimum(conj.values).value;
    r.inf_gamma = r.inf_f + r.inf_f_g;
    r.member = r.f_g_proper && std::fabs(r.inf_gamma) <= tol.zero_tol;
    return r;
}

/// Solves min f and min f^g on the sample and reports the duality gap
/// inf f + inf f^g. A zero gap within tolerance certifies that the coupling
/// closes the dual for this f.
struct DualityReport {
    double primal_value = 0.0;
    std::size_t primal_index = 0;
    std::vector<double> primal_point;

    double dual_value = 0.0;
    std::size_t dual_index = 0;
    std::vector<double> dual_point;

    double gap = 0.0;
    bool member = false;
};

inline DualityReport solve_primal_dual(const SampledFunction& f,
                                       const CouplingSample& g,
                                       const ToleranceConfig& tol) {
    tol.validate();
    DualityReport r;

    Infimum pf = infimum(f);
    r.primal_value = pf.value;
    r.primal_index = pf.arg_index;
    auto px = f.domain().point(pf.arg_index);
    r.primal_point.assign(px.begin(), px.end());

    ConjugateResult conj = g_conjugate(f, g);
    Infimum df = infimum(conj.values);
    r.dual_value = df.value;
    r.dual_index = df.arg_index;
    auto py = g.b().point(df.arg_index);
    r.dual_point.assign(py.begin(), py.end());

    r.gap = r.primal_value + r.dual_value;
    r.member = conj.values.is_proper() && std::fabs(r.gap) <= tol.zero_tol;
    return r;
}

/// True when the pair (x, y) closes the Young inequality:
/// f(x) + f^g(y) <= zero_tol. Both points must be sample points (exact
/// coordinate match); x must be in the effective domain of f.
inline bool optimality_certificate(std::span<const double> x, std::span<const double> y,
                                   const SampledFunction& f, const CouplingSample& g,
                                   const ToleranceConfig& tol) {
    tol.validate();
    if (!(f.domain() == g.a())) {
        throw std::invalid_argument(
            "f must be sampled on the coupling's primal point set");
    }
    auto ix = f.domain().find(x);
    if (!ix) throw std::invalid_argument("x is not a sample point");
    auto iy = g.b().find(y);
    if (!iy) throw std::invalid_argument("y is not a sample point");

    if (!f[*ix].is_finite()) return false;
    ConjugateResult conj = g_conjugate(f, g);
    double gamma = f[*ix].value() + conj.values[*iy].value();
    return gamma <= tol.zero_tol;
}

/// Biconjugate facts on the sample: f^gg never exceeds f, the two infima
/// agree when the coupling is a member, and every minimizer of f minimizes
/// f^gg. Membership failure is reported, not silently ignored.
struct BiconjugateLemmaReport {
    bool member = false;
    double inf_f = 0.0;
    double inf_f_gg = 0.0;
    bool inf_match = false;
    bool argmin_transfer = false;
    double max_upper_violation = 0.0;  // max over x of f^gg(x) - f(x), finite f only
};

inline BiconjugateLemmaReport check_biconjugate_lemma(const SampledFunction& f,
                                                      const CouplingSample& g,
                                                      const ToleranceConfig& tol) {
    tol.validate();
    BiconjugateLemmaReport r;

    MembershipReport m = check_family_membership(f, g, tol);
    r.member = m.member;

    ConjugateResult conj = g_conjugate(f, g);
    ConjugateResult biconj = g_biconjugate(conj.values, g);
    const SampledFunction& fgg = biconj.values;

    r.inf_f = infimum(f).value;
    r.inf_f_gg = infimum(fgg).value;
    r.inf_match = std::fabs(r.inf_f - r.inf_f_gg) <= tol.zero_tol;

    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!f[i].is_finite()) continue;  // f = +inf: upper bound is vacuous
        double v = fgg[i].value() - f[i].value();
        if (v > worst) worst = v;
    }
    r.max_upper_violation = worst;

    r.argmin_transfer = true;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!f[i].is_finite()) continue;
        if (f[i].value() <= r.inf_f + tol.zero_tol) {
            if (!(fgg[i].value() <= r.inf_f_gg + tol.zero_tol)) {
                r.argmin_transfer = false;
                break;
            }
        }
    }
    return r;
}

/// Value-function view of duality. phi(x, u) perturbs f(x) = phi(x, 0); the
/// marginal h(u) = inf_x phi(x, u) has alpha = h(0) as primal value, and
/// beta = inf over the sampled u* of h*(u*) as dual value via the coupling
/// g(x, u*) = f(x) + h*(u*). identity_violation measures
/// max over u* of |h*(u*) - phi*(0, u*)|, which is an exact identity, and
/// gap = alpha + beta is the duality gap (nonnegative up to roundoff).
struct PerturbationReport {
    double alpha = 0.0;
    double beta = 0.0;
    double gap = 0.0;
    double identity_violation = 0.0;

    SampledFunction marginal;            // h on the u sample
    SampledFunction conjugate_marginal;  // h* on the u* sample
    SampledFunction gap_function;        // f(x) + h*(u*) on A x U*
};

/// phi must be sampled on a cartesian product grid whose last `u_dimension`
/// axes are the perturbation directions; both the u sample and the u* grid
/// must contain the exact origin.
inline PerturbationReport perturbation_duality_report(const SampledFunction& phi,
                                                      std::size_t u_dimension,
                                                      const PointSet& u_star_grid,
                                                      const ToleranceConfig& tol) {
    tol.validate();
    if (!phi.domain().is_cartesian()) {
        throw std::invalid_argument("phi must be sampled on a cartesian grid");
    }
    const auto& axes = phi.domain().axes();
    if (u_dimension == 0 || u_dimension >= axes.size()) {
        throw std::invalid_argument(
            "u dimension must split the phi grid into x and u parts");
    }
    if (u_star_grid.dimension() != u_dimension) {
        throw std::invalid_argument("u* grid dimension must match u");
    }
    if (!phi.is_proper()) {
        throw improper_function_error("phi is +inf everywhere");
    }

    const std::size_t nx_axes = axes.size() - u_dimension;
    std::vector<GridAxis> x_axes(axes.begin(), axes.begin() + static_cast<std::ptrdiff_t>(nx_axes));
    std::vector<GridAxis> u_axes(axes.begin() + static_cast<std::ptrdiff_t>(nx_axes), axes.end());
    PointSet x_grid = PointSet::cartesian(std::move(x_axes));
    PointSet u_grid = PointSet::cartesian(std::move(u_axes));
    const std::size_t nx = x_grid.size();
    const std::size_t nu = u_grid.size();

    std::vector<double> zeros(u_dimension, 0.0);
    auto u0 = u_grid.find(zeros);
    if (!u0) throw std::invalid_argument("u sample must contain the origin exactly");
    auto us0 = u_star_grid.find(zeros);
    if (!us0) throw std::invalid_argument("u* grid must contain the origin exactly");

    // h(u) = min_x phi(x, u); +inf where no x gives a finite value. The u
    // axes vary fastest, so phi index = ix * nu + iu.
    std::vector<ExtendedValue> h(nu, ExtendedValue::infinity());
    for (std::size_t iu = 0; iu < nu; ++iu) {
        double best = 0.0;
        bool found = false;
        for (std::size_t ix = 0; ix < nx; ++ix) {
            ExtendedValue v = phi[ix * nu + iu];
            if (!v.is_finite()) continue;
            if (!found || v.value() < best) {
                best = v.value();
                found = true;
            }
        }
        if (found) h[iu] = ExtendedValue::finite(best);
    }

    PerturbationReport r{
        0.0, 0.0, 0.0, 0.0,
        SampledFunction(u_grid, h, "h"),
        SampledFunction(u_star_grid, std::vector<ExtendedValue>(u_star_grid.size()), "h*"),
        SampledFunction(u_star_grid, std::vector<ExtendedValue>(u_star_grid.size()), "gap"),
    };

    if (!h[*u0].is_finite()) {
        throw improper_function_error("phi(., 0) is +inf everywhere: f is improper");
    }
    r.alpha = h[*u0].value();

    // h*(u*) = max_u <u*, u> - h(u) and phi*(0, u*) = max_{x,u} <u*, u> -
    // phi(x, u). Sharing the dot products <u*, u> across both maxima makes
    // the identity h* = phi*(0, .) exact: per u, the max over x of
    // d - phi(x, u) is d - min_x phi(x, u) by monotonicity of rounding.
    const std::size_t ns = u_star_grid.size();
    std::vector<ExtendedValue> hstar(ns);
    double identity_worst = 0.0;
    for (std::size_t is = 0; is < ns; ++is) {
        auto ustar = u_star_grid.point(is);
        double best_h = -std::numeric_limits<double>::infinity();
        double best_phi = -std::numeric_limits<double>::infinity();
        bool any_h = false;
        bool any_phi = false;
        for (std::size_t iu = 0; iu < nu; ++iu) {
            auto up = u_grid.point(iu);
            double dot = 0.0;
            for (std::size_t d = 0; d < u_dimension; ++d) dot += ustar[d] * up[d];
            if (h[iu].is_finite()) {
                double cand = dot - h[iu].value();
                if (!any_h || cand > best_h) best_h = cand;
                any_h = true;
            }
            for (std::size_t ix = 0; ix < nx; ++ix) {
                ExtendedValue v = phi[ix * nu + iu];
                if (!v.is_finite()) continue;
                double cand = dot - v.value();
                if (!any_phi || cand > best_phi) best_phi = cand;
                any_phi = true;
            }
        }
        // phi proper makes h proper, so both maxima exist at every u*.
        (void)any_h;
        (void)any_phi;
        hstar[is] = ExtendedValue::finite(best_h);
        double dev = std::fabs(best_h - best_phi);
        if (dev > identity_worst) identity_worst = dev;
    }
    r.identity_violation = identity_worst;
    r.conjugate_marginal = SampledFunction(u_star_grid, hstar, "h*");

    r.beta = infimum(r.conjugate_marginal).value;
    r.gap = r.alpha + r.beta;

    // Gap function gamma(x, u*) = f(x) + h*(u*) on A x U*, f(x) = phi(x, 0),
    // laid out u*-fastest to match product(x_grid, u_star_grid).
    std::vector<ExtendedValue> gap_values(nx * ns);
    for (std::size_t ix = 0; ix < nx; ++ix) {
        ExtendedValue fx = phi[ix * nu + *u0];
        for (std::size_t is = 0; is < ns; ++is) {
            gap_values[ix * ns + is] =
                fx.is_finite()
                    ? ExtendedValue::finite(fx.value() + hstar[is].value())
                    : ExtendedValue::infinity();
        }
    }
    r.gap_function = SampledFunction(product(x_grid, u_star_grid),
                                     std::move(gap_values), "gamma");
    return r;
}

}  // namespace gconj
