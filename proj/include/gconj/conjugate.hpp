#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gconj/coupling.hpp"
#include "gconj/errors.hpp"
#include "gconj/parallel.hpp"
#include "gconj/sampled_function.hpp"

namespace gconj {

/// A conjugate together with, per output point, the input index where the
/// defining supremum was attained (lowest index on ties).
struct ConjugateResult {
    SampledFunction values;
    std::vector<std::size_t> arg_index;
};

/// f^g(y) = max_x { g(x, y) - f(x) } over the sample. f must live on the
/// same points as the coupling's A side and be proper; the result is then
/// finite everywhere on B. Each inner maximum scans x in index order, so
/// results and tie-breaks are reproducible for any thread count.
inline ConjugateResult g_conjugate(const SampledFunction& f, const CouplingSample& g) {
    if (!(f.domain() == g.a())) {
        throw std::invalid_argument(
            "f must be sampled on the coupling's primal point set");
    }
    if (!f.is_proper()) {
        throw improper_function_error("conjugate of '" + f.label() +
                                      "': function is +inf everywhere");
    }

    const std::size_t rows = g.rows();
    const std::size_t cols = g.cols();
    const auto& gv = g.values();
    const auto& fv = f.values();

    std::vector<ExtendedValue> out(cols);
    std::vector<std::size_t> arg(cols);
    parallel::for_range(cols, [&](std::size_t j) {
        double best = -std::numeric_limits<double>::infinity();
        std::size_t best_i = 0;
        bool found = false;
        for (std::size_t i = 0; i < rows; ++i) {
            if (!fv[i].is_finite()) continue;  // +inf rows cannot win a sup
            double cand = gv[i * cols + j] - fv[i].value();
            if (!found || cand > best) {
                best = cand;
                best_i = i;
                found = true;
            }
        }
        out[j] = ExtendedValue::finite(best);
        arg[j] = best_i;
    });

    return ConjugateResult{
        SampledFunction(g.b(), std::move(out), f.label() + "^g"),
        std::move(arg)};
}

/// f^gg(x) = max_y { g(x, y) - f^g(y) }, using a precomputed conjugate
/// sampled on the coupling's B side.
inline ConjugateResult g_biconjugate(const SampledFunction& f_g, const CouplingSample& g) {
    if (!(f_g.domain() == g.b())) {
        throw std::invalid_argument(
            "f^g must be sampled on the coupling's dual point set");
    }
    const std::size_t rows = g.rows();
    const std::size_t cols = g.cols();
    const auto& gv = g.values();
    const auto& cv = f_g.values();
    for (std::size_t j = 0; j < cols; ++j) {
        if (!cv[j].is_finite()) {
            throw std::invalid_argument("f^g must be finite on the dual sample");
        }
    }

    std::vector<ExtendedValue> out(rows);
    std::vector<std::size_t> arg(rows);
    parallel::for_range(rows, [&](std::size_t i) {
        double best = -std::numeric_limits<double>::infinity();
        std::size_t best_j = 0;
        for (std::size_t j = 0; j < cols; ++j) {
            double cand = gv[i * cols + j] - cv[j].value();
            if (j == 0 || cand > best) {
                best = cand;
                best_j = j;
            }
        }
        out[i] = ExtendedValue::finite(best);
        arg[i] = best_j;
    });

    return ConjugateResult{
        SampledFunction(g.a(), std::move(out), f_g.label() + "g"),
        std::move(arg)};
}

/// Convenience: conjugate then biconjugate in one call.
inline ConjugateResult biconjugate_of(const SampledFunction& f, const CouplingSample& g) {
    return g_biconjugate(g_conjugate(f, g).values, g);
}

/// Largest violation of g(x, y) <= f(x) + f^g(y) over the sample, i.e.
/// max over finite-f pairs of (g(x, y) - f(x)) - f^g(y). When f_g was
/// produced by g_conjugate on the same data this is never positive, and it
/// hits zero exactly at each column's attaining row; both facts hold in
/// floating point because the same subtraction order is used here and there.
inline double young_violation(const SampledFunction& f, const SampledFunction& f_g,
                              const CouplingSample& g) {
    if (!(f.domain() == g.a()) || !(f_g.domain() == g.b())) {
        throw std::invalid_argument("young_violation: domain mismatch");
    }
    if (!f.is_proper()) {
        throw improper_function_error("young_violation: f is +inf everywhere");
    }
    const std::size_t rows = g.rows();
    const std::size_t cols = g.cols();
    const auto& gv = g.values();

    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rows; ++i) {
        if (!f[i].is_finite()) continue;
        const double fx = f[i].value();
        for (std::size_t j = 0; j < cols; ++j) {
            if (!f_g[j].is_finite()) continue;  // +inf dual value: inequality is slack
            double v = (gv[i * cols + j] - fx) - f_g[j].value();
            if (v > worst) worst = v;
        }
    }
    if (worst == -std::numeric_limits<double>::infinity()) {
        throw std::invalid_argument("young_violation: no finite pair to check");
    }
    return worst;
}

/// Fast classical conjugate on a 1-D grid: values[j] = max_i (s_j * x_i - f_i).
/// xs must be strictly increasing and slopes nondecreasing; everything finite.
///
/// Works in two phases: extract the lower convex hull of (x_i, f_i) by a
/// monotone scan (collinear points dropped, so only strict vertices remain),
/// then sweep the sorted slopes with a pointer that only moves right,
/// advancing while the next hull vertex scores at least as well in the
/// float objective actually being maximized. Because the advance rule
/// compares the same rounded quantity max_i would, the result equals the
/// brute-force maximum bit for bit while costing O(n + m) after the hull.
inline std::vector<double> fenchel_conjugate_1d_fast(std::span<const double> xs,
                                                     std::span<const double> fs,
                                                     std::span<const double> slopes) {
    const std::size_t n = xs.size();
    if (n == 0 || fs.size() != n) {
        throw std::invalid_argument("fenchel_conjugate_1d_fast: bad sample shape");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(xs[i]) || !std::isfinite(fs[i])) {
            throw std::invalid_argument("fenchel_conjugate_1d_fast: non-finite input");
        }
        if (i > 0 && !(xs[i - 1] < xs[i])) {
            throw std::invalid_argument(
                "fenchel_conjugate_1d_fast: xs must be strictly increasing");
        }
    }
    for (std::size_t j = 0; j < slopes.size(); ++j) {
        if (!std::isfinite(slopes[j])) {
            throw std::invalid_argument("fenchel_conjugate_1d_fast: non-finite slope");
        }
        if (j > 0 && slopes[j - 1] > slopes[j]) {
            throw std::invalid_argument(
                "fenchel_conjugate_1d_fast: slopes must be nondecreasing");
        }
    }

    // Lower hull indices. Keep b between a and c only when slope(a,b) is
    // strictly below slope(b,c); ties (collinear) drop b.
    std::vector<std::size_t> hull;
    hull.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        while (hull.size() >= 2) {
            std::size_t a = hull[hull.size() - 2];
            std::size_t b = hull[hull.size() - 1];
            long double lhs = static_cast<long double>(fs[b] - fs[a]) *
                              static_cast<long double>(xs[i] - xs[b]);
            long double rhs = static_cast<long double>(fs[i] - fs[b]) *
                              static_cast<long double>(xs[b] - xs[a]);
            if (lhs >= rhs) {
                hull.pop_back();
            } else {
                break;
            }
        }
        hull.push_back(i);
    }

    std::vector<double> out(slopes.size());
    std::size_t k = 0;
    for (std::size_t j = 0; j < slopes.size(); ++j) {
        const double s = slopes[j];
        while (k + 1 < hull.size()) {
            double cur = s * xs[hull[k]] - fs[hull[k]];
            double nxt = s * xs[hull[k + 1]] - fs[hull[k + 1]];
            if (nxt >= cur) {
                ++k;
            } else {
                break;
            }
        }
        out[j] = s * xs[hull[k]] - fs[hull[k]];
    }
    return out;
}

}  // namespace gconj
