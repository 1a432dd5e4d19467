#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gconj/conjugate.hpp"
#include "gconj/coupling.hpp"
#include "gconj/duality.hpp"
#include "gconj/errors.hpp"
#include "gconj/sampled_function.hpp"
#include "gconj/tolerances.hpp"

namespace gconj {

/// L(x, y) = f(x) - g(x, y) on A x B. Rows where f(x) = +inf are +inf
/// across all y; every other entry is finite.
class LagrangeSample {
public:
    LagrangeSample(PointSet a, PointSet b, std::vector<ExtendedValue> values)
        : a_(std::move(a)), b_(std::move(b)), values_(std::move(values)) {
        if (values_.size() != a_.size() * b_.size()) {
            throw std::invalid_argument("lagrangian matrix shape mismatch");
        }
    }

    const PointSet& a() const noexcept { return a_; }
    const PointSet& b() const noexcept { return b_; }
    std::size_t rows() const noexcept { return a_.size(); }
    std::size_t cols() const noexcept { return b_.size(); }

    ExtendedValue at(std::size_t i, std::size_t j) const {
        if (i >= rows() || j >= cols()) {
            throw std::out_of_range("lagrangian index out of range");
        }
        return values_[i * cols() + j];
    }

    bool row_finite(std::size_t i) const { return at(i, 0).is_finite(); }

private:
    PointSet a_;
    PointSet b_;
    std::vector<ExtendedValue> values_;
};

inline LagrangeSample lagrange_sample(const SampledFunction& f, const CouplingSample& g) {
    if (!(f.domain() == g.a())) {
        throw std::invalid_argument(
            "f must be sampled on the coupling's primal point set");
    }
    if (!f.is_proper()) {
        throw improper_function_error("lagrange_sample: f is +inf everywhere");
    }
    const std::size_t rows = g.rows();
    const std::size_t cols = g.cols();
    std::vector<ExtendedValue> values(rows * cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!f[i].is_finite()) {
            for (std::size_t j = 0; j < cols; ++j) {
                values[i * cols + j] = ExtendedValue::infinity();
            }
            continue;
        }
        const double fx = f[i].value();
        for (std::size_t j = 0; j < cols; ++j) {
            values[i * cols + j] = ExtendedValue::finite(fx - g.at(i, j));
        }
    }
    return LagrangeSample(g.a(), g.b(), std::move(values));
}

/// sup_y inf_x L versus inf_x sup_y L on the sample. The gap
/// infsup - supinf is nonnegative by weak minimax, which holds exactly here
/// because both sides select from the same stored values.
struct MinimaxResult {
    double supinf = 0.0;
    double infsup = 0.0;
    double gap = 0.0;
};

inline MinimaxResult minimax_check(const LagrangeSample& L, const ToleranceConfig& tol) {
    tol.validate();
    const std::size_t rows = L.rows();
    const std::size_t cols = L.cols();

    bool any_finite = false;
    for (std::size_t i = 0; i < rows; ++i) {
        if (L.row_finite(i)) {
            any_finite = true;
            break;
        }
    }
    if (!any_finite) {
        throw improper_function_error("minimax_check: L is +inf everywhere");
    }

    MinimaxResult r;
    double supinf = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < cols; ++j) {
        double colmin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < rows; ++i) {
            if (!L.row_finite(i)) continue;  // +inf never the inner min
            colmin = std::min(colmin, L.at(i, j).value());
        }
        supinf = std::max(supinf, colmin);
    }
    double infsup = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rows; ++i) {
        if (!L.row_finite(i)) continue;
        double rowmax = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < cols; ++j) {
            rowmax = std::max(rowmax, L.at(i, j).value());
        }
        infsup = std::min(infsup, rowmax);
    }
    r.supinf = supinf;
    r.infsup = infsup;
    r.gap = infsup - supinf;
    return r;
}

/// Saddle pairs of L on the sample: (i, j) with
/// L(i, j) >= max_y L(i, y) - zero_tol and L(i, j) <= min_x L(x, j) + zero_tol.
/// Returned in row-major order.
inline std::vector<std::pair<std::size_t, std::size_t>> find_saddle_points(
    const LagrangeSample& L, const ToleranceConfig& tol) {
    tol.validate();
    const std::size_t rows = L.rows();
    const std::size_t cols = L.cols();

    std::vector<double> rowmax(rows, -std::numeric_limits<double>::infinity());
    std::vector<bool> rowok(rows, false);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!L.row_finite(i)) continue;
        rowok[i] = true;
        for (std::size_t j = 0; j < cols; ++j) {
            rowmax[i] = std::max(rowmax[i], L.at(i, j).value());
        }
    }
    std::vector<double> colmin(cols, std::numeric_limits<double>::infinity());
    bool any = false;
    for (std::size_t i = 0; i < rows; ++i) {
        if (!rowok[i]) continue;
        any = true;
        for (std::size_t j = 0; j < cols; ++j) {
            colmin[j] = std::min(colmin[j], L.at(i, j).value());
        }
    }
    if (!any) {
        throw improper_function_error("find_saddle_points: L is +inf everywhere");
    }

    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < rows; ++i) {
        if (!rowok[i]) continue;
        for (std::size_t j = 0; j < cols; ++j) {
            double v = L.at(i, j).value();
            if (v >= rowmax[i] - tol.zero_tol && v <= colmin[j] + tol.zero_tol) {
                out.emplace_back(i, j);
            }
        }
    }
    return out;
}

/// Checks attached to one saddle pair.
struct SaddlePointChecks {
    std::size_t x_index = 0;
    std::size_t y_index = 0;
    bool x_in_dom_f = false;       // f finite at the saddle x
    bool y_dual_optimal = false;   // y minimizes f^g
    bool biconjugate_touch = false;  // f^gg(x) = f(x) at the saddle x
    bool primal_dual_pair = false;   // (x, y) in argmin f x argmin f^g
};

/// Saddle structure of f against a coupling. converse_holds: every
/// (primal argmin, dual argmin) pair is a saddle. equivalence_holds: the
/// saddle set coincides with that product, which is the expected picture
/// when every x slice of g reaches zero (zero_slices_pass).
struct SaddleReport {
    MinimaxResult minimax;
    std::vector<SaddlePointChecks> saddles;
    std::vector<std::size_t> primal_solutions;
    std::vector<std::size_t> dual_solutions;
    bool zero_slices_pass = false;
    bool converse_holds = false;
    bool equivalence_holds = false;
};

inline SaddleReport saddle_report(const SampledFunction& f, const CouplingSample& g,
                                  const ToleranceConfig& tol) {
    tol.validate();
    SaddleReport r;

    LagrangeSample L = lagrange_sample(f, g);
    r.minimax = minimax_check(L, tol);
    auto saddles = find_saddle_points(L, tol);

    ConjugateResult conj = g_conjugate(f, g);
    ConjugateResult biconj = g_biconjugate(conj.values, g);

    double inf_f = infimum(f).value;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i].is_finite() && f[i].value() <= inf_f + tol.zero_tol) {
            r.primal_solutions.push_back(i);
        }
    }
    double inf_fg = infimum(conj.values).value;
    for (std::size_t j = 0; j < conj.values.size(); ++j) {
        if (conj.values[j].value() <= inf_fg + tol.zero_tol) {
            r.dual_solutions.push_back(j);
        }
    }

    std::set<std::pair<std::size_t, std::size_t>> saddle_set(saddles.begin(), saddles.end());
    std::set<std::size_t> primal_set(r.primal_solutions.begin(), r.primal_solutions.end());
    std::set<std::size_t> dual_set(r.dual_solutions.begin(), r.dual_solutions.end());

    for (auto [i, j] : saddles) {
        SaddlePointChecks c;
        c.x_index = i;
        c.y_index = j;
        c.x_in_dom_f = f[i].is_finite();
        c.y_dual_optimal = conj.values[j].value() <= inf_fg + tol.zero_tol;
        c.biconjugate_touch =
            c.x_in_dom_f &&
            std::fabs(biconj.values[i].value() - f[i].value()) <= tol.zero_tol;
        c.primal_dual_pair = primal_set.count(i) != 0 && dual_set.count(j) != 0;
        r.saddles.push_back(c);
    }

    r.zero_slices_pass = verify_coupling(g, tol, false).zero_slices_pass;

    r.converse_holds = true;
    for (std::size_t i : r.primal_solutions) {
        for (std::size_t j : r.dual_solutions) {
            if (saddle_set.count({i, j}) == 0) {
                r.converse_holds = false;
                break;
            }
        }
        if (!r.converse_holds) break;
    }

    r.equivalence_holds = r.converse_holds;
    for (const auto& c : r.saddles) {
        if (!c.primal_dual_pair) {
            r.equivalence_holds = false;
            break;
        }
    }
    return r;
}

}  // namespace gconj
