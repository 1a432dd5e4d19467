#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gconj/errors.hpp"
#include "gconj/expr.hpp"
#include "gconj/parallel.hpp"
#include "gconj/point_set.hpp"
#include "gconj/tolerances.hpp"

namespace gconj {

/// Families of coupling functions g(x, y).
///
///   zero            g = 0
///   norm            g = |y|_2
///   exp_gap         g = exp(|x|_2 - |y|_2)
///   bilinear        g = <x, y>  (classical pairing; the one family that may
///                   go negative, kept for the Legendre transform path)
///   lagrangian      g = <y, -h(x)> for constraint list h
///   min_lagrangian  g = min_k <-h(x), y_(k)> over blocks y_(k) of y
///   custom          g given by an expression in x and y
///   external        matrix supplied directly, no formula attached
enum class CouplingKind {
    zero,
    norm,
    exp_gap,
    bilinear,
    lagrangian,
    min_lagrangian,
    custom,
    external,
};

inline const char* to_string(CouplingKind k) {
    switch (k) {
        case CouplingKind::zero: return "zero";
        case CouplingKind::norm: return "norm";
        case CouplingKind::exp_gap: return "exp_gap";
        case CouplingKind::bilinear: return "bilinear";
        case CouplingKind::lagrangian: return "lagrangian";
        case CouplingKind::min_lagrangian: return "min_lagrangian";
        case CouplingKind::custom: return "custom";
        case CouplingKind::external: return "external";
    }
    return "?";
}

/// Recipe for a coupling function; evaluate_coupling turns it into a matrix.
class CouplingSpec {
public:
    static CouplingSpec zero() { return CouplingSpec(CouplingKind::zero); }
    static CouplingSpec norm() { return CouplingSpec(CouplingKind::norm); }
    static CouplingSpec exp_gap() { return CouplingSpec(CouplingKind::exp_gap); }
    static CouplingSpec bilinear() { return CouplingSpec(CouplingKind::bilinear); }

    static CouplingSpec lagrangian(std::vector<Expression> constraints) {
        if (constraints.empty()) {
            throw std::invalid_argument("lagrangian coupling needs constraints");
        }
        CouplingSpec s(CouplingKind::lagrangian);
        s.constraints_ = std::move(constraints);
        return s;
    }

    static CouplingSpec min_lagrangian(std::vector<Expression> constraints,
                                       std::size_t blocks) {
        if (constraints.empty()) {
            throw std::invalid_argument("min_lagrangian coupling needs constraints");
        }
        if (blocks < 1) {
            throw std::invalid_argument("min_lagrangian needs at least one block");
        }
        CouplingSpec s(CouplingKind::min_lagrangian);
        s.constraints_ = std::move(constraints);
        s.blocks_ = blocks;
        return s;
    }

    static CouplingSpec custom(Expression e) {
        CouplingSpec s(CouplingKind::custom);
        s.expr_ = std::move(e);
        return s;
    }

    static CouplingSpec external(std::string label) {
        CouplingSpec s(CouplingKind::external);
        s.label_ = std::move(label);
        return s;
    }

    CouplingKind kind() const noexcept { return kind_; }

    const std::vector<Expression>& constraints() const {
        if (kind_ != CouplingKind::lagrangian && kind_ != CouplingKind::min_lagrangian) {
            throw std::logic_error("coupling has no constraint list");
        }
        return constraints_;
    }

    std::size_t blocks() const {
        if (kind_ != CouplingKind::min_lagrangian) {
            throw std::logic_error("coupling has no block count");
        }
        return blocks_;
    }

    const Expression& expression() const {
        if (!expr_) throw std::logic_error("coupling has no expression");
        return *expr_;
    }

    const std::string& label() const noexcept { return label_; }

private:
    explicit CouplingSpec(CouplingKind k) : kind_(k) {}

    CouplingKind kind_;
    std::vector<Expression> constraints_;
    std::size_t blocks_ = 1;
    std::optional<Expression> expr_;
    std::string label_;
};

/// A coupling evaluated on A x B, stored row-major by A index. Entries are
/// finite, and nonnegative for every kind except bilinear; violating either
/// at construction is an error, not a flag.
class CouplingSample {
public:
    CouplingSample(PointSet a, PointSet b, std::vector<double> values, CouplingSpec spec)
        : a_(std::move(a)), b_(std::move(b)), values_(std::move(values)), spec_(std::move(spec)) {
        if (values_.size() != a_.size() * b_.size()) {
            throw std::invalid_argument("coupling matrix shape mismatch");
        }
        const bool allow_negative = spec_.kind() == CouplingKind::bilinear;
        for (std::size_t i = 0; i < a_.size(); ++i) {
            for (std::size_t j = 0; j < b_.size(); ++j) {
                double v = values_[i * b_.size() + j];
                if (!std::isfinite(v)) {
                    throw std::invalid_argument(bad_entry("non-finite", i, j));
                }
                if (!allow_negative && v < 0.0) {
                    throw std::invalid_argument(bad_entry("negative", i, j));
                }
            }
        }
    }

    const PointSet& a() const noexcept { return a_; }
    const PointSet& b() const noexcept { return b_; }
    const CouplingSpec& spec() const noexcept { return spec_; }
    const std::vector<double>& values() const noexcept { return values_; }
    std::size_t rows() const noexcept { return a_.size(); }
    std::size_t cols() const noexcept { return b_.size(); }

    double at(std::size_t i, std::size_t j) const {
        if (i >= rows() || j >= cols()) {
            throw std::out_of_range("coupling index out of range");
        }
        return values_[i * cols() + j];
    }

private:
    std::string bad_entry(const char* what, std::size_t i, std::size_t j) const {
        std::string msg = std::string(what) + " coupling value at x index " +
                          std::to_string(i) + " = (";
        auto px = a_.point(i);
        for (std::size_t d = 0; d < px.size(); ++d) {
            if (d) msg += ", ";
            msg += std::to_string(px[d]);
        }
        msg += "), y index " + std::to_string(j) + " = (";
        auto py = b_.point(j);
        for (std::size_t d = 0; d < py.size(); ++d) {
            if (d) msg += ", ";
            msg += std::to_string(py[d]);
        }
        msg += ")";
        return msg;
    }

    PointSet a_;
    PointSet b_;
    std::vector<double> values_;
    CouplingSpec spec_;
};

namespace detail {

inline std::vector<double> norms_of(const PointSet& ps) {
    std::vector<double> out(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) {
        auto p = ps.point(i);
        double s = 0.0;
        for (double c : p) s += c * c;
        out[i] = std::sqrt(s);
    }
    return out;
}

/// h_c(x_i) for every constraint and point; eval failures surface with the
/// lowest point index.
inline std::vector<double> constraint_matrix(const std::vector<Expression>& hs,
                                             const PointSet& a) {
    std::vector<double> H(a.size() * hs.size());
    std::vector<std::optional<std::string>> errors(a.size());
    parallel::for_range(a.size(), [&](std::size_t i) {
        Bindings b;
        b.x = a.point(i);
        for (std::size_t c = 0; c < hs.size(); ++c) {
            try {
                ExtendedValue v = hs[c].evaluate(b);
                if (!v.is_finite()) {
                    throw eval_error("constraint " + std::to_string(c) +
                                     " overflowed to +inf");
                }
                H[i * hs.size() + c] = v.value();
            } catch (const eval_error& e) {
                if (!errors[i]) errors[i] = e.what();
                return;
            }
        }
    });
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (errors[i]) {
            throw eval_error("at point " + std::to_string(i) + ": " + *errors[i]);
        }
    }
    return H;
}

}  // namespace detail

/// Materializes a coupling recipe on A x B. Rows are filled in parallel;
/// the result is identical for any thread count.
inline CouplingSample evaluate_coupling(const CouplingSpec& spec, const PointSet& a,
                                        const PointSet& b) {
    const std::size_t rows = a.size();
    const std::size_t cols = b.size();
    std::vector<double> values(rows * cols);

    switch (spec.kind()) {
        case CouplingKind::zero:
            break;  // already zero-filled

        case CouplingKind::norm: {
            std::vector<double> nb = detail::norms_of(b);
            parallel::for_range(rows, [&](std::size_t i) {
                for (std::size_t j = 0; j < cols; ++j) values[i * cols + j] = nb[j];
            });
            break;
        }

        case CouplingKind::exp_gap: {
            std::vector<double> na = detail::norms_of(a);
            std::vector<double> nb = detail::norms_of(b);
            parallel::for_range(rows, [&](std::size_t i) {
                for (std::size_t j = 0; j < cols; ++j) {
                    values[i * cols + j] = std::exp(na[i] - nb[j]);
                }
            });
            break;
        }

        case CouplingKind::bilinear: {
            if (a.dimension() != b.dimension()) {
                throw std::invalid_argument(
                    "bilinear coupling needs matching dimensions");
            }
            parallel::for_range(rows, [&](std::size_t i) {
                auto px = a.point(i);
                for (std::size_t j = 0; j < cols; ++j) {
                    auto py = b.point(j);
                    double s = 0.0;
                    for (std::size_t d = 0; d < px.size(); ++d) s += px[d] * py[d];
                    values[i * cols + j] = s;
                }
            });
            break;
        }

        case CouplingKind::lagrangian: {
            const auto& hs = spec.constraints();
            if (b.dimension() != hs.size()) {
                throw std::invalid_argument(
                    "lagrangian coupling needs one multiplier per constraint");
            }
            std::vector<double> H = detail::constraint_matrix(hs, a);
            parallel::for_range(rows, [&](std::size_t i) {
                const double* hrow = H.data() + i * hs.size();
                for (std::size_t j = 0; j < cols; ++j) {
                    auto py = b.point(j);
                    double s = 0.0;
                    for (std::size_t c = 0; c < hs.size(); ++c) s += py[c] * (-hrow[c]);
                    values[i * cols + j] = s;
                }
            });
            break;
        }

        case CouplingKind::min_lagrangian: {
            const auto& hs = spec.constraints();
            const std::size_t m = hs.size();
            const std::size_t blocks = spec.blocks();
            if (b.dimension() != m * blocks) {
                throw std::invalid_argument(
                    "min_lagrangian coupling needs dim(B) = constraints * blocks");
            }
            std::vector<double> H = detail::constraint_matrix(hs, a);
            parallel::for_range(rows, [&](std::size_t i) {
                const double* hrow = H.data() + i * m;
                for (std::size_t j = 0; j < cols; ++j) {
                    auto py = b.point(j);
                    double best = 0.0;
                    for (std::size_t k = 0; k < blocks; ++k) {
                        double s = 0.0;
                        for (std::size_t c = 0; c < m; ++c) {
                            s += (-hrow[c]) * py[k * m + c];
                        }
                        if (k == 0 || s < best) best = s;
                    }
                    values[i * cols + j] = best;
                }
            });
            break;
        }

        case CouplingKind::custom: {
            const Expression& e = spec.expression();
            if (e.max_index('x') > a.dimension() || e.max_index('y') > b.dimension()) {
                throw std::invalid_argument(
                    "custom coupling uses variables beyond the grid dimensions");
            }
            if (e.max_index('u') > 0 || e.max_index('w') > 0) {
                throw std::invalid_argument(
                    "custom coupling may only use x and y variables");
            }
            std::vector<std::optional<std::string>> errors(rows);
            parallel::for_range(rows, [&](std::size_t i) {
                Bindings bind;
                bind.x = a.point(i);
                for (std::size_t j = 0; j < cols; ++j) {
                    bind.y = b.point(j);
                    try {
                        ExtendedValue v = e.evaluate(bind);
                        if (!v.is_finite()) {
                            throw eval_error("coupling overflowed to +inf");
                        }
                        values[i * cols + j] = v.value();
                    } catch (const eval_error& err) {
                        errors[i] = "at y index " + std::to_string(j) + ": " + err.what();
                        return;
                    }
                }
            });
            for (std::size_t i = 0; i < rows; ++i) {
                if (errors[i]) {
                    throw eval_error("at x index " + std::to_string(i) + ", " + *errors[i]);
                }
            }
            break;
        }

        case CouplingKind::external:
            throw std::invalid_argument(
                "external couplings carry their own matrix; use coupling_from_matrix");
    }

    return CouplingSample(a, b, std::move(values), spec);
}

/// Wraps an externally produced matrix as a coupling sample. Same finiteness
/// and nonnegativity rules as the builtin kinds.
inline CouplingSample coupling_from_matrix(PointSet a, PointSet b,
                                           std::vector<double> values,
                                           std::string label = "external") {
    return CouplingSample(std::move(a), std::move(b), std::move(values),
                          CouplingSpec::external(std::move(label)));
}

/// Outcome of checking coupling axioms on a sample.
///
/// d1: inf over the sample should be zero. d2: midpoint convexity along
/// every B axis (only checkable when B is a cartesian grid). zero_slices:
/// every x row attains inf_y g(x, y) = 0 within tolerance; several saddle
/// results need this stronger property. has_zero reports whether the d1
/// infimum is attained exactly at some sample pair.
struct CouplingVerdict {
    double d1_inf = 0.0;
    std::pair<std::size_t, std::size_t> d1_arg{0, 0};
    bool d1_pass = false;
    bool has_zero = false;

    bool d2_checked = false;
    double d2_max_violation = 0.0;
    bool d2_pass = true;
    std::string d2_note;

    bool zero_slices_pass = false;
};

/// Checks (d1) inf g = 0, optional (d2) convexity in y, and the per-row
/// zero-slice property. A finite sample can only ever certify d2 up to
/// midpoint convexity on the grid; the verdict says so in d2_note.
inline CouplingVerdict verify_coupling(const CouplingSample& g,
                                       const ToleranceConfig& tol,
                                       bool check_d2 = true) {
    tol.validate();
    CouplingVerdict out;

    const std::size_t rows = g.rows();
    const std::size_t cols = g.cols();
    const auto& v = g.values();

    double inf = v[0];
    std::size_t arg = 0;
    for (std::size_t k = 1; k < rows * cols; ++k) {
        if (v[k] < inf) {
            inf = v[k];
            arg = k;
        }
    }
    out.d1_inf = inf;
    out.d1_arg = {arg / cols, arg % cols};
    out.d1_pass = std::fabs(inf) <= tol.zero_tol;
    out.has_zero = out.d1_pass && inf == 0.0;

    out.zero_slices_pass = true;
    for (std::size_t i = 0; i < rows; ++i) {
        double row_min = v[i * cols];
        for (std::size_t j = 1; j < cols; ++j) {
            row_min = std::min(row_min, v[i * cols + j]);
        }
        if (std::fabs(row_min) > tol.zero_tol) {
            out.zero_slices_pass = false;
            break;
        }
    }

    if (check_d2) {
        if (!g.b().is_cartesian()) {
            out.d2_checked = false;
            out.d2_note = "B is not a cartesian grid; convexity in y was not checked";
        } else {
            const auto& axes = g.b().axes();
            std::vector<std::size_t> stride(axes.size(), 1);
            for (std::size_t t = axes.size(); t-- > 1;) {
                stride[t - 1] = stride[t] * axes[t].count;
            }
            double worst = 0.0;
            for (std::size_t i = 0; i < rows; ++i) {
                const double* row = v.data() + i * cols;
                for (std::size_t t = 0; t < axes.size(); ++t) {
                    if (axes[t].count < 3) continue;  // nothing to test
                    for (std::size_t j = 0; j < cols; ++j) {
                        std::size_t pos = (j / stride[t]) % axes[t].count;
                        if (pos + 2 >= axes[t].count) continue;
                        double lo = row[j];
                        double mid = row[j + stride[t]];
                        double hi = row[j + 2 * stride[t]];
                        double viol = 2.0 * mid - lo - hi;
                        if (viol > worst) worst = viol;
                    }
                }
            }
            out.d2_checked = true;
            out.d2_max_violation = worst;
            out.d2_pass = worst <= tol.convexity_tol;
            out.d2_note =
                "midpoint convexity along grid axes only; a finite sample "
                "cannot certify convexity or lower semicontinuity off the grid";
        }
    }

    return out;
}

}  // namespace gconj
