#pragma once

#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gconj/csv.hpp"
#include "gconj/errors.hpp"
#include "gconj/expr.hpp"
#include "gconj/parallel.hpp"
#include "gconj/point_set.hpp"
#include "gconj/sampled_function.hpp"
#include "gconj/tolerances.hpp"

namespace gconj {

/// Finite sample of an operator graph: pairs (y_i, v_i) with v_i a value of
/// the operator at y_i. Stored as two parallel flat coordinate arrays.
class OperatorGraphSample {
public:
    OperatorGraphSample(std::size_t dimension, std::vector<double> ys,
                        std::vector<double> vs)
        : dim_(dimension), ys_(std::move(ys)), vs_(std::move(vs)) {
        if (dim_ == 0) throw std::invalid_argument("dimension must be >= 1");
        if (ys_.empty() || ys_.size() != vs_.size() || ys_.size() % dim_ != 0) {
            throw std::invalid_argument("operator graph sample shape mismatch");
        }
        for (double c : ys_) {
            if (!std::isfinite(c)) throw std::invalid_argument("non-finite y coordinate");
        }
        for (double c : vs_) {
            if (!std::isfinite(c)) throw std::invalid_argument("non-finite v coordinate");
        }
    }

    std::size_t dimension() const noexcept { return dim_; }
    std::size_t size() const noexcept { return ys_.size() / dim_; }

    std::span<const double> y(std::size_t i) const {
        if (i >= size()) throw std::out_of_range("graph index out of range");
        return std::span<const double>(ys_.data() + i * dim_, dim_);
    }

    std::span<const double> v(std::size_t i) const {
        if (i >= size()) throw std::out_of_range("graph index out of range");
        return std::span<const double>(vs_.data() + i * dim_, dim_);
    }

    /// Reads "y_1..y_n,v_1..v_n" rows. The dimension comes from the header.
    static OperatorGraphSample read_csv(std::istream& in) {
        std::string line;
        if (!std::getline(in, line)) {
            throw std::invalid_argument("operator graph CSV is empty");
        }
        auto header = split_csv(line);
        if (header.size() < 2 || header.size() % 2 != 0) {
            throw std::invalid_argument("operator graph CSV needs y and v columns");
        }
        const std::size_t dim = header.size() / 2;
        for (std::size_t d = 0; d < dim; ++d) {
            std::string want_y = "y_" + std::to_string(d + 1);
            std::string want_v = "v_" + std::to_string(d + 1);
            if (header[d] != want_y || header[dim + d] != want_v) {
                throw std::invalid_argument(
                    "operator graph CSV header must read y_1..y_n,v_1..v_n");
            }
        }
        std::vector<double> ys;
        std::vector<double> vs;
        int line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty() || line == "\r") continue;
            auto fields = split_csv(line);
            if (fields.size() != 2 * dim) {
                throw std::invalid_argument("operator graph CSV line " +
                                            std::to_string(line_no) +
                                            ": wrong column count");
            }
            for (std::size_t d = 0; d < 2 * dim; ++d) {
                double v = 0.0;
                if (!parse_double(fields[d], v) || !std::isfinite(v)) {
                    throw std::invalid_argument("operator graph CSV line " +
                                                std::to_string(line_no) +
                                                ": bad number '" +
                                                std::string(fields[d]) + "'");
                }
                (d < dim ? ys : vs).push_back(v);
            }
        }
        return OperatorGraphSample(dim, std::move(ys), std::move(vs));
    }

    void write_csv(std::ostream& os) const {
        detail::write_point_header(os, "y", dim_);
        os << ',';
        detail::write_point_header(os, "v", dim_);
        os << '\n';
        for (std::size_t i = 0; i < size(); ++i) {
            detail::write_point_row(os, y(i));
            os << ',';
            detail::write_point_row(os, v(i));
            os << '\n';
        }
    }

private:
    std::size_t dim_;
    std::vector<double> ys_;
    std::vector<double> vs_;
};

/// Worst monotonicity violation over sample pairs:
/// max over pairs of -<v_i - v_j, y_i - y_j>, clamped below at zero.
/// Zero means the sample is consistent with a monotone operator.
struct MonotoneCertificate {
    double max_violation = 0.0;
    std::pair<std::size_t, std::size_t> worst_pair{0, 0};
};

inline MonotoneCertificate check_monotone(const OperatorGraphSample& graph) {
    const std::size_t n = graph.size();
    if (n < 2) {
        throw std::invalid_argument("check_monotone needs at least two pairs");
    }
    MonotoneCertificate cert;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        auto yi = graph.y(i);
        auto vi = graph.v(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            auto yj = graph.y(j);
            auto vj = graph.v(j);
            double dot = 0.0;
            for (std::size_t d = 0; d < yi.size(); ++d) {
                dot += (vi[d] - vj[d]) * (yi[d] - yj[d]);
            }
            if (-dot > worst) {
                worst = -dot;
                cert.worst_pair = {i, j};
            }
        }
    }
    cert.max_violation = std::max(0.0, worst);
    return cert;
}

/// VIP gap h(x) = max over pairs of <v, x - y>. Nonnegative whenever x is
/// one of the sampled base points y_i (that pair contributes exactly zero);
/// elsewhere a finite sample can dip below zero, which the caller should
/// treat as "no certificate", not as a solved point.
inline SampledFunction vip_gap(const OperatorGraphSample& graph, const PointSet& x_grid) {
    if (x_grid.dimension() != graph.dimension()) {
        throw std::invalid_argument("x grid dimension must match the graph");
    }
    const std::size_t n = graph.size();
    std::vector<ExtendedValue> values(x_grid.size());
    parallel::for_range(x_grid.size(), [&](std::size_t ix) {
        auto x = x_grid.point(ix);
        double best = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            auto y = graph.y(p);
            auto v = graph.v(p);
            double dot = 0.0;
            for (std::size_t d = 0; d < x.size(); ++d) dot += v[d] * (x[d] - y[d]);
            if (p == 0 || dot > best) best = dot;
        }
        values[ix] = ExtendedValue::finite(best);
    });
    return SampledFunction(x_grid, std::move(values), "h");
}

/// f(x_i, y_j) sampled over K x K, row-major by x.
class BifunctionSample {
public:
    BifunctionSample(PointSet k, std::vector<double> values)
        : k_(std::move(k)), values_(std::move(values)) {
        if (values_.size() != k_.size() * k_.size()) {
            throw std::invalid_argument("bifunction matrix must be |K| x |K|");
        }
        for (double v : values_) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("bifunction values must be finite");
            }
        }
    }

    const PointSet& k() const noexcept { return k_; }
    std::size_t size() const noexcept { return k_.size(); }

    double at(std::size_t i, std::size_t j) const {
        if (i >= size() || j >= size()) {
            throw std::out_of_range("bifunction index out of range");
        }
        return values_[i * size() + j];
    }

    const std::vector<double>& values() const noexcept { return values_; }

private:
    PointSet k_;
    std::vector<double> values_;
};

/// Samples an expression f(x, y) over K x K.
inline BifunctionSample sample_bifunction(const Expression& e, const PointSet& k) {
    if (e.max_index('x') > k.dimension() || e.max_index('y') > k.dimension()) {
        throw std::invalid_argument("bifunction uses variables beyond dim K");
    }
    const std::size_t n = k.size();
    std::vector<double> values(n * n);
    std::vector<std::optional<std::string>> errors(n);
    parallel::for_range(n, [&](std::size_t i) {
        Bindings b;
        b.x = k.point(i);
        for (std::size_t j = 0; j < n; ++j) {
            b.y = k.point(j);
            try {
                ExtendedValue v = e.evaluate(b);
                if (!v.is_finite()) throw eval_error("bifunction overflowed to +inf");
                values[i * n + j] = v.value();
            } catch (const eval_error& err) {
                errors[i] = "at y index " + std::to_string(j) + ": " + err.what();
                return;
            }
        }
    });
    for (std::size_t i = 0; i < n; ++i) {
        if (errors[i]) {
            throw eval_error("at x index " + std::to_string(i) + ", " + *errors[i]);
        }
    }
    return BifunctionSample(k, std::move(values));
}

/// EP gap g_f(y) = max over x in K of f(x, y), sampled on K. Solutions of
/// the equilibrium problem on the sample are the y where this is zero at
/// tolerance.
inline SampledFunction ep_gap(const BifunctionSample& bf) {
    const std::size_t n = bf.size();
    std::vector<ExtendedValue> values(n);
    parallel::for_range(n, [&](std::size_t j) {
        double best = bf.at(0, j);
        for (std::size_t i = 1; i < n; ++i) {
            double v = bf.at(i, j);
            if (v > best) best = v;
        }
        values[j] = ExtendedValue::finite(best);
    });
    return SampledFunction(bf.k(), std::move(values), "g_f");
}

/// Equilibrium-problem assumptions checkable on a finite sample: zero
/// diagonal and midpoint convexity of f(x, .) along grid axes. Upper
/// semicontinuity in x has no finite-sample content; the note says so.
struct EpAssumptions {
    bool diag_zero = false;
    double diag_max_abs = 0.0;
    bool convexity_checked = false;
    bool convex_in_y = false;
    double convexity_violation = 0.0;
    std::string usc_in_x_note;
};

inline EpAssumptions check_ep_assumptions(const BifunctionSample& bf,
                                          const ToleranceConfig& tol) {
    tol.validate();
    EpAssumptions out;
    const std::size_t n = bf.size();

    double diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        diag = std::max(diag, std::fabs(bf.at(i, i)));
    }
    out.diag_max_abs = diag;
    out.diag_zero = diag <= tol.zero_tol;

    if (bf.k().is_cartesian()) {
        const auto& axes = bf.k().axes();
        std::vector<std::size_t> stride(axes.size(), 1);
        for (std::size_t t = axes.size(); t-- > 1;) {
            stride[t - 1] = stride[t] * axes[t].count;
        }
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t t = 0; t < axes.size(); ++t) {
                if (axes[t].count < 3) continue;
                for (std::size_t j = 0; j < n; ++j) {
                    std::size_t pos = (j / stride[t]) % axes[t].count;
                    if (pos + 2 >= axes[t].count) continue;
                    double viol = 2.0 * bf.at(i, j + stride[t]) - bf.at(i, j) -
                                  bf.at(i, j + 2 * stride[t]);
                    if (viol > worst) worst = viol;
                }
            }
        }
        out.convexity_checked = true;
        out.convexity_violation = worst;
        out.convex_in_y = worst <= tol.convexity_tol;
    } else {
        out.usc_in_x_note = "K is not a cartesian grid; ";
    }
    out.usc_in_x_note +=
        "upper semicontinuity in x is vacuous on a finite sample and was not checked";
    return out;
}

/// Zero-detection solver: indices of all points where the gap function is
/// at most zero_tol, in sample order. Exhaustive by design; grids at desk
/// scale do not need descent methods.
inline std::vector<std::size_t> gap_minimize(const SampledFunction& gap,
                                             const ToleranceConfig& tol) {
    tol.validate();
    if (!gap.is_proper()) {
        throw improper_function_error("gap_minimize: gap is +inf everywhere");
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < gap.size(); ++i) {
        if (gap[i].is_finite() && gap[i].value() <= tol.zero_tol) {
            out.push_back(i);
        }
    }
    return out;
}

}  // namespace gconj
