#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gconj/errors.hpp"
#include "gconj/extended_value.hpp"
#include "gconj/point_set.hpp"
#include "gconj/tolerances.hpp"

namespace gconj {

/// A function known only through its values on a PointSet. Values live in
/// R u {+inf}; +inf marks points outside the effective domain. Immutable
/// after construction.
class SampledFunction {
public:
    SampledFunction(PointSet domain, std::vector<ExtendedValue> values,
                    std::string label = "f")
        : domain_(std::move(domain)),
          values_(std::move(values)),
          label_(std::move(label)) {
        if (values_.size() != domain_.size()) {
            throw std::invalid_argument(
                "value count does not match the domain size");
        }
    }

    const PointSet& domain() const noexcept { return domain_; }
    const std::vector<ExtendedValue>& values() const noexcept { return values_; }
    const std::string& label() const noexcept { return label_; }
    std::size_t size() const noexcept { return values_.size(); }

    ExtendedValue operator[](std::size_t i) const { return values_.at(i); }

    /// Finite somewhere.
    bool is_proper() const noexcept {
        for (const auto& v : values_) {
            if (v.is_finite()) return true;
        }
        return false;
    }

private:
    PointSet domain_;
    std::vector<ExtendedValue> values_;
    std::string label_;
};

struct Infimum {
    double value = 0.0;
    std::size_t arg_index = 0;
};

/// Minimum over the sample; ties resolve to the lowest index. Improper input
/// is an error rather than +inf so callers cannot silently propagate it.
inline Infimum infimum(const SampledFunction& f) {
    if (!f.is_proper()) {
        throw improper_function_error("infimum of '" + f.label() +
                                      "': no finite value on the sample");
    }
    Infimum best;
    bool found = false;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!f[i].is_finite()) continue;
        double v = f[i].value();
        if (!found || v < best.value) {
            best.value = v;
            best.arg_index = i;
            found = true;
        }
    }
    return best;
}

/// Uniform distance max_i |f_i - g_i| over points where both are finite.
/// Matching +inf entries contribute 0 (the functions agree there); a
/// one-sided +inf is an error since no finite distance describes it.
inline double sup_distance(const SampledFunction& f, const SampledFunction& g) {
    if (!(f.domain() == g.domain())) {
        throw std::invalid_argument("sup_distance requires identical domains");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const bool ff = f[i].is_finite();
        const bool gf = g[i].is_finite();
        if (ff != gf) {
            throw std::invalid_argument(
                "sup_distance: one-sided +inf at index " + std::to_string(i));
        }
        if (!ff) continue;
        double d = f[i].value() - g[i].value();
        if (d < 0.0) d = -d;
        if (d > worst) worst = d;
    }
    return worst;
}

/// Indices of points satisfying h_c(x) <= feasibility_tol for every
/// constraint sample h_c.
inline std::vector<std::size_t> feasible_indices(
    const PointSet& bounding, const std::vector<SampledFunction>& constraints,
    const ToleranceConfig& tol) {
    tol.validate();
    for (const auto& h : constraints) {
        if (!(h.domain() == bounding)) {
            throw std::invalid_argument(
                "constraint '" + h.label() + "' is not sampled on the bounding set");
        }
    }
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < bounding.size(); ++i) {
        bool ok = true;
        for (const auto& h : constraints) {
            if (!h[i].is_finite() || h[i].value() > tol.feasibility_tol) {
                ok = false;
                break;
            }
        }
        if (ok) keep.push_back(i);
    }
    return keep;
}

/// Subset of the bounding set where every constraint holds. An empty result
/// throws infeasible_error naming the constraint whose best value over the
/// bounding set is largest (the hardest one to satisfy).
inline PointSet restrict_to_feasible(const PointSet& bounding,
                                     const std::vector<SampledFunction>& constraints,
                                     const ToleranceConfig& tol) {
    auto keep = feasible_indices(bounding, constraints, tol);
    if (!keep.empty()) return bounding.subset(keep);

    std::size_t worst_c = 0;
    double worst_best = 0.0;
    bool have = false;
    for (std::size_t c = 0; c < constraints.size(); ++c) {
        const auto& h = constraints[c];
        double best = 0.0;
        bool finite = false;
        for (std::size_t i = 0; i < h.size(); ++i) {
            if (!h[i].is_finite()) continue;
            double v = h[i].value();
            if (!finite || v < best) {
                best = v;
                finite = true;
            }
        }
        if (!finite) {  // never satisfiable at all
            worst_c = c;
            have = true;
            break;
        }
        if (!have || best > worst_best) {
            worst_c = c;
            worst_best = best;
            have = true;
        }
    }
    throw infeasible_error("feasible set is empty; constraint " +
                               std::to_string(worst_c) + " ('" +
                               constraints[worst_c].label() +
                               "') is the most violated",
                           worst_c);
}

/// f + c pointwise; +inf stays +inf.
inline SampledFunction shifted(const SampledFunction& f, double c) {
    std::vector<ExtendedValue> values;
    values.reserve(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        values.push_back(f[i].is_finite() ? ExtendedValue::finite(f[i].value() + c)
                                          : ExtendedValue::infinity());
    }
    return SampledFunction(f.domain(), std::move(values), f.label());
}

}  // namespace gconj
