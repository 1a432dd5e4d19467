#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gconj/errors.hpp"
#include "gconj/expr.hpp"
#include "gconj/parallel.hpp"
#include "gconj/point_set.hpp"
#include "gconj/sampled_function.hpp"

namespace gconj {

namespace detail {

/// Evaluates fn(i) -> ExtendedValue for every point index in parallel.
/// Per-point eval failures are collected and the one with the lowest index
/// is rethrown, so the reported error does not depend on the thread count.
template <class Fn>
inline std::vector<ExtendedValue> fill_values(std::size_t n, Fn&& fn) {
    std::vector<ExtendedValue> values(n);
    std::vector<std::optional<std::string>> errors(n);
    parallel::for_range(n, [&](std::size_t i) {
        try {
            values[i] = fn(i);
        } catch (const eval_error& e) {
            errors[i] = e.what();
        }
    });
    for (std::size_t i = 0; i < n; ++i) {
        if (errors[i]) {
            throw eval_error("at point " + std::to_string(i) + ": " + *errors[i]);
        }
    }
    return values;
}

}  // namespace detail

/// Samples an expression over a point set, binding each point to one
/// variable block. `w` supplies fixed parameter values, if any.
inline SampledFunction sample_expression(const Expression& e, const PointSet& domain,
                                         char block = 'x',
                                         std::span<const double> w = {},
                                         std::string label = "f") {
    auto values = detail::fill_values(domain.size(), [&](std::size_t i) {
        Bindings b;
        b.w = w;
        switch (block) {
            case 'x': b.x = domain.point(i); break;
            case 'y': b.y = domain.point(i); break;
            case 'u': b.u = domain.point(i); break;
            default: b.w = domain.point(i); break;
        }
        return e.evaluate(b);
    });
    return SampledFunction(domain, std::move(values), std::move(label));
}

/// Samples an expression over a product-structured point set whose first
/// `first_dim` coordinates bind to `first_block` and the rest to
/// `second_block`.
inline SampledFunction sample_split(const Expression& e, const PointSet& domain,
                                    char first_block, std::size_t first_dim,
                                    char second_block,
                                    std::span<const double> w = {},
                                    std::string label = "f") {
    if (first_dim == 0 || first_dim >= domain.dimension()) {
        throw std::invalid_argument("split position must cut the dimension in two");
    }
    auto values = detail::fill_values(domain.size(), [&](std::size_t i) {
        auto p = domain.point(i);
        auto first = p.subspan(0, first_dim);
        auto second = p.subspan(first_dim);
        Bindings b;
        b.w = w;
        auto bind = [&](char blk, std::span<const double> s) {
            switch (blk) {
                case 'x': b.x = s; break;
                case 'y': b.y = s; break;
                case 'u': b.u = s; break;
                default: b.w = s; break;
            }
        };
        bind(first_block, first);
        bind(second_block, second);
        return e.evaluate(b);
    });
    return SampledFunction(domain, std::move(values), std::move(label));
}

}  // namespace gconj
