#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gconj {

/// One axis of a uniform grid: count samples from lo to hi inclusive.
struct GridAxis {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;
};

/// A finite, duplicate-free, ordered set of points in R^n. Either an
/// axis-uniform cartesian grid (row-major order, last axis fastest) or an
/// explicit point list. Point order is part of the value: every downstream
/// reduction resolves ties toward the lowest index.
class PointSet {
public:
    static PointSet cartesian(std::vector<GridAxis> axes) {
        if (axes.empty()) {
            throw std::invalid_argument("cartesian grid needs at least one axis");
        }
        std::size_t total = 1;
        for (std::size_t a = 0; a < axes.size(); ++a) {
            const GridAxis& ax = axes[a];
            if (ax.count < 1) {
                throw std::invalid_argument("axis " + std::to_string(a) +
                                            ": count must be >= 1");
            }
            if (!std::isfinite(ax.lo) || !std::isfinite(ax.hi)) {
                throw std::invalid_argument("axis " + std::to_string(a) +
                                            ": bounds must be finite");
            }
            if (ax.count == 1) {
                if (ax.lo != ax.hi) {
                    throw std::invalid_argument("axis " + std::to_string(a) +
                                                ": count 1 requires lo == hi");
                }
            } else if (!(ax.lo < ax.hi)) {
                throw std::invalid_argument("axis " + std::to_string(a) +
                                            ": count > 1 requires lo < hi");
            }
            if (total > max_points() / ax.count) {
                throw std::invalid_argument("grid exceeds the point budget");
            }
            total *= ax.count;
        }

        PointSet ps;
        ps.dim_ = axes.size();
        ps.coords_.resize(total * ps.dim_);
        std::vector<std::size_t> idx(ps.dim_, 0);
        for (std::size_t p = 0; p < total; ++p) {
            for (std::size_t a = 0; a < ps.dim_; ++a) {
                ps.coords_[p * ps.dim_ + a] = axis_value(axes[a], idx[a]);
            }
            for (std::size_t a = ps.dim_; a-- > 0;) {  // last axis fastest
                if (++idx[a] < axes[a].count) break;
                idx[a] = 0;
            }
        }
        ps.axes_ = std::move(axes);
        return ps;
    }

    static PointSet explicit_points(std::size_t dimension, std::vector<double> coords) {
        if (dimension == 0) {
            throw std::invalid_argument("dimension must be >= 1");
        }
        if (coords.empty() || coords.size() % dimension != 0) {
            throw std::invalid_argument(
                "coordinate list must be a nonzero multiple of the dimension");
        }
        for (double c : coords) {
            if (!std::isfinite(c)) {
                throw std::invalid_argument("coordinates must be finite");
            }
        }
        PointSet ps;
        ps.dim_ = dimension;
        ps.coords_ = std::move(coords);
        ps.check_no_duplicates();
        return ps;
    }

    /// Exact value of grid node i on one axis. Endpoints are exact; for a
    /// symmetric range the midpoint lands exactly on the center value.
    static double axis_value(const GridAxis& ax, std::size_t i) {
        if (ax.count == 1) return ax.lo;
        const double n1 = static_cast<double>(ax.count - 1);
        return (ax.lo * static_cast<double>(ax.count - 1 - i) +
                ax.hi * static_cast<double>(i)) / n1;
    }

    std::size_t dimension() const noexcept { return dim_; }
    std::size_t size() const noexcept { return coords_.size() / dim_; }

    std::span<const double> point(std::size_t i) const {
        if (i >= size()) throw std::out_of_range("point index out of range");
        return std::span<const double>(coords_.data() + i * dim_, dim_);
    }

    const std::vector<double>& coords() const noexcept { return coords_; }

    bool is_cartesian() const noexcept { return axes_.has_value(); }

    const std::vector<GridAxis>& axes() const {
        if (!axes_) throw std::logic_error("point set is not a cartesian grid");
        return *axes_;
    }

    /// Index of the point with exactly these coordinates, if present.
    std::optional<std::size_t> find(std::span<const double> p) const {
        if (p.size() != dim_) return std::nullopt;
        for (std::size_t i = 0; i < size(); ++i) {
            if (std::equal(p.begin(), p.end(), coords_.begin() + static_cast<std::ptrdiff_t>(i * dim_))) {
                return i;
            }
        }
        return std::nullopt;
    }

    /// Explicit subset keeping the given order. Indices must be strictly
    /// increasing so the subset inherits the parent's ordering.
    PointSet subset(const std::vector<std::size_t>& indices) const {
        if (indices.empty()) {
            throw std::invalid_argument("subset must keep at least one point");
        }
        std::vector<double> coords;
        coords.reserve(indices.size() * dim_);
        std::size_t prev = 0;
        bool first = true;
        for (std::size_t i : indices) {
            if (i >= size()) throw std::out_of_range("subset index out of range");
            if (!first && i <= prev) {
                throw std::invalid_argument("subset indices must be strictly increasing");
            }
            first = false;
            prev = i;
            auto p = point(i);
            coords.insert(coords.end(), p.begin(), p.end());
        }
        PointSet ps;
        ps.dim_ = dim_;
        ps.coords_ = std::move(coords);
        return ps;
    }

    /// Same points in the same order; grid structure is not compared.
    friend bool operator==(const PointSet& a, const PointSet& b) {
        return a.dim_ == b.dim_ && a.coords_ == b.coords_;
    }

private:
    PointSet() = default;

    static constexpr std::size_t max_points() { return 50'000'000; }

    void check_no_duplicates() const {
        const std::size_t n = size();
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        auto less = [&](std::size_t a, std::size_t b) {
            return std::lexicographical_compare(
                coords_.begin() + static_cast<std::ptrdiff_t>(a * dim_),
                coords_.begin() + static_cast<std::ptrdiff_t>((a + 1) * dim_),
                coords_.begin() + static_cast<std::ptrdiff_t>(b * dim_),
                coords_.begin() + static_cast<std::ptrdiff_t>((b + 1) * dim_));
        };
        std::sort(order.begin(), order.end(), less);
        for (std::size_t i = 1; i < n; ++i) {
            if (!less(order[i - 1], order[i])) {
                throw std::invalid_argument(
                    "duplicate point at indices " + std::to_string(order[i - 1]) +
                    " and " + std::to_string(order[i]));
            }
        }
    }

    std::size_t dim_ = 0;
    std::vector<double> coords_;
    std::optional<std::vector<GridAxis>> axes_;
};

/// Uniform grid over the given axes; dimension must match the axis count.
inline PointSet build_grid(std::size_t dimension, std::vector<GridAxis> axes) {
    if (dimension != axes.size()) {
        throw std::invalid_argument("dimension does not match the axis list");
    }
    return PointSet::cartesian(std::move(axes));
}

/// Cartesian product: pairs ordered a-major, b fastest. The product of two
/// grids is again a grid with the axes concatenated.
inline PointSet product(const PointSet& a, const PointSet& b) {
    if (a.is_cartesian() && b.is_cartesian()) {
        std::vector<GridAxis> axes = a.axes();
        const auto& rest = b.axes();
        axes.insert(axes.end(), rest.begin(), rest.end());
        return PointSet::cartesian(std::move(axes));
    }
    const std::size_t dim = a.dimension() + b.dimension();
    std::vector<double> coords;
    coords.reserve(a.size() * b.size() * dim);
    for (std::size_t i = 0; i < a.size(); ++i) {
        auto pa = a.point(i);
        for (std::size_t j = 0; j < b.size(); ++j) {
            auto pb = b.point(j);
            coords.insert(coords.end(), pa.begin(), pa.end());
            coords.insert(coords.end(), pb.begin(), pb.end());
        }
    }
    return PointSet::explicit_points(dim, std::move(coords));
}

}  // namespace gconj
