#pragma once

#include <compare>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace gconj {

/// A value in R u {+inf}. Minus infinity and NaN are unrepresentable; any
/// operation that would produce them throws instead. +inf compares greater
/// than every finite value, so the ordering is total.
class ExtendedValue {
public:
    /// Zero. Default construction keeps std::vector<ExtendedValue> usable.
    constexpr ExtendedValue() noexcept : v_(0.0) {}

    static ExtendedValue finite(double v) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument(
                "ExtendedValue::finite requires a finite double");
        }
        return ExtendedValue(v);
    }

    static constexpr ExtendedValue infinity() noexcept {
        return ExtendedValue(std::numeric_limits<double>::infinity());
    }

    bool is_finite() const noexcept { return std::isfinite(v_); }

    /// Finite payload; throws on +inf.
    double value() const {
        if (!is_finite()) {
            throw std::logic_error("ExtendedValue::value called on +inf");
        }
        return v_;
    }

    /// Underlying double; +inf for the infinite element. Safe for comparisons
    /// and formatting since NaN is excluded by construction.
    double raw() const noexcept { return v_; }

    friend auto operator<=>(const ExtendedValue&, const ExtendedValue&) = default;

    /// Addition; +inf absorbs. Overflow toward +inf saturates, overflow
    /// toward -inf is an error.
    friend ExtendedValue operator+(ExtendedValue a, ExtendedValue b) {
        double s = a.v_ + b.v_;
        if (s == -std::numeric_limits<double>::infinity()) {
            throw std::overflow_error("ExtendedValue addition overflowed to -inf");
        }
        return ExtendedValue(s);
    }

    friend ExtendedValue operator+(ExtendedValue a, double b) {
        return a + ExtendedValue::finite(b);
    }

private:
    constexpr explicit ExtendedValue(double v) noexcept : v_(v) {}

    double v_;
};

}  // namespace gconj
