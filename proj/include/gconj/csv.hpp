#pragma once

#include <charconv>
#include <cstddef>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "gconj/extended_value.hpp"
#include "gconj/sampled_function.hpp"

namespace gconj {

/// Shortest decimal form that parses back to the same double. All file and
/// report output goes through here so results are byte-stable.
inline std::string format_double(double v) {
    if (v == std::numeric_limits<double>::infinity()) return "inf";
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string format_value(ExtendedValue v) {
    return v.is_finite() ? format_double(v.value()) : "inf";
}

/// Strict double parser; accepts "inf" for +infinity. Returns false on any
/// trailing garbage.
inline bool parse_double(std::string_view s, double& out) {
    if (s == "inf") {
        out = std::numeric_limits<double>::infinity();
        return true;
    }
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

/// Splits on commas and trims surrounding spaces; numeric CSVs here carry
/// no quoting or escapes.
inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        std::size_t comma = line.find(',', start);
        std::string_view field = (comma == std::string_view::npos)
                                     ? line.substr(start)
                                     : line.substr(start, comma - start);
        while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) {
            field.remove_prefix(1);
        }
        while (!field.empty() && (field.back() == ' ' || field.back() == '\t' ||
                                  field.back() == '\r')) {
            field.remove_suffix(1);
        }
        out.push_back(field);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

namespace detail {

inline void write_point_header(std::ostream& os, std::string_view prefix,
                               std::size_t dim) {
    for (std::size_t d = 0; d < dim; ++d) {
        if (d) os << ',';
        os << prefix << '_' << (d + 1);
    }
}

inline void write_point_row(std::ostream& os, std::span<const double> p) {
    for (std::size_t d = 0; d < p.size(); ++d) {
        if (d) os << ',';
        os << format_double(p[d]);
    }
}

}  // namespace detail

/// Header y_1..y_m,f_g then one row per dual point.
inline void write_conjugate_csv(std::ostream& os, const SampledFunction& f_g) {
    detail::write_point_header(os, "y", f_g.domain().dimension());
    os << ",f_g\n";
    for (std::size_t j = 0; j < f_g.size(); ++j) {
        detail::write_point_row(os, f_g.domain().point(j));
        os << ',' << format_value(f_g[j]) << '\n';
    }
}

/// Header x_1..x_n,f,f_gg then one row per primal point.
inline void write_biconjugate_csv(std::ostream& os, const SampledFunction& f,
                                  const SampledFunction& f_gg) {
    if (!(f.domain() == f_gg.domain())) {
        throw std::invalid_argument("f and f^gg must share a domain");
    }
    detail::write_point_header(os, "x", f.domain().dimension());
    os << ",f,f_gg\n";
    for (std::size_t i = 0; i < f.size(); ++i) {
        detail::write_point_row(os, f.domain().point(i));
        os << ',' << format_value(f[i]) << ',' << format_value(f_gg[i]) << '\n';
    }
}

/// Header x_1..x_d,gap then one row per point.
inline void write_gap_csv(std::ostream& os, const SampledFunction& gap) {
    detail::write_point_header(os, "x", gap.domain().dimension());
    os << ",gap\n";
    for (std::size_t i = 0; i < gap.size(); ++i) {
        detail::write_point_row(os, gap.domain().point(i));
        os << ',' << format_value(gap[i]) << '\n';
    }
}

}  // namespace gconj
