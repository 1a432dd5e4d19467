#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gconj {

/// Expression text could not be parsed; `offset` is the 0-based character
/// position of the failure.
class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " (offset " + std::to_string(offset) + ")"),
          offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Expression evaluation failed (unbound variable or domain violation).
class eval_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A function that must be proper (finite somewhere) is identically +infinity.
class improper_function_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The feasible set came out empty; `constraint_index` names the constraint
/// whose best value over the bounding set was worst.
class infeasible_error : public std::runtime_error {
public:
    infeasible_error(const std::string& what, std::size_t constraint_index)
        : std::runtime_error(what), constraint_index_(constraint_index) {}

    std::size_t constraint_index() const noexcept { return constraint_index_; }

private:
    std::size_t constraint_index_;
};

/// Problem-spec file error; `line` is 1-based.
class spec_error : public std::runtime_error {
public:
    spec_error(const std::string& what, int line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what),
          line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

}  // namespace gconj
