#pragma once

#include <stdexcept>
#include <string>

namespace urnflow {

enum class Errc {
    parse,
    validation,
    invalid_initial,
    overflow,
    not_successor,
    degenerate_pair,
    domain,
    left_domain,
    sparse_trajectory,
    not_regular_bipartite,
    not_balanced_bipartite,
    too_large,
    no_convergence,
    inconsistent_classification,
    degenerate_point,
    uniqueness_violation,
    io,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace urnflow
