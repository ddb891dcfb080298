#pragma once

#include <stdexcept>
#include <string>

namespace coopreg {

// Error codes carried by every coopreg::Error. The CLI maps each code to a
// stable process exit code: 1 validation, 2 numerical, 3 I/O.
enum class Errc {
    // graph construction / validation
    self_loop,
    edge_into_informed,
    index_out_of_range,
    invalid_graph,
    singular_l1,
    non_positive_scaling,
    // linear-algebra kernels
    singular_operator,
    not_stabilizable,
    not_detectable,
    not_observable,
    no_convergence,
    no_solution,
    certification_failed,
    // scenario / simulation
    incompatible_kinds,
    invalid_scenario,
    diverged,
    non_finite,
    parse_error,
    io_error,
};

const char* errc_name(Errc code);

// 1 = validation failure, 2 = numerical failure, 3 = I/O failure.
int errc_exit_code(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    Errc code() const { return code_; }
    int exit_code() const { return errc_exit_code(code_); }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) {
    throw Error(code, std::string(errc_name(code)) + ": " + what);
}

} // namespace coopreg
