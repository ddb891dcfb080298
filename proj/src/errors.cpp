#include "coopreg/errors.hpp"

namespace coopreg {

const char* errc_name(Errc code) {
    switch (code) {
        case Errc::self_loop: return "SelfLoop";
        case Errc::edge_into_informed: return "EdgeIntoInformed";
        case Errc::index_out_of_range: return "IndexOutOfRange";
        case Errc::invalid_graph: return "InvalidGraph";
        case Errc::singular_l1: return "SingularL1";
        case Errc::non_positive_scaling: return "NonPositiveScaling";
        case Errc::singular_operator: return "SingularOperator";
        case Errc::not_stabilizable: return "NotStabilizable";
        case Errc::not_detectable: return "NotDetectable";
        case Errc::not_observable: return "NotObservable";
        case Errc::no_convergence: return "NoConvergence";
        case Errc::no_solution: return "NoSolution";
        case Errc::certification_failed: return "CertificationFailed";
        case Errc::incompatible_kinds: return "IncompatibleKinds";
        case Errc::invalid_scenario: return "InvalidScenario";
        case Errc::diverged: return "Diverged";
        case Errc::non_finite: return "NonFinite";
        case Errc::parse_error: return "ParseError";
        case Errc::io_error: return "IoError";
    }
    return "UnknownError";
}

int errc_exit_code(Errc code) {
    switch (code) {
        case Errc::self_loop:
        case Errc::edge_into_informed:
        case Errc::index_out_of_range:
        case Errc::invalid_graph:
        case Errc::singular_l1:
        case Errc::not_stabilizable:
        case Errc::not_detectable:
        case Errc::not_observable:
        case Errc::no_solution:
        case Errc::incompatible_kinds:
        case Errc::invalid_scenario:
        case Errc::parse_error:
            return 1;
        case Errc::non_positive_scaling:
        case Errc::singular_operator:
        case Errc::no_convergence:
        case Errc::certification_failed:
        case Errc::diverged:
        case Errc::non_finite:
            return 2;
        case Errc::io_error:
            return 3;
    }
    return 2;
}

} // namespace coopreg
