#include "coopreg/numeric_policy.hpp"

#include <cstdlib>
#include <string>

namespace coopreg {

namespace {

NumericPolicy make_global() {
    NumericPolicy p;
    if (const char* env = std::getenv("COOPREG_TOL_SCALE")) {
        try {
            const double scale = std::stod(env);
            if (scale > 0.0) {
                p.lyapunov_residual_tol *= scale;
                p.care_residual_tol *= scale;
                p.regulator_residual_tol *= scale;
                p.pd_tol *= scale;
            }
        } catch (const std::exception&) {
            // Unparseable values are ignored; defaults stay in force.
        }
    }
    return p;
}

} // namespace

const NumericPolicy& NumericPolicy::global() {
    static const NumericPolicy policy = make_global();
    return policy;
}

} // namespace coopreg
