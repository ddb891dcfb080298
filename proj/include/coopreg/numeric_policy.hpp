#pragma once

namespace coopreg {

// Central tolerance record shared by all numeric kernels. The environment
// variable COOPREG_TOL_SCALE (a positive factor) scales every residual and
// definiteness tolerance uniformly; iteration limits are unaffected.
struct NumericPolicy {
    double lyapunov_residual_tol = 1e-10; // Lyapunov/Sylvester residual bound
    double care_residual_tol = 1e-9;      // Riccati residual bound
    double regulator_residual_tol = 1e-9; // regulator-equation residual bound
    double pd_tol = 1e-10;                // Cholesky positive-definiteness margin
    int newton_max_iters = 100;
    double newton_rel_step = 1e-12;       // relative step convergence threshold

    // Process-wide policy with the env scaling applied once at first use.
    static const NumericPolicy& global();
};

} // namespace coopreg
