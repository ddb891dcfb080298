#pragma once

#include <Eigen/Dense>

#include "coopreg/errors.hpp"
#include "coopreg/numeric_policy.hpp"

namespace coopreg::linalg {

// Continuous algebraic Riccati problem
//   a'P + Pa + q - P b r^-1 b' P = 0
struct CareProblem {
    Eigen::MatrixXd a; // n x n
    Eigen::MatrixXd b; // n x m
    Eigen::MatrixXd q; // n x n, symmetric PSD
    Eigen::MatrixXd r; // m x m, symmetric PD
};

// Solves a'X + Xa + q = 0 by a dense vectorized (Kronecker) linear solve.
// Throws SingularOperator when a has an eigenvalue pair summing to zero.
// The result is symmetrized when q is symmetric.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q);

// Solves aX + Xb = c for rectangular c (a: n x n, b: m x m, c: n x m).
// Requires the spectra of a and -b to be disjoint.
Eigen::MatrixXd solve_sylvester(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                const Eigen::MatrixXd& c);

// Unique symmetric stabilizing solution P >= 0 of the CARE, computed by
// Newton-Kleinman iteration (one Lyapunov solve per step) seeded with a
// stabilizing gain from Bass's pole-shifting construction. The closed loop
// a - b r^-1 b' P is certified Hurwitz before returning.
Eigen::MatrixXd solve_care(const CareProblem& p);

// True iff a'X + Xa + I = 0 is solvable with X positive definite
// (Cholesky check with the policy tolerance). Degeneracies map to false.
bool is_hurwitz(const Eigen::MatrixXd& a);

// Monic characteristic polynomial coefficients [c_0, ..., c_{n-1}, 1] of
// det(lambda I - a), by the Faddeev-LeVerrier recurrence.
Eigen::VectorXd char_poly(const Eigen::MatrixXd& a);

// Stabilizing state feedback: K with a + bK Hurwitz, K = -r^-1 b'P for the
// CARE with q = r = I. Throws NotStabilizable when no certificate is found.
Eigen::MatrixXd stabilizing_gain(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// PBH rank tests (complex arithmetic, rank-revealing QR).
bool is_stabilizable(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
bool is_detectable(const Eigen::MatrixXd& a, const Eigen::MatrixXd& c);
bool is_observable(const Eigen::MatrixXd& a, const Eigen::MatrixXd& c);

} // namespace coopreg::linalg
