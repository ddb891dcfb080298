#pragma once

#include <Eigen/Dense>

#include "coopreg/errors.hpp"

namespace coopreg {

// Per-agent LTI subsystem
//   dx = A x + B u + E v,   e = C x + D v
// split into nominal matrices and additive uncertainties (default zero).
// Gain synthesis reads only the nominal part; simulation applies nominal
// plus delta.
struct LtiSubsystem {
    Eigen::MatrixXd a_nom; // n x n
    Eigen::MatrixXd b_nom; // n x m
    Eigen::MatrixXd c_nom; // p x n
    Eigen::MatrixXd d_nom; // p x q
    Eigen::MatrixXd e_nom; // n x q

    Eigen::MatrixXd delta_a, delta_b, delta_c, delta_d, delta_e;

    int n() const { return static_cast<int>(a_nom.rows()); }
    int m() const { return static_cast<int>(b_nom.cols()); }
    int p() const { return static_cast<int>(c_nom.rows()); }

    Eigen::MatrixXd a() const { return a_nom + delta_a; }
    Eigen::MatrixXd b() const { return b_nom + delta_b; }
    Eigen::MatrixXd c() const { return c_nom + delta_c; }
    Eigen::MatrixXd d() const { return d_nom + delta_d; }
    Eigen::MatrixXd e() const { return e_nom + delta_e; }

    // Fills absent delta blocks with zeros and checks shape consistency
    // against the exosystem order q.
    void finalize(int q);
};

// Exogenous generator  dv = S v,  y_v = F v,  with initial state v0.
struct Exosystem {
    Eigen::MatrixXd s;  // q x q
    Eigen::MatrixXd f;  // l x q
    Eigen::VectorXd v0; // length q

    int q() const { return static_cast<int>(s.rows()); }
    int l() const { return static_cast<int>(f.rows()); }

    void validate() const;
};

} // namespace coopreg
