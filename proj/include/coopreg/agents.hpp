#pragma once

#include <Eigen/Dense>

#include <vector>

namespace coopreg::agents {

// All evaluators are pure functions of their arguments; the integrator owns
// every piece of state.

// dv = s v
Eigen::VectorXd exosystem_deriv(const Eigen::MatrixXd& s, const Eigen::VectorXd& v);

// Informed follower estimate: dxi = s xi + l (f xi - y_v)
Eigen::VectorXd informed_observer_deriv(const Eigen::VectorXd& xi, const Eigen::VectorXd& y_v,
                                        const Eigen::MatrixXd& l, const Eigen::MatrixXd& s,
                                        const Eigen::MatrixXd& f);

// Uninformed follower estimate with self-tuned coupling gain:
//   zeta = sum_j a_ij (xi_i - xi_j)
//   rho  = (1 + zeta' p zeta)^3
//   dxi  = s xi_i - d_i rho zeta
//   dd   = zeta' gamma zeta
struct AdaptiveObserverDeriv {
    Eigen::VectorXd dxi;
    double dd = 0.0;
};

AdaptiveObserverDeriv adaptive_observer_deriv(const Eigen::MatrixXd& s, const Eigen::MatrixXd& p,
                                              const Eigen::MatrixXd& gamma,
                                              const Eigen::VectorXd& adjacency_row,
                                              const std::vector<Eigen::VectorXd>& estimates,
                                              int agent_index, double d_i);

// Output-based uninformed estimate: neighbors exchange virtual outputs
// mu = f xi only.
//   w   = sum_j a_ij (mu_i - mu_j)
//   dxi = s xi_i + c_i j w
//   dc  = tau_i w' w
struct OutputObserverDeriv {
    Eigen::VectorXd dxi;
    double dc = 0.0;
};

OutputObserverDeriv output_observer_deriv(const Eigen::MatrixXd& s, const Eigen::MatrixXd& f,
                                          const Eigen::MatrixXd& j,
                                          const Eigen::VectorXd& adjacency_row,
                                          const std::vector<Eigen::VectorXd>& virtual_outputs,
                                          const Eigen::VectorXd& xi_i, int agent_index,
                                          double c_i, double tau_i);

// u = k1 x + k2 xi
Eigen::VectorXd static_control(const Eigen::VectorXd& x, const Eigen::VectorXd& xi,
                               const Eigen::MatrixXd& k1, const Eigen::MatrixXd& k2);

// u = kx x + kz z,  dz = g1 z + g2 (c x + d xi)
struct DynamicStateControl {
    Eigen::VectorXd u;
    Eigen::VectorXd dz;
};

DynamicStateControl dynamic_state_control(const Eigen::VectorXd& x, const Eigen::VectorXd& z,
                                          const Eigen::VectorXd& xi, const Eigen::MatrixXd& kx,
                                          const Eigen::MatrixXd& kz, const Eigen::MatrixXd& g1,
                                          const Eigen::MatrixXd& g2, const Eigen::MatrixXd& c,
                                          const Eigen::MatrixXd& d);

// u = k z,  dz = p1 z + p2 * measurement,  measurement = c x + d xi
struct OutputFeedbackControl {
    Eigen::VectorXd u;
    Eigen::VectorXd dz;
};

OutputFeedbackControl output_feedback_control(const Eigen::VectorXd& measurement,
                                              const Eigen::VectorXd& z,
                                              const Eigen::MatrixXd& k,
                                              const Eigen::MatrixXd& p1,
                                              const Eigen::MatrixXd& p2);

} // namespace coopreg::agents
