#include "coopreg/agents.hpp"

namespace coopreg::agents {

Eigen::VectorXd exosystem_deriv(const Eigen::MatrixXd& s, const Eigen::VectorXd& v) {
    return s * v;
}

Eigen::VectorXd informed_observer_deriv(const Eigen::VectorXd& xi, const Eigen::VectorXd& y_v,
                                        const Eigen::MatrixXd& l, const Eigen::MatrixXd& s,
                                        const Eigen::MatrixXd& f) {
    return s * xi + l * (f * xi - y_v);
}

AdaptiveObserverDeriv adaptive_observer_deriv(const Eigen::MatrixXd& s, const Eigen::MatrixXd& p,
                                              const Eigen::MatrixXd& gamma,
                                              const Eigen::VectorXd& adjacency_row,
                                              const std::vector<Eigen::VectorXd>& estimates,
                                              int agent_index, double d_i) {
    const Eigen::VectorXd& xi_i = estimates[static_cast<std::size_t>(agent_index)];
    Eigen::VectorXd zeta = Eigen::VectorXd::Zero(xi_i.size());
    for (Eigen::Index j = 0; j < adjacency_row.size(); ++j) {
        const double w = adjacency_row(j);
        if (w != 0.0) zeta.noalias() += w * (xi_i - estimates[static_cast<std::size_t>(j)]);
    }
    const double quad = zeta.dot(p * zeta);
    const double rho = (1.0 + quad) * (1.0 + quad) * (1.0 + quad);

    AdaptiveObserverDeriv out;
    out.dxi = s * xi_i - (d_i * rho) * zeta;
    out.dd = zeta.dot(gamma * zeta);
    return out;
}

OutputObserverDeriv output_observer_deriv(const Eigen::MatrixXd& s, const Eigen::MatrixXd& f,
                                          const Eigen::MatrixXd& j,
                                          const Eigen::VectorXd& adjacency_row,
                                          const std::vector<Eigen::VectorXd>& virtual_outputs,
                                          const Eigen::VectorXd& xi_i, int agent_index,
                                          double c_i, double tau_i) {
    const Eigen::VectorXd& mu_i = virtual_outputs[static_cast<std::size_t>(agent_index)];
    Eigen::VectorXd w = Eigen::VectorXd::Zero(f.rows());
    for (Eigen::Index k = 0; k < adjacency_row.size(); ++k) {
        const double a = adjacency_row(k);
        if (a != 0.0) w.noalias() += a * (mu_i - virtual_outputs[static_cast<std::size_t>(k)]);
    }

    OutputObserverDeriv out;
    out.dxi = s * xi_i + c_i * (j * w);
    out.dc = tau_i * w.squaredNorm();
    return out;
}

Eigen::VectorXd static_control(const Eigen::VectorXd& x, const Eigen::VectorXd& xi,
                               const Eigen::MatrixXd& k1, const Eigen::MatrixXd& k2) {
    return k1 * x + k2 * xi;
}

DynamicStateControl dynamic_state_control(const Eigen::VectorXd& x, const Eigen::VectorXd& z,
                                          const Eigen::VectorXd& xi, const Eigen::MatrixXd& kx,
                                          const Eigen::MatrixXd& kz, const Eigen::MatrixXd& g1,
                                          const Eigen::MatrixXd& g2, const Eigen::MatrixXd& c,
                                          const Eigen::MatrixXd& d) {
    DynamicStateControl out;
    out.u = kx * x + kz * z;
    out.dz = g1 * z + g2 * (c * x + d * xi);
    return out;
}

OutputFeedbackControl output_feedback_control(const Eigen::VectorXd& measurement,
                                              const Eigen::VectorXd& z,
                                              const Eigen::MatrixXd& k,
                                              const Eigen::MatrixXd& p1,
                                              const Eigen::MatrixXd& p2) {
    OutputFeedbackControl out;
    out.u = k * z;
    out.dz = p1 * z + p2 * measurement;
    return out;
}

} // namespace coopreg::agents
