#pragma once

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

#include "coopreg/linalg.hpp"
#include "coopreg/model.hpp"
#include "coopreg/scenario.hpp"

namespace coopreg::synthesis {

// Aggregated model assumptions (the graph-side checks live in coopreg::graph):
//   a2: the exogenous generator has no decaying modes (advisory only),
//   a3: every (A_i, B_i) is stabilizable,
//   a4: (S, F) is detectable,
//   a5: the transmission-zero rank condition holds at every eigenvalue of S.
struct AssumptionReport {
    bool a2 = false;
    bool a3 = false;
    bool a4 = false;
    bool a5 = false;
    std::vector<int> a3_failures; // 1-based agent indices
    std::vector<int> a5_failures;
    std::vector<std::string> notes;

    // a2 is advisory: decaying exogenous modes vanish on their own.
    bool required_pass() const { return a3 && a4 && a5; }
};

AssumptionReport check_assumptions(const std::vector<LtiSubsystem>& subsystems,
                                   const Exosystem& exosystem);

// Steady-state manifold data: x maps v to the regulated plant state, u to the
// feedforward input, satisfying
//   x s = a x + b u + e,    0 = c x + d.
struct RegulatorSolution {
    Eigen::MatrixXd x; // n x q
    Eigen::MatrixXd u; // m x q
};

// Solves the coupled linear system by a dense vectorized least-squares solve
// (minimum-norm when the input dimension exceeds the output dimension).
// Throws NoSolution when the residual tolerance cannot be met.
RegulatorSolution solve_regulator_equations(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                            const Eigen::MatrixXd& c, const Eigen::MatrixXd& d,
                                            const Eigen::MatrixXd& e, const Eigen::MatrixXd& s);

// p-copy replication of the exogenous characteristic dynamics:
//   g1 = diag(beta, ..., beta),  g2 = diag(sigma, ..., sigma),
// with beta the companion matrix of char_poly(s) and sigma the last standard
// basis vector. (beta, sigma) is controllable by construction; certified.
struct InternalModel {
    Eigen::MatrixXd beta;  // q x q
    Eigen::VectorXd sigma; // length q
    Eigen::MatrixXd g1;    // (p q) x (p q)
    Eigen::MatrixXd g2;    // (p q) x p
    int copies = 0;
};

InternalModel build_internal_model(const Eigen::MatrixXd& s, int p);

using linalg::stabilizing_gain;

// Exosystem observer gain via the dual Riccati equation
//   p_tilde s' + s p_tilde + I - p_tilde f' f p_tilde = 0.
// The returned l satisfies is_hurwitz(s + l f); both sign conventions of
// p_tilde f' are tried and the certified one is kept. j = l couples the
// output-based observer.
struct ExoObserverGain {
    Eigen::MatrixXd l;
    Eigen::MatrixXd j;
    Eigen::MatrixXd p_tilde;
};

ExoObserverGain exo_observer_gain(const Eigen::MatrixXd& s, const Eigen::MatrixXd& f);

struct AgentGains {
    // static law: u = k1 x + k2 xi
    Eigen::MatrixXd k1, k2;
    RegulatorSolution reg;
    // internal-model laws: u = kx x + kz z
    Eigen::MatrixXd kx, kz;
    InternalModel im;
    // output-feedback law: u = k z, dz = p1 z + p2 (c x + d xi)
    Eigen::MatrixXd li;
    Eigen::MatrixXd k_combined, p1, p2;
    bool certified = false;
};

struct GainSet {
    ControllerKind controller = ControllerKind::static_feedback;
    ObserverKind observer = ObserverKind::state;

    // adaptive state-observer pieces
    Eigen::MatrixXd p;     // Riccati solution for the estimate-coupling design
    Eigen::MatrixXd gamma; // adaptation weight, gamma = p^2
    // informed observer gain (certified: s + l f Hurwitz)
    Eigen::MatrixXd l;
    // output-based observer pieces
    Eigen::MatrixXd j, p_tilde;

    std::vector<AgentGains> agents;
    std::vector<double> tau;

    nlohmann::json to_json() const;
};

// Gain synthesis per controller kind; all Hurwitz conditions named by the
// corresponding design are machine-certified, including user overrides.
GainSet synthesize_static(const Scenario& scenario);
GainSet synthesize_dynamic_state(const Scenario& scenario);
GainSet synthesize_output_feedback(const Scenario& scenario);

// Dispatch on scenario.controller.
GainSet synthesize(const Scenario& scenario);

} // namespace coopreg::synthesis
