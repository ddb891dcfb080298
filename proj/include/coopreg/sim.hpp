#pragma once

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "coopreg/agents.hpp"
#include "coopreg/scenario.hpp"
#include "coopreg/synthesis.hpp"

namespace coopreg::sim {

// Additive deltas drawn for one agent.
struct DeltaSet {
    Eigen::MatrixXd a, b, c, d, e;
};

// Deterministic per-agent draws from a splitmix64 stream: agents in index
// order, entries in listed order. Closed ranges [lo, hi] map a uniform
// u in [0,1) to lo + (hi-lo) u; half-open (lo, hi] map to hi - (hi-lo) u.
std::vector<DeltaSet> sample_uncertainty(const UncertaintySpec& spec,
                                         const std::vector<LtiSubsystem>& subsystems,
                                         int exo_order);

// The assembled network: frozen actual matrices, certified gains, and the
// stacked state layout
//   [ v; x_1..x_N; z_1..z_N; xi_1..xi_N; adaptive gains (uninformed) ].
class ClosedLoopSystem {
public:
    ClosedLoopSystem(Scenario scenario, synthesis::GainSet gains,
                     std::vector<DeltaSet> sampled);

    int state_dim() const { return state_dim_; }
    Eigen::VectorXd initial_state() const;
    void deriv(const Eigen::VectorXd& y, Eigen::VectorXd& dy) const;

    const Scenario& scenario() const { return scenario_; }
    const synthesis::GainSet& gains() const { return gains_; }
    const Eigen::MatrixXd& actual_a(int i) const { return actual_[i].a; }
    const Eigen::MatrixXd& actual_c(int i) const { return actual_[i].c; }
    const Eigen::MatrixXd& actual_d(int i) const { return actual_[i].d; }

    int n_agents() const { return n_agents_; }
    int n_informed() const { return n_informed_; }
    int exo_order() const { return q_; }
    int x_offset(int i) const { return x_off_[i]; }
    int z_offset(int i) const { return z_off_[i]; }
    int xi_offset(int i) const { return xi_off_[i]; }
    int gain_offset(int uninformed_idx) const { return gain_off_ + uninformed_idx; }
    int state_size(int i) const { return n_[i]; }
    int compensator_size(int i) const { return nz_[i]; }
    int input_size(int i) const { return m_[i]; }
    int output_size(int i) const { return p_[i]; }

    // Control input of agent i evaluated at the given stacked state.
    Eigen::VectorXd control(const Eigen::VectorXd& y, int i) const;
    // Regulated output e_i = C x_i + D v with the actual matrices.
    Eigen::VectorXd regulated_output(const Eigen::VectorXd& y, int i) const;

private:
    struct Actual {
        Eigen::MatrixXd a, b, c, d, e;
    };

    Scenario scenario_;
    synthesis::GainSet gains_;
    std::vector<Actual> actual_;
    int n_agents_ = 0;
    int n_informed_ = 0;
    int q_ = 0;
    std::vector<int> n_, m_, p_, nz_;
    std::vector<int> x_off_, z_off_, xi_off_;
    int gain_off_ = 0;
    int state_dim_ = 0;
};

// Runs synthesis, samples and freezes uncertainties, fixes the state layout.
// Throws IncompatibleKinds when the output-based observer is requested on a
// graph whose uninformed subgraph is not undirected.
ClosedLoopSystem assemble(const Scenario& scenario);

struct Trace {
    std::vector<double> times;
    Eigen::MatrixXd v; // samples x q

    struct AgentSeries {
        Eigen::MatrixXd x, e, xi, z, u;
        Eigen::VectorXd gain; // d or c; empty for informed agents
        bool has_gain = false;
    };
    std::vector<AgentSeries> agents;

    std::string scenario_hash;
    std::uint64_t seed = 0;
    ObserverKind observer = ObserverKind::state;
    std::string certification;
};

// Classical fixed-step RK4. Samples every `record_every` steps plus the final
// state. Aborts with Diverged when any state magnitude exceeds 1e9 and with
// NonFinite on NaN/Inf.
Trace integrate(const ClosedLoopSystem& system, double dt, double t_final, int record_every);

struct Metrics {
    double final_output_norm = 0.0;
    std::optional<double> settled_time; // empty when never settled
    double estimation_error_final = 0.0;
    double gain_plateau = 0.0;
    double max_state_magnitude = 0.0;
    bool bounded = true;
    double epsilon = 1e-2;
};

Metrics compute_metrics(const Trace& trace, double epsilon = 1e-2);

// CSV with header t, v_*, then per agent x_*, e_*, xi_*, d|c, u_*; floats
// printed with 17 significant digits.
void write_trace_csv(const Trace& trace, std::ostream& os);

nlohmann::json metrics_to_json(const Metrics& metrics, const Trace& trace);

} // namespace coopreg::sim
