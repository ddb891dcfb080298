#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coopreg/graph.hpp"
#include "coopreg/model.hpp"

namespace coopreg {

enum class ControllerKind { static_feedback, dynamic_state, output_feedback };
enum class ObserverKind { state, output };

const char* controller_kind_name(ControllerKind k);
const char* observer_kind_name(ObserverKind k);
ControllerKind controller_kind_from(const std::string& name);
ObserverKind observer_kind_from(const std::string& name);

struct IntegratorSettings {
    double dt = 1e-3;
    double t_final = 100.0;
    int record_every = 10;
    std::string method = "rk4";

    bool operator==(const IntegratorSettings&) const = default;
};

// One sampled uncertainty entry: an additive delta on a single coefficient of
// one nominal matrix, drawn uniformly from [lo, hi] or (lo, hi].
struct UncertaintyEntry {
    std::string matrix; // "a" | "b" | "c" | "d" | "e"
    int row = 1;        // 1-based
    int col = 1;        // 1-based
    double lo = 0.0;
    double hi = 0.0;
    bool half_open_low = false; // true: (lo, hi], false: [lo, hi]

    bool operator==(const UncertaintyEntry&) const = default;
};

struct UncertaintySpec {
    std::uint64_t seed = 0;
    std::vector<UncertaintyEntry> entries;

    bool operator==(const UncertaintySpec&) const = default;
};

// Manually supplied gains. Every override is certified by synthesis exactly
// like a synthesized gain. An agent index of 0 applies to all agents.
struct AgentOverride {
    int agent = 0;
    std::optional<Eigen::MatrixXd> k1, k2; // static law
    std::optional<Eigen::MatrixXd> kx, kz; // internal-model laws
    std::optional<Eigen::MatrixXd> li;     // output-feedback observer gain
};

struct Overrides {
    std::optional<Eigen::MatrixXd> l; // informed-observer gain
    std::vector<AgentOverride> agents;
};

// Per-agent initial conditions; absent entries use the defaults
// x0 = 0, xi0 = 0, d0 = 1, c0 = 0, z0 = 0.
struct InitialState {
    std::optional<Eigen::VectorXd> x0;
    std::optional<Eigen::VectorXd> xi0;
    std::optional<Eigen::VectorXd> z0;
    std::optional<double> d0;
    std::optional<double> c0;
};

struct Scenario {
    graph::DirectedGraph graph = graph::DirectedGraph::build(1, 1, {});
    std::vector<LtiSubsystem> subsystems;
    Exosystem exosystem;
    ControllerKind controller = ControllerKind::static_feedback;
    ObserverKind observer = ObserverKind::state;
    Overrides overrides;
    std::vector<InitialState> initial_states; // parallel to subsystems
    std::vector<double> tau;                  // per-agent adaptation rates (default 1)
    IntegratorSettings integrator;
    UncertaintySpec uncertainty;

    // Shape checks across graph / subsystems / exosystem; fills defaulted
    // per-agent vectors. Called by the file reader and by programmatic users.
    void validate_shapes();
};

bool operator==(const Scenario& lhs, const Scenario& rhs);

} // namespace coopreg
