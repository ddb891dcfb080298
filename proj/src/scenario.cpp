#include "coopreg/scenario.hpp"

#include <sstream>

namespace coopreg {

const char* controller_kind_name(ControllerKind k) {
    switch (k) {
        case ControllerKind::static_feedback: return "static";
        case ControllerKind::dynamic_state: return "dynamic_state";
        case ControllerKind::output_feedback: return "output_feedback";
    }
    return "?";
}

const char* observer_kind_name(ObserverKind k) {
    switch (k) {
        case ObserverKind::state: return "state";
        case ObserverKind::output: return "output";
    }
    return "?";
}

ControllerKind controller_kind_from(const std::string& name) {
    if (name == "static") return ControllerKind::static_feedback;
    if (name == "dynamic_state") return ControllerKind::dynamic_state;
    if (name == "output_feedback") return ControllerKind::output_feedback;
    raise(Errc::invalid_scenario, "unknown controller kind '" + name + "'");
}

ObserverKind observer_kind_from(const std::string& name) {
    if (name == "state") return ObserverKind::state;
    if (name == "output") return ObserverKind::output;
    raise(Errc::invalid_scenario, "unknown observer kind '" + name + "'");
}

void Scenario::validate_shapes() {
    exosystem.validate();
    const int n_agents = graph.n_followers();
    if (static_cast<int>(subsystems.size()) != n_agents) {
        std::ostringstream msg;
        msg << "graph has " << n_agents << " followers but " << subsystems.size()
            << " subsystem blocks were given";
        raise(Errc::invalid_scenario, msg.str());
    }
    for (auto& sub : subsystems) sub.finalize(exosystem.q());

    if (initial_states.empty()) initial_states.resize(subsystems.size());
    if (static_cast<int>(initial_states.size()) != n_agents)
        raise(Errc::invalid_scenario, "initial_states size must match the follower count");

    if (tau.empty()) tau.assign(subsystems.size(), 1.0);
    if (static_cast<int>(tau.size()) != n_agents)
        raise(Errc::invalid_scenario, "tau size must match the follower count");
    for (double t : tau)
        if (!(t > 0.0)) raise(Errc::invalid_scenario, "adaptation rates tau must be positive");

    for (std::size_t i = 0; i < initial_states.size(); ++i) {
        const auto& init = initial_states[i];
        if (init.x0 && init.x0->size() != subsystems[i].n())
            raise(Errc::invalid_scenario, "x0 length mismatch");
        if (init.xi0 && init.xi0->size() != exosystem.q())
            raise(Errc::invalid_scenario, "xi0 length mismatch");
        if (init.d0 && !(*init.d0 >= 1.0))
            raise(Errc::invalid_scenario, "d0 must satisfy d0 >= 1");
        if (init.c0 && !(*init.c0 >= 0.0))
            raise(Errc::invalid_scenario, "c0 must satisfy c0 >= 0");
    }

    if (!(integrator.dt > 0.0))
        raise(Errc::invalid_scenario, "integrator dt must be positive");
    if (!(integrator.t_final >= integrator.dt))
        raise(Errc::invalid_scenario, "integrator t_final must be at least dt");
    if (integrator.record_every < 1)
        raise(Errc::invalid_scenario, "record_every must be at least 1");
    if (integrator.method != "rk4")
        raise(Errc::invalid_scenario, "unsupported integrator method '" + integrator.method + "'");

    for (const auto& entry : uncertainty.entries) {
        if (entry.matrix != "a" && entry.matrix != "b" && entry.matrix != "c" &&
            entry.matrix != "d" && entry.matrix != "e")
            raise(Errc::invalid_scenario, "uncertainty matrix must be one of a,b,c,d,e");
        if (!(entry.lo <= entry.hi))
            raise(Errc::invalid_scenario, "uncertainty range must satisfy lo <= hi");
        for (const auto& sub : subsystems) {
            Eigen::Index rows = 0, cols = 0;
            if (entry.matrix == "a") { rows = sub.n(); cols = sub.n(); }
            else if (entry.matrix == "b") { rows = sub.n(); cols = sub.m(); }
            else if (entry.matrix == "c") { rows = sub.p(); cols = sub.n(); }
            else if (entry.matrix == "d") { rows = sub.p(); cols = exosystem.q(); }
            else { rows = sub.n(); cols = exosystem.q(); }
            if (entry.row < 1 || entry.row > rows || entry.col < 1 || entry.col > cols)
                raise(Errc::invalid_scenario, "uncertainty entry indexes outside matrix " + entry.matrix);
        }
    }

    for (const auto& ov : overrides.agents)
        if (ov.agent < 0 || ov.agent > n_agents)
            raise(Errc::invalid_scenario, "override agent index out of range");
}

namespace {

bool same_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

bool same_opt(const std::optional<Eigen::MatrixXd>& a, const std::optional<Eigen::MatrixXd>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || same_matrix(*a, *b);
}

bool same_opt_vec(const std::optional<Eigen::VectorXd>& a, const std::optional<Eigen::VectorXd>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || (a->size() == b->size() && *a == *b);
}

bool same_subsystem(const LtiSubsystem& a, const LtiSubsystem& b) {
    return same_matrix(a.a_nom, b.a_nom) && same_matrix(a.b_nom, b.b_nom) &&
           same_matrix(a.c_nom, b.c_nom) && same_matrix(a.d_nom, b.d_nom) &&
           same_matrix(a.e_nom, b.e_nom) && same_matrix(a.delta_a, b.delta_a) &&
           same_matrix(a.delta_b, b.delta_b) && same_matrix(a.delta_c, b.delta_c) &&
           same_matrix(a.delta_d, b.delta_d) && same_matrix(a.delta_e, b.delta_e);
}

} // namespace

bool operator==(const Scenario& lhs, const Scenario& rhs) {
    if (lhs.graph.n_followers() != rhs.graph.n_followers()) return false;
    if (lhs.graph.n_informed() != rhs.graph.n_informed()) return false;
    if (lhs.graph.adjacency() != rhs.graph.adjacency()) return false;
    if (lhs.subsystems.size() != rhs.subsystems.size()) return false;
    for (std::size_t i = 0; i < lhs.subsystems.size(); ++i)
        if (!same_subsystem(lhs.subsystems[i], rhs.subsystems[i])) return false;
    if (!same_matrix(lhs.exosystem.s, rhs.exosystem.s)) return false;
    if (!same_matrix(lhs.exosystem.f, rhs.exosystem.f)) return false;
    if (lhs.exosystem.v0.size() != rhs.exosystem.v0.size() || lhs.exosystem.v0 != rhs.exosystem.v0)
        return false;
    if (lhs.controller != rhs.controller || lhs.observer != rhs.observer) return false;
    if (!same_opt(lhs.overrides.l, rhs.overrides.l)) return false;
    if (lhs.overrides.agents.size() != rhs.overrides.agents.size()) return false;
    for (std::size_t i = 0; i < lhs.overrides.agents.size(); ++i) {
        const auto& a = lhs.overrides.agents[i];
        const auto& b = rhs.overrides.agents[i];
        if (a.agent != b.agent || !same_opt(a.k1, b.k1) || !same_opt(a.k2, b.k2) ||
            !same_opt(a.kx, b.kx) || !same_opt(a.kz, b.kz) || !same_opt(a.li, b.li))
            return false;
    }
    if (lhs.initial_states.size() != rhs.initial_states.size()) return false;
    for (std::size_t i = 0; i < lhs.initial_states.size(); ++i) {
        const auto& a = lhs.initial_states[i];
        const auto& b = rhs.initial_states[i];
        if (!same_opt_vec(a.x0, b.x0) || !same_opt_vec(a.xi0, b.xi0) ||
            !same_opt_vec(a.z0, b.z0) || a.d0 != b.d0 || a.c0 != b.c0)
            return false;
    }
    return lhs.tau == rhs.tau && lhs.integrator == rhs.integrator &&
           lhs.uncertainty == rhs.uncertainty;
}

} // namespace coopreg
