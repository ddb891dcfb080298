#include "coopreg/sim.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "coopreg/scenario_io.hpp"

namespace coopreg::sim {

namespace {

struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

} // namespace

std::vector<DeltaSet> sample_uncertainty(const UncertaintySpec& spec,
                                         const std::vector<LtiSubsystem>& subsystems,
                                         int exo_order) {
    SplitMix64 rng(spec.seed);
    std::vector<DeltaSet> out(subsystems.size());
    for (std::size_t i = 0; i < subsystems.size(); ++i) {
        const LtiSubsystem& sub = subsystems[i];
        DeltaSet& ds = out[i];
        ds.a = Eigen::MatrixXd::Zero(sub.n(), sub.n());
        ds.b = Eigen::MatrixXd::Zero(sub.n(), sub.m());
        ds.c = Eigen::MatrixXd::Zero(sub.p(), sub.n());
        ds.d = Eigen::MatrixXd::Zero(sub.p(), exo_order);
        ds.e = Eigen::MatrixXd::Zero(sub.n(), exo_order);
        for (const UncertaintyEntry& entry : spec.entries) {
            const double u = rng.uniform01();
            const double draw = entry.half_open_low ? entry.hi - (entry.hi - entry.lo) * u
                                                    : entry.lo + (entry.hi - entry.lo) * u;
            Eigen::MatrixXd* target = nullptr;
            if (entry.matrix == "a") target = &ds.a;
            else if (entry.matrix == "b") target = &ds.b;
            else if (entry.matrix == "c") target = &ds.c;
            else if (entry.matrix == "d") target = &ds.d;
            else target = &ds.e;
            (*target)(entry.row - 1, entry.col - 1) += draw;
        }
    }
    return out;
}

ClosedLoopSystem::ClosedLoopSystem(Scenario scenario, synthesis::GainSet gains,
                                   std::vector<DeltaSet> sampled)
    : scenario_(std::move(scenario)), gains_(std::move(gains)) {
    n_agents_ = scenario_.graph.n_followers();
    n_informed_ = scenario_.graph.n_informed();
    q_ = scenario_.exosystem.q();

    actual_.resize(n_agents_);
    n_.resize(n_agents_);
    m_.resize(n_agents_);
    p_.resize(n_agents_);
    nz_.resize(n_agents_);
    for (int i = 0; i < n_agents_; ++i) {
        const LtiSubsystem& sub = scenario_.subsystems[i];
        actual_[i].a = sub.a() + sampled[i].a;
        actual_[i].b = sub.b() + sampled[i].b;
        actual_[i].c = sub.c() + sampled[i].c;
        actual_[i].d = sub.d() + sampled[i].d;
        actual_[i].e = sub.e() + sampled[i].e;
        n_[i] = sub.n();
        m_[i] = sub.m();
        p_[i] = sub.p();
        switch (scenario_.controller) {
            case ControllerKind::static_feedback: nz_[i] = 0; break;
            case ControllerKind::dynamic_state: nz_[i] = sub.p() * q_; break;
            case ControllerKind::output_feedback: nz_[i] = sub.n() + sub.p() * q_; break;
        }
    }

    x_off_.resize(n_agents_);
    z_off_.resize(n_agents_);
    xi_off_.resize(n_agents_);
    int off = q_;
    for (int i = 0; i < n_agents_; ++i) {
        x_off_[i] = off;
        off += n_[i];
    }
    for (int i = 0; i < n_agents_; ++i) {
        z_off_[i] = off;
        off += nz_[i];
    }
    for (int i = 0; i < n_agents_; ++i) {
        xi_off_[i] = off;
        off += q_;
    }
    gain_off_ = off;
    state_dim_ = off + (n_agents_ - n_informed_);
}

Eigen::VectorXd ClosedLoopSystem::initial_state() const {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(state_dim_);
    y.head(q_) = scenario_.exosystem.v0;
    for (int i = 0; i < n_agents_; ++i) {
        const InitialState& init = scenario_.initial_states[i];
        if (init.x0) y.segment(x_off_[i], n_[i]) = *init.x0;
        if (init.z0) {
            if (init.z0->size() != nz_[i])
                raise(Errc::invalid_scenario, "z0 length does not match the controller kind");
            y.segment(z_off_[i], nz_[i]) = *init.z0;
        }
        if (init.xi0) y.segment(xi_off_[i], q_) = *init.xi0;
        if (i >= n_informed_) {
            const int g = gain_off_ + (i - n_informed_);
            if (gains_.observer == ObserverKind::state)
                y(g) = init.d0.value_or(1.0);
            else
                y(g) = init.c0.value_or(0.0);
        }
    }
    return y;
}

Eigen::VectorXd ClosedLoopSystem::control(const Eigen::VectorXd& y, int i) const {
    const synthesis::AgentGains& ag = gains_.agents[i];
    const Eigen::VectorXd x = y.segment(x_off_[i], n_[i]);
    const Eigen::VectorXd xi = y.segment(xi_off_[i], q_);
    switch (scenario_.controller) {
        case ControllerKind::static_feedback:
            return agents::static_control(x, xi, ag.k1, ag.k2);
        case ControllerKind::dynamic_state: {
            const Eigen::VectorXd z = y.segment(z_off_[i], nz_[i]);
            return ag.kx * x + ag.kz * z;
        }
        case ControllerKind::output_feedback: {
            const Eigen::VectorXd z = y.segment(z_off_[i], nz_[i]);
            return ag.k_combined * z;
        }
    }
    return Eigen::VectorXd();
}

Eigen::VectorXd ClosedLoopSystem::regulated_output(const Eigen::VectorXd& y, int i) const {
    return actual_[i].c * y.segment(x_off_[i], n_[i]) + actual_[i].d * y.head(q_);
}

void ClosedLoopSystem::deriv(const Eigen::VectorXd& y, Eigen::VectorXd& dy) const {
    dy.resize(state_dim_);
    const Eigen::MatrixXd& s = scenario_.exosystem.s;
    const Eigen::MatrixXd& f = scenario_.exosystem.f;
    const Eigen::VectorXd v = y.head(q_);

    dy.head(q_) = agents::exosystem_deriv(s, v);

    // Estimates (and virtual outputs) are frozen for the whole evaluation.
    std::vector<Eigen::VectorXd> estimates(n_agents_);
    for (int i = 0; i < n_agents_; ++i) estimates[i] = y.segment(xi_off_[i], q_);

    std::vector<Eigen::VectorXd> virtual_outputs;
    if (gains_.observer == ObserverKind::output) {
        virtual_outputs.resize(n_agents_);
        for (int i = 0; i < n_agents_; ++i) virtual_outputs[i] = f * estimates[i];
    }

    const Eigen::VectorXd y_v = f * v;
    const Eigen::MatrixXd& adj = scenario_.graph.adjacency();

    for (int i = 0; i < n_agents_; ++i) {
        if (i < n_informed_) {
            dy.segment(xi_off_[i], q_) =
                agents::informed_observer_deriv(estimates[i], y_v, gains_.l, s, f);
        } else {
            const int g = gain_off_ + (i - n_informed_);
            if (gains_.observer == ObserverKind::state) {
                const auto d = agents::adaptive_observer_deriv(s, gains_.p, gains_.gamma,
                                                               adj.row(i).transpose(), estimates, i, y(g));
                dy.segment(xi_off_[i], q_) = d.dxi;
                dy(g) = d.dd;
            } else {
                const auto d = agents::output_observer_deriv(s, f, gains_.j, adj.row(i).transpose(),
                                                             virtual_outputs, estimates[i], i,
                                                             y(g), gains_.tau[i]);
                dy.segment(xi_off_[i], q_) = d.dxi;
                dy(g) = d.dc;
            }
        }
    }

    for (int i = 0; i < n_agents_; ++i) {
        const synthesis::AgentGains& ag = gains_.agents[i];
        const Actual& sys = actual_[i];
        const Eigen::VectorXd x = y.segment(x_off_[i], n_[i]);
        const Eigen::VectorXd& xi = estimates[i];

        Eigen::VectorXd u;
        switch (scenario_.controller) {
            case ControllerKind::static_feedback:
                u = agents::static_control(x, xi, ag.k1, ag.k2);
                break;
            case ControllerKind::dynamic_state: {
                const Eigen::VectorXd z = y.segment(z_off_[i], nz_[i]);
                const auto ctl = agents::dynamic_state_control(x, z, xi, ag.kx, ag.kz, ag.im.g1,
                                                               ag.im.g2, sys.c, sys.d);
                u = ctl.u;
                dy.segment(z_off_[i], nz_[i]) = ctl.dz;
                break;
            }
            case ControllerKind::output_feedback: {
                const Eigen::VectorXd z = y.segment(z_off_[i], nz_[i]);
                const Eigen::VectorXd measurement = sys.c * x + sys.d * xi;
                const auto ctl =
                    agents::output_feedback_control(measurement, z, ag.k_combined, ag.p1, ag.p2);
                u = ctl.u;
                dy.segment(z_off_[i], nz_[i]) = ctl.dz;
                break;
            }
        }
        dy.segment(x_off_[i], n_[i]) = sys.a * x + sys.b * u + sys.e * v;
    }
}

ClosedLoopSystem assemble(const Scenario& scenario_in) {
    Scenario scenario = scenario_in;
    scenario.validate_shapes();

    if (scenario.observer == ObserverKind::output && !graph::check_assumption6(scenario.graph))
        raise(Errc::incompatible_kinds,
              "the output-based observer requires an undirected uninformed subgraph");

    synthesis::GainSet gains = synthesis::synthesize(scenario);
    std::vector<DeltaSet> sampled =
        sample_uncertainty(scenario.uncertainty, scenario.subsystems, scenario.exosystem.q());
    return ClosedLoopSystem(std::move(scenario), std::move(gains), std::move(sampled));
}

namespace {

void rk4_step(const ClosedLoopSystem& system, Eigen::VectorXd& y, double dt,
              Eigen::VectorXd& k1, Eigen::VectorXd& k2, Eigen::VectorXd& k3, Eigen::VectorXd& k4,
              Eigen::VectorXd& scratch) {
    system.deriv(y, k1);
    scratch = y + (0.5 * dt) * k1;
    system.deriv(scratch, k2);
    scratch = y + (0.5 * dt) * k2;
    system.deriv(scratch, k3);
    scratch = y + dt * k3;
    system.deriv(scratch, k4);
    y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

} // namespace

Trace integrate(const ClosedLoopSystem& system, double dt, double t_final, int record_every) {
    if (!(dt > 0.0)) raise(Errc::invalid_scenario, "dt must be positive");
    if (!(t_final >= dt)) raise(Errc::invalid_scenario, "t_final must be at least dt");
    if (record_every < 1) raise(Errc::invalid_scenario, "record_every must be at least 1");

    const long long n_steps = std::max(1ll, std::llround(t_final / dt));
    const int n_agents = system.n_agents();
    const int q = system.exo_order();

    Eigen::VectorXd y = system.initial_state();
    Eigen::VectorXd k1, k2, k3, k4, scratch;

    std::vector<double> times;
    std::vector<Eigen::VectorXd> rows;
    times.reserve(static_cast<std::size_t>(n_steps / record_every) + 2);

    auto record = [&](double t) {
        times.push_back(t);
        rows.push_back(y);
    };

    record(0.0);
    Eigen::VectorXd prev_gains =
        y.tail(n_agents - system.n_informed());
    for (long long k = 1; k <= n_steps; ++k) {
        rk4_step(system, y, dt, k1, k2, k3, k4, scratch);
        const double t = static_cast<double>(k) * dt;
        if (!y.allFinite()) {
            std::ostringstream msg;
            msg << "non-finite state at t=" << t;
            raise(Errc::non_finite, msg.str());
        }
        const double mag = y.cwiseAbs().maxCoeff();
        if (mag > 1e9) {
            std::ostringstream msg;
            msg << "state magnitude " << mag << " exceeded 1e9 at t=" << t;
            raise(Errc::diverged, msg.str());
        }
        const Eigen::VectorXd cur_gains = y.tail(n_agents - system.n_informed());
        if (((cur_gains - prev_gains).array() < -1e-12).any())
            throw std::logic_error("adaptive gain decreased along the trajectory");
        prev_gains = cur_gains;
        if (k % record_every == 0 || k == n_steps) record(t);
    }

    // Materialize the series.
    const int samples = static_cast<int>(times.size());
    Trace trace;
    trace.times = times;
    trace.v.resize(samples, q);
    trace.agents.resize(n_agents);
    for (int i = 0; i < n_agents; ++i) {
        Trace::AgentSeries& series = trace.agents[i];
        series.x.resize(samples, system.state_size(i));
        series.e.resize(samples, system.output_size(i));
        series.xi.resize(samples, q);
        series.z.resize(samples, system.compensator_size(i));
        series.u.resize(samples, system.input_size(i));
        series.has_gain = (i >= system.n_informed());
        if (series.has_gain) series.gain.resize(samples);
    }
    for (int r = 0; r < samples; ++r) {
        const Eigen::VectorXd& state = rows[r];
        trace.v.row(r) = state.head(q);
        for (int i = 0; i < n_agents; ++i) {
            Trace::AgentSeries& series = trace.agents[i];
            series.x.row(r) = state.segment(system.x_offset(i), system.state_size(i));
            series.e.row(r) = system.regulated_output(state, i);
            series.xi.row(r) = state.segment(system.xi_offset(i), q);
            if (system.compensator_size(i) > 0)
                series.z.row(r) = state.segment(system.z_offset(i), system.compensator_size(i));
            series.u.row(r) = system.control(state, i);
            if (series.has_gain)
                series.gain(r) = state(system.gain_offset(i - system.n_informed()));
        }
    }

    trace.scenario_hash = scenario_io::scenario_hash_hex(system.scenario());
    trace.seed = system.scenario().uncertainty.seed;
    trace.observer = system.gains().observer;
    int certified = 0;
    for (const auto& ag : system.gains().agents) certified += ag.certified ? 1 : 0;
    std::ostringstream cert;
    cert << "certified " << certified << "/" << n_agents << " agents";
    trace.certification = cert.str();
    return trace;
}

Metrics compute_metrics(const Trace& trace, double epsilon) {
    Metrics metrics;
    metrics.epsilon = epsilon;
    const int samples = static_cast<int>(trace.times.size());
    if (samples == 0) return metrics;
    const int last = samples - 1;

    auto max_output = [&](int row) {
        double worst = 0.0;
        for (const auto& series : trace.agents)
            worst = std::max(worst, series.e.row(row).norm());
        return worst;
    };

    metrics.final_output_norm = max_output(last);

    int settled_idx = -1;
    for (int r = last; r >= 0; --r) {
        if (max_output(r) < epsilon)
            settled_idx = r;
        else
            break;
    }
    if (settled_idx >= 0) metrics.settled_time = trace.times[settled_idx];

    double worst_est = 0.0;
    for (const auto& series : trace.agents)
        worst_est = std::max(worst_est, (series.xi.row(last) - trace.v.row(last)).norm());
    metrics.estimation_error_final = worst_est;

    // Plateau: adaptive-gain growth over the second half of the run.
    const double t_mid = trace.times[last] / 2.0;
    int mid = 0;
    for (int r = 0; r <= last; ++r) {
        if (trace.times[r] <= t_mid) mid = r;
        else break;
    }
    double plateau = 0.0;
    for (const auto& series : trace.agents)
        if (series.has_gain) plateau = std::max(plateau, series.gain(last) - series.gain(mid));
    metrics.gain_plateau = plateau;

    double mag = trace.v.cwiseAbs().maxCoeff();
    for (const auto& series : trace.agents) {
        mag = std::max(mag, series.x.cwiseAbs().maxCoeff());
        if (series.z.size() > 0) mag = std::max(mag, series.z.cwiseAbs().maxCoeff());
        mag = std::max(mag, series.xi.cwiseAbs().maxCoeff());
    }
    metrics.max_state_magnitude = mag;
    metrics.bounded = std::isfinite(mag) && mag <= 1e9;
    return metrics;
}

namespace {

void append_double(std::string& line, double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    line += buf;
}

} // namespace

void write_trace_csv(const Trace& trace, std::ostream& os) {
    std::string header = "t";
    const int q = static_cast<int>(trace.v.cols());
    for (int j = 1; j <= q; ++j) header += ",v_" + std::to_string(j);
    for (std::size_t i = 0; i < trace.agents.size(); ++i) {
        const auto& series = trace.agents[i];
        const std::string tag = "a" + std::to_string(i + 1);
        for (int j = 1; j <= series.x.cols(); ++j) header += "," + tag + "_x_" + std::to_string(j);
        for (int j = 1; j <= series.e.cols(); ++j) header += "," + tag + "_e_" + std::to_string(j);
        for (int j = 1; j <= series.xi.cols(); ++j) header += "," + tag + "_xi_" + std::to_string(j);
        if (series.has_gain)
            header += "," + tag + (trace.observer == ObserverKind::state ? "_d" : "_c");
        for (int j = 1; j <= series.u.cols(); ++j) header += "," + tag + "_u_" + std::to_string(j);
    }
    os << header << "\n";

    const int samples = static_cast<int>(trace.times.size());
    for (int r = 0; r < samples; ++r) {
        std::string line;
        append_double(line, trace.times[r]);
        for (int j = 0; j < q; ++j) {
            line += ',';
            append_double(line, trace.v(r, j));
        }
        for (const auto& series : trace.agents) {
            for (int j = 0; j < series.x.cols(); ++j) {
                line += ',';
                append_double(line, series.x(r, j));
            }
            for (int j = 0; j < series.e.cols(); ++j) {
                line += ',';
                append_double(line, series.e(r, j));
            }
            for (int j = 0; j < series.xi.cols(); ++j) {
                line += ',';
                append_double(line, series.xi(r, j));
            }
            if (series.has_gain) {
                line += ',';
                append_double(line, series.gain(r));
            }
            for (int j = 0; j < series.u.cols(); ++j) {
                line += ',';
                append_double(line, series.u(r, j));
            }
        }
        os << line << "\n";
    }
}

nlohmann::json metrics_to_json(const Metrics& metrics, const Trace& trace) {
    nlohmann::json out;
    out["final_output_norm"] = metrics.final_output_norm;
    if (metrics.settled_time)
        out["settled_time"] = *metrics.settled_time;
    else
        out["settled_time"] = nullptr;
    out["estimation_error_final"] = metrics.estimation_error_final;
    out["gain_plateau"] = metrics.gain_plateau;
    out["max_state_magnitude"] = metrics.max_state_magnitude;
    out["bounded"] = metrics.bounded;
    out["epsilon"] = metrics.epsilon;
    out["scenario_hash"] = trace.scenario_hash;
    out["seed"] = trace.seed;
    out["certification"] = trace.certification;
    return out;
}

} // namespace coopreg::sim
