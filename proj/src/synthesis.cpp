#include "coopreg/synthesis.hpp"

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include <complex>
#include <sstream>

namespace coopreg::synthesis {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd kron(const MatrixXd& a, const MatrixXd& b) {
    MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

VectorXd vec(const MatrixXd& m) {
    return Eigen::Map<const VectorXd>(m.data(), m.size());
}

std::vector<std::complex<double>> spectrum(const MatrixXd& a) {
    Eigen::EigenSolver<MatrixXd> es(a, false);
    std::vector<std::complex<double>> out(a.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i) out[i] = es.eigenvalues()(i);
    return out;
}

} // namespace

AssumptionReport check_assumptions(const std::vector<LtiSubsystem>& subsystems,
                                   const Exosystem& exosystem) {
    AssumptionReport report;
    const MatrixXd& s = exosystem.s;
    const Eigen::Index q = s.rows();

    const auto s_eigs = spectrum(s);
    report.a2 = true;
    for (const auto& lambda : s_eigs) {
        if (lambda.real() < -1e-9) {
            report.a2 = false;
            std::ostringstream msg;
            msg << "exogenous mode with negative real part " << lambda.real()
                << " decays on its own (advisory)";
            report.notes.push_back(msg.str());
            break;
        }
    }

    report.a3 = true;
    for (std::size_t i = 0; i < subsystems.size(); ++i) {
        if (!linalg::is_stabilizable(subsystems[i].a_nom, subsystems[i].b_nom)) {
            report.a3 = false;
            report.a3_failures.push_back(static_cast<int>(i) + 1);
        }
    }

    report.a4 = linalg::is_detectable(s, exosystem.f);

    report.a5 = true;
    for (std::size_t i = 0; i < subsystems.size(); ++i) {
        const LtiSubsystem& sub = subsystems[i];
        const Eigen::Index n = sub.n(), m = sub.m(), p = sub.p();
        bool ok = true;
        for (const auto& lambda : s_eigs) {
            Eigen::MatrixXcd pencil(n + p, n + m);
            pencil.setZero();
            pencil.topLeftCorner(n, n) =
                sub.a_nom.cast<std::complex<double>>() - lambda * Eigen::MatrixXcd::Identity(n, n);
            pencil.topRightCorner(n, m) = sub.b_nom.cast<std::complex<double>>();
            pencil.bottomLeftCorner(p, n) = sub.c_nom.cast<std::complex<double>>();
            Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(pencil);
            if (qr.rank() < n + p) {
                ok = false;
                break;
            }
        }
        if (!ok) {
            report.a5 = false;
            report.a5_failures.push_back(static_cast<int>(i) + 1);
        }
    }

    (void)q;
    return report;
}

RegulatorSolution solve_regulator_equations(const MatrixXd& a, const MatrixXd& b,
                                            const MatrixXd& c, const MatrixXd& d,
                                            const MatrixXd& e, const MatrixXd& s) {
    const Eigen::Index n = a.rows(), m = b.cols(), p = c.rows(), q = s.rows();
    if (a.cols() != n || b.rows() != n || c.cols() != n || d.rows() != p || d.cols() != q ||
        e.rows() != n || e.cols() != q || s.cols() != q)
        raise(Errc::invalid_scenario, "solve_regulator_equations: dimension mismatch");

    // Unknowns stacked as [vec(X); vec(U)].
    //   vec(X s - a X - b U) = (s' (x) I_n - I_q (x) a) vec X - (I_q (x) b) vec U = vec e
    //   (I_q (x) c) vec X = -vec d
    const Eigen::Index rows = n * q + p * q;
    const Eigen::Index cols = n * q + m * q;
    const MatrixXd id_q = MatrixXd::Identity(q, q);
    const MatrixXd id_n = MatrixXd::Identity(n, n);

    MatrixXd op = MatrixXd::Zero(rows, cols);
    op.topLeftCorner(n * q, n * q) = kron(s.transpose(), id_n) - kron(id_q, a);
    op.topRightCorner(n * q, m * q) = -kron(id_q, b);
    op.bottomLeftCorner(p * q, n * q) = kron(id_q, c);

    VectorXd rhs(rows);
    rhs.head(n * q) = vec(e);
    rhs.tail(p * q) = -vec(d);

    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(op);
    const VectorXd sol = cod.solve(rhs);

    RegulatorSolution out;
    out.x = Eigen::Map<const MatrixXd>(sol.data(), n, q);
    out.u = Eigen::Map<const MatrixXd>(sol.data() + n * q, m, q);

    const double tol = NumericPolicy::global().regulator_residual_tol;
    const double r1 = (out.x * s - a * out.x - b * out.u - e).norm();
    const double r2 = (c * out.x + d).norm();
    if (!(r1 <= tol * (1.0 + e.norm()) && r2 <= tol * (1.0 + d.norm()))) {
        std::ostringstream msg;
        msg << "regulator equations are inconsistent (residuals " << r1 << ", " << r2
            << "); the rank condition fails at some exogenous mode";
        raise(Errc::no_solution, msg.str());
    }
    return out;
}

InternalModel build_internal_model(const MatrixXd& s, int p) {
    if (s.rows() != s.cols())
        raise(Errc::invalid_scenario, "build_internal_model: s must be square");
    if (p < 1)
        raise(Errc::invalid_scenario, "build_internal_model: p must be positive");

    const Eigen::Index q = s.rows();
    const VectorXd coeffs = linalg::char_poly(s); // [c_0, ..., c_{q-1}, 1]

    InternalModel im;
    im.copies = p;
    im.beta = MatrixXd::Zero(q, q);
    if (q > 1) im.beta.topRightCorner(q - 1, q - 1) = MatrixXd::Identity(q - 1, q - 1);
    for (Eigen::Index j = 0; j < q; ++j) im.beta(q - 1, j) = -coeffs(j);
    im.sigma = VectorXd::Zero(q);
    im.sigma(q - 1) = 1.0;

    // Companion pairs are controllable; certify anyway via the Kalman matrix.
    MatrixXd ctrb(q, q);
    VectorXd col = im.sigma;
    for (Eigen::Index j = 0; j < q; ++j) {
        ctrb.col(j) = col;
        col = im.beta * col;
    }
    Eigen::ColPivHouseholderQR<MatrixXd> qr(ctrb);
    if (qr.rank() < q)
        raise(Errc::certification_failed, "internal model pair lost controllability");

    im.g1 = MatrixXd::Zero(p * q, p * q);
    im.g2 = MatrixXd::Zero(p * q, p);
    for (int copy = 0; copy < p; ++copy) {
        im.g1.block(copy * q, copy * q, q, q) = im.beta;
        im.g2.block(copy * q, copy, q, 1) = im.sigma;
    }
    return im;
}

ExoObserverGain exo_observer_gain(const MatrixXd& s, const MatrixXd& f) {
    if (!linalg::is_detectable(s, f))
        raise(Errc::not_detectable, "the exogenous pair (s, f) is not detectable");

    const Eigen::Index q = s.rows(), l_dim = f.rows();
    linalg::CareProblem dual{s.transpose(), f.transpose(),
                             MatrixXd::Identity(q, q), MatrixXd::Identity(l_dim, l_dim)};
    ExoObserverGain out;
    out.p_tilde = linalg::solve_care(dual);

    const MatrixXd candidate = out.p_tilde * f.transpose();
    if (linalg::is_hurwitz(s + candidate * f)) {
        out.l = candidate;
    } else if (linalg::is_hurwitz(s - candidate * f)) {
        out.l = -candidate;
    } else {
        raise(Errc::certification_failed,
              "neither sign of p_tilde f' yields a Hurwitz observer error matrix");
    }
    out.j = out.l;
    return out;
}

namespace {

// Observer-side pieces shared by every controller kind.
void fill_observer_gains(const Scenario& scenario, GainSet& gains) {
    const MatrixXd& s = scenario.exosystem.s;
    const MatrixXd& f = scenario.exosystem.f;
    const Eigen::Index q = s.rows();

    if (gains.observer == ObserverKind::state) {
        linalg::CareProblem prob{s, MatrixXd::Identity(q, q), MatrixXd::Identity(q, q),
                                 MatrixXd::Identity(q, q)};
        gains.p = linalg::solve_care(prob);
        gains.gamma = gains.p * gains.p;
    } else {
        const ExoObserverGain eo = exo_observer_gain(s, f);
        gains.p_tilde = eo.p_tilde;
        gains.j = eo.j;
        gains.l = eo.l; // informed observers share the dual gain by default
    }

    if (scenario.overrides.l) {
        if (!linalg::is_hurwitz(s + (*scenario.overrides.l) * f))
            raise(Errc::certification_failed,
                  "override l fails the Hurwitz certificate on s + l f");
        gains.l = *scenario.overrides.l;
    } else if (gains.observer == ObserverKind::state) {
        gains.l = exo_observer_gain(s, f).l;
    }
    gains.tau = scenario.tau;
}

// Collects the override block applicable to 1-based agent index.
struct ResolvedOverride {
    std::optional<MatrixXd> k1, k2, kx, kz, li;
};

ResolvedOverride override_for(const Scenario& scenario, int agent_1based) {
    ResolvedOverride out;
    for (const AgentOverride& ov : scenario.overrides.agents) {
        if (ov.agent != 0 && ov.agent != agent_1based) continue;
        if (ov.k1) out.k1 = ov.k1;
        if (ov.k2) out.k2 = ov.k2;
        if (ov.kx) out.kx = ov.kx;
        if (ov.kz) out.kz = ov.kz;
        if (ov.li) out.li = ov.li;
    }
    return out;
}

void require_assumptions(const Scenario& scenario) {
    if (!graph::check_assumption1(scenario.graph))
        raise(Errc::invalid_scenario,
              "reachability assumption fails: some uninformed follower is cut off");
    const AssumptionReport report = check_assumptions(scenario.subsystems, scenario.exosystem);
    if (!report.required_pass()) {
        std::ostringstream msg;
        msg << "model assumptions fail:";
        if (!report.a3) {
            msg << " stabilizability(agents";
            for (int idx : report.a3_failures) msg << " " << idx;
            msg << ")";
        }
        if (!report.a4) msg << " detectability(s,f)";
        if (!report.a5) {
            msg << " rank-condition(agents";
            for (int idx : report.a5_failures) msg << " " << idx;
            msg << ")";
        }
        raise(Errc::invalid_scenario, msg.str());
    }
}

} // namespace

GainSet synthesize_static(const Scenario& scenario) {
    require_assumptions(scenario);
    GainSet gains;
    gains.controller = ControllerKind::static_feedback;
    gains.observer = scenario.observer;
    fill_observer_gains(scenario, gains);

    const MatrixXd& s = scenario.exosystem.s;
    gains.agents.reserve(scenario.subsystems.size());
    for (std::size_t i = 0; i < scenario.subsystems.size(); ++i) {
        const LtiSubsystem& sub = scenario.subsystems[i];
        const ResolvedOverride ov = override_for(scenario, static_cast<int>(i) + 1);

        AgentGains ag;
        if (ov.k1) {
            if (!linalg::is_hurwitz(sub.a_nom + sub.b_nom * (*ov.k1))) {
                std::ostringstream msg;
                msg << "agent " << i + 1 << ": override k1 fails the Hurwitz certificate";
                raise(Errc::certification_failed, msg.str());
            }
            ag.k1 = *ov.k1;
        } else {
            ag.k1 = stabilizing_gain(sub.a_nom, sub.b_nom);
        }
        ag.reg = solve_regulator_equations(sub.a_nom, sub.b_nom, sub.c_nom, sub.d_nom,
                                           sub.e_nom, s);
        ag.k2 = ov.k2 ? *ov.k2 : MatrixXd(ag.reg.u - ag.k1 * ag.reg.x);
        ag.certified = true;
        gains.agents.push_back(std::move(ag));
    }
    return gains;
}

namespace {

// Shared by the two internal-model laws: (kx, kz) stabilizing the augmented
// nominal pair, with overrides certified on the same block matrix.
void fill_internal_model_gains(const Scenario& scenario, std::size_t agent_idx,
                               AgentGains& ag) {
    const LtiSubsystem& sub = scenario.subsystems[agent_idx];
    const MatrixXd& s = scenario.exosystem.s;
    const Eigen::Index n = sub.n(), m = sub.m(), p = sub.p();
    const Eigen::Index nz = p * s.rows();

    ag.im = build_internal_model(s, static_cast<int>(p));

    MatrixXd a_aug = MatrixXd::Zero(n + nz, n + nz);
    a_aug.topLeftCorner(n, n) = sub.a_nom;
    a_aug.bottomLeftCorner(nz, n) = ag.im.g2 * sub.c_nom;
    a_aug.bottomRightCorner(nz, nz) = ag.im.g1;
    MatrixXd b_aug = MatrixXd::Zero(n + nz, m);
    b_aug.topRows(n) = sub.b_nom;

    const ResolvedOverride ov = override_for(scenario, static_cast<int>(agent_idx) + 1);
    if (ov.kx && ov.kz) {
        ag.kx = *ov.kx;
        ag.kz = *ov.kz;
    } else {
        MatrixXd k_full;
        try {
            k_full = stabilizing_gain(a_aug, b_aug);
        } catch (const Error& err) {
            std::ostringstream msg;
            msg << "agent " << agent_idx + 1 << ": " << err.what();
            raise(err.code(), msg.str());
        }
        ag.kx = ov.kx ? *ov.kx : MatrixXd(k_full.leftCols(n));
        ag.kz = ov.kz ? *ov.kz : MatrixXd(k_full.rightCols(nz));
    }

    MatrixXd closed = a_aug;
    closed.topLeftCorner(n, n) += sub.b_nom * ag.kx;
    closed.topRightCorner(n, nz) = sub.b_nom * ag.kz;
    if (!linalg::is_hurwitz(closed)) {
        std::ostringstream msg;
        msg << "agent " << agent_idx + 1
            << ": augmented internal-model block fails the Hurwitz certificate";
        raise(Errc::certification_failed, msg.str());
    }
    ag.certified = true;
}

} // namespace

GainSet synthesize_dynamic_state(const Scenario& scenario) {
    require_assumptions(scenario);
    GainSet gains;
    gains.controller = ControllerKind::dynamic_state;
    gains.observer = scenario.observer;
    fill_observer_gains(scenario, gains);

    gains.agents.resize(scenario.subsystems.size());
    for (std::size_t i = 0; i < scenario.subsystems.size(); ++i)
        fill_internal_model_gains(scenario, i, gains.agents[i]);
    return gains;
}

GainSet synthesize_output_feedback(const Scenario& scenario) {
    require_assumptions(scenario);
    GainSet gains;
    gains.controller = ControllerKind::output_feedback;
    gains.observer = scenario.observer;
    fill_observer_gains(scenario, gains);

    gains.agents.resize(scenario.subsystems.size());
    for (std::size_t i = 0; i < scenario.subsystems.size(); ++i) {
        AgentGains& ag = gains.agents[i];
        const LtiSubsystem& sub = scenario.subsystems[i];
        fill_internal_model_gains(scenario, i, ag);

        if (!linalg::is_observable(sub.a_nom, sub.c_nom)) {
            std::ostringstream msg;
            msg << "agent " << i + 1 << ": (a, c) is not observable";
            raise(Errc::not_observable, msg.str());
        }

        const ResolvedOverride ov = override_for(scenario, static_cast<int>(i) + 1);
        if (ov.li) {
            ag.li = *ov.li;
        } else {
            const MatrixXd k_dual = stabilizing_gain(sub.a_nom.transpose(), sub.c_nom.transpose());
            ag.li = -k_dual.transpose();
        }
        if (!linalg::is_hurwitz(sub.a_nom - ag.li * sub.c_nom)) {
            std::ostringstream msg;
            msg << "agent " << i + 1 << ": a - li c fails the Hurwitz certificate";
            raise(Errc::certification_failed, msg.str());
        }

        const Eigen::Index n = sub.n(), p = sub.p();
        const Eigen::Index nz = ag.im.g1.rows();

        ag.k_combined = MatrixXd(sub.m(), n + nz);
        ag.k_combined << ag.kx, ag.kz;
        ag.p1 = MatrixXd::Zero(n + nz, n + nz);
        ag.p1.topLeftCorner(n, n) = sub.a_nom + sub.b_nom * ag.kx - ag.li * sub.c_nom;
        ag.p1.topRightCorner(n, nz) = sub.b_nom * ag.kz;
        ag.p1.bottomRightCorner(nz, nz) = ag.im.g1;
        ag.p2 = MatrixXd::Zero(n + nz, p);
        ag.p2.topRows(n) = ag.li;
        ag.p2.bottomRows(nz) = ag.im.g2;

        // Triangularized closed loop: the separation structure stacks the
        // augmented internal-model block and the observer error block.
        MatrixXd tri = MatrixXd::Zero(2 * n + nz, 2 * n + nz);
        tri.topLeftCorner(n, n) = sub.a_nom + sub.b_nom * ag.kx;
        tri.block(0, n, n, nz) = sub.b_nom * ag.kz;
        tri.topRightCorner(n, n) = sub.b_nom * ag.kx;
        tri.block(n, 0, nz, n) = ag.im.g2 * sub.c_nom;
        tri.block(n, n, nz, nz) = ag.im.g1;
        tri.bottomRightCorner(n, n) = sub.a_nom - ag.li * sub.c_nom;
        if (!linalg::is_hurwitz(tri)) {
            std::ostringstream msg;
            msg << "agent " << i + 1 << ": separated closed loop fails the Hurwitz certificate";
            raise(Errc::certification_failed, msg.str());
        }
    }
    return gains;
}

GainSet synthesize(const Scenario& scenario) {
    switch (scenario.controller) {
        case ControllerKind::static_feedback: return synthesize_static(scenario);
        case ControllerKind::dynamic_state: return synthesize_dynamic_state(scenario);
        case ControllerKind::output_feedback: return synthesize_output_feedback(scenario);
    }
    raise(Errc::invalid_scenario, "unknown controller kind");
}

namespace {

nlohmann::json matrix_json(const MatrixXd& m) {
    nlohmann::json data = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        data.push_back(row);
    }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

} // namespace

nlohmann::json GainSet::to_json() const {
    nlohmann::json out;
    out["controller"] = controller_kind_name(controller);
    out["observer"] = observer_kind_name(observer);
    out["l"] = matrix_json(l);
    if (observer == ObserverKind::state) {
        out["p"] = matrix_json(p);
        out["gamma"] = matrix_json(gamma);
    } else {
        out["p_tilde"] = matrix_json(p_tilde);
        out["j"] = matrix_json(j);
    }
    out["tau"] = tau;
    nlohmann::json agents_json = nlohmann::json::array();
    for (const AgentGains& ag : agents) {
        nlohmann::json a;
        a["certified"] = ag.certified;
        if (controller == ControllerKind::static_feedback) {
            a["k1"] = matrix_json(ag.k1);
            a["k2"] = matrix_json(ag.k2);
            a["regulator_x"] = matrix_json(ag.reg.x);
            a["regulator_u"] = matrix_json(ag.reg.u);
        } else {
            a["kx"] = matrix_json(ag.kx);
            a["kz"] = matrix_json(ag.kz);
            a["g1"] = matrix_json(ag.im.g1);
            a["g2"] = matrix_json(ag.im.g2);
        }
        if (controller == ControllerKind::output_feedback) {
            a["li"] = matrix_json(ag.li);
        }
        agents_json.push_back(std::move(a));
    }
    out["agents"] = std::move(agents_json);
    return out;
}

} // namespace coopreg::synthesis
