#include "coopreg/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <vector>

namespace coopreg::linalg {

namespace {

// kron(a, b) for the small dense orders used here.
Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Eigen::VectorXd vec(const Eigen::MatrixXd& m) {
    return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

Eigen::MatrixXd unvec(const Eigen::VectorXd& v, Eigen::Index rows, Eigen::Index cols) {
    return Eigen::Map<const Eigen::MatrixXd>(v.data(), rows, cols);
}

void require_finite(const Eigen::MatrixXd& m, const char* name) {
    if (!m.allFinite())
        raise(Errc::invalid_scenario, std::string(name) + " has non-finite entries");
}

// Solves op * x = rhs with partial pivoting; rejects near-singular operators.
Eigen::VectorXd solve_dense(const Eigen::MatrixXd& op, const Eigen::VectorXd& rhs,
                            const char* context) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(op);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-13)) {
        std::ostringstream msg;
        msg << context << ": operator is singular to working precision (rcond=" << rcond << ")";
        raise(Errc::singular_operator, msg.str());
    }
    return lu.solve(rhs);
}

bool positive_definite(const Eigen::MatrixXd& sym, double tol) {
    const Eigen::Index n = sym.rows();
    Eigen::MatrixXd shifted = sym - tol * Eigen::MatrixXd::Identity(n, n);
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    return llt.info() == Eigen::Success;
}

std::vector<std::complex<double>> eigenvalues_of(const Eigen::MatrixXd& a) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(a, /*computeEigenvectors=*/false);
    std::vector<std::complex<double>> out(a.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i) out[i] = es.eigenvalues()(i);
    return out;
}

Eigen::Index complex_rank(const Eigen::MatrixXcd& m) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(m);
    return qr.rank();
}

} // namespace

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q) {
    if (a.rows() != a.cols() || q.rows() != q.cols() || a.rows() != q.rows())
        raise(Errc::invalid_scenario, "solve_lyapunov: dimension mismatch");
    require_finite(a, "solve_lyapunov: a");
    require_finite(q, "solve_lyapunov: q");
    if (a.rows() == 0) return Eigen::MatrixXd(0, 0);

    const Eigen::Index n = a.rows();
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    // vec(a'X + Xa) = (I (x) a' + a' (x) I) vec(X)
    const Eigen::MatrixXd op = kron(id, a.transpose()) + kron(a.transpose(), id);
    Eigen::MatrixXd x = unvec(solve_dense(op, vec(-q), "solve_lyapunov"), n, n);

    const bool q_symmetric = (q - q.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + q.cwiseAbs().maxCoeff());
    if (q_symmetric) x = 0.5 * (x + x.transpose());

    const NumericPolicy& pol = NumericPolicy::global();
    const double resid = (a.transpose() * x + x * a + q).norm();
    if (!(resid <= pol.lyapunov_residual_tol * (1.0 + q.norm()))) {
        std::ostringstream msg;
        msg << "solve_lyapunov: residual " << resid << " exceeds tolerance";
        raise(Errc::singular_operator, msg.str());
    }
    return x;
}

Eigen::MatrixXd solve_sylvester(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                const Eigen::MatrixXd& c) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || c.rows() != a.rows() || c.cols() != b.rows())
        raise(Errc::invalid_scenario, "solve_sylvester: dimension mismatch");
    require_finite(a, "solve_sylvester: a");
    require_finite(b, "solve_sylvester: b");
    require_finite(c, "solve_sylvester: c");
    if (c.size() == 0) return Eigen::MatrixXd(c.rows(), c.cols());

    const Eigen::Index n = a.rows(), m = b.rows();
    // vec(aX + Xb) = (I_m (x) a + b' (x) I_n) vec(X)
    const Eigen::MatrixXd op = kron(Eigen::MatrixXd::Identity(m, m), a) +
                               kron(b.transpose(), Eigen::MatrixXd::Identity(n, n));
    Eigen::MatrixXd x = unvec(solve_dense(op, vec(c), "solve_sylvester"), n, m);

    const NumericPolicy& pol = NumericPolicy::global();
    const double resid = (a * x + x * b - c).norm();
    if (!(resid <= pol.lyapunov_residual_tol * (1.0 + c.norm()))) {
        std::ostringstream msg;
        msg << "solve_sylvester: residual " << resid << " exceeds tolerance";
        raise(Errc::singular_operator, msg.str());
    }
    return x;
}

bool is_hurwitz(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols() || !a.allFinite()) return false;
    if (a.rows() == 0) return true;
    const Eigen::Index n = a.rows();
    Eigen::MatrixXd x;
    try {
        x = solve_lyapunov(a, Eigen::MatrixXd::Identity(n, n));
    } catch (const Error&) {
        return false; // marginal or degenerate spectrum
    }
    return positive_definite(x, NumericPolicy::global().pd_tol);
}

Eigen::VectorXd char_poly(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols())
        raise(Errc::invalid_scenario, "char_poly: matrix not square");
    const Eigen::Index n = a.rows();
    Eigen::VectorXd coeffs(n + 1);
    coeffs(n) = 1.0;
    // Faddeev-LeVerrier: M_1 = I, c_{n-k} = -tr(A M_k)/k, M_{k+1} = A M_k + c_{n-k} I.
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index k = 1; k <= n; ++k) {
        const Eigen::MatrixXd am = a * m;
        const double c = -am.trace() / static_cast<double>(k);
        coeffs(n - k) = c;
        if (k < n) m = am + c * Eigen::MatrixXd::Identity(n, n);
    }
    return coeffs;
}

Eigen::MatrixXd solve_care(const CareProblem& p) {
    const Eigen::Index n = p.a.rows(), m = p.b.cols();
    if (p.a.cols() != n || p.b.rows() != n || p.q.rows() != n || p.q.cols() != n ||
        p.r.rows() != m || p.r.cols() != m)
        raise(Errc::invalid_scenario, "solve_care: dimension mismatch");
    require_finite(p.a, "solve_care: a");
    require_finite(p.b, "solve_care: b");
    require_finite(p.q, "solve_care: q");
    require_finite(p.r, "solve_care: r");

    Eigen::LDLT<Eigen::MatrixXd> r_fact(p.r);
    if (r_fact.info() != Eigen::Success || !r_fact.isPositive())
        raise(Errc::invalid_scenario, "solve_care: r is not positive definite");
    const Eigen::MatrixXd r_inv_bt = r_fact.solve(p.b.transpose()); // r^-1 b'

    // Stabilizing seed gain.
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(m, n);
    if (!is_hurwitz(p.a)) {
        const double beta = 1.0 + p.a.cwiseAbs().rowwise().sum().maxCoeff();
        const Eigen::MatrixXd shifted = p.a + beta * Eigen::MatrixXd::Identity(n, n);
        Eigen::MatrixXd z;
        try {
            z = solve_lyapunov(shifted.transpose(), -2.0 * p.b * r_inv_bt);
        } catch (const Error&) {
            raise(Errc::not_stabilizable, "no stabilizing initializer found (shifted Lyapunov failed)");
        }
        Eigen::FullPivLU<Eigen::MatrixXd> zlu(z);
        zlu.setThreshold(1e-12);
        if (!zlu.isInvertible())
            raise(Errc::not_stabilizable, "no stabilizing initializer found (Gramian singular)");
        k = -(r_inv_bt * zlu.inverse());
        if (!is_hurwitz(p.a + p.b * k))
            raise(Errc::not_stabilizable, "no stabilizing initializer found (seed not certified)");
    }

    // Newton-Kleinman: X_k solves (a+bK)'X + X(a+bK) + q + K'rK = 0,
    // then K <- -r^-1 b' X. Monotone and quadratically convergent from a
    // stabilizing seed.
    const NumericPolicy& pol = NumericPolicy::global();
    Eigen::MatrixXd x_prev;
    Eigen::MatrixXd x;
    double last_step = std::numeric_limits<double>::infinity();
    bool converged = false;
    for (int it = 0; it < pol.newton_max_iters; ++it) {
        const Eigen::MatrixXd acl = p.a + p.b * k;
        const Eigen::MatrixXd rhs = p.q + k.transpose() * p.r * k;
        try {
            x = solve_lyapunov(acl, rhs);
        } catch (const Error&) {
            raise(Errc::no_convergence, "solve_care: Newton step lost the stabilizing property");
        }
        k = -(r_fact.solve(p.b.transpose() * x));
        if (x_prev.size() > 0) {
            last_step = (x - x_prev).norm() / std::max(1.0, x.norm());
            if (last_step <= pol.newton_rel_step) {
                converged = true;
                break;
            }
        }
        x_prev = x;
    }
    x = 0.5 * (x + x.transpose());

    const Eigen::MatrixXd residual_mat =
        p.a.transpose() * x + x * p.a + p.q - x * p.b * r_fact.solve(p.b.transpose() * x);
    const double resid = residual_mat.norm();
    if (!converged && !(resid <= pol.care_residual_tol * (1.0 + p.q.norm()))) {
        std::ostringstream msg;
        msg << "solve_care: Newton iteration stalled (relative step " << last_step
            << ", residual " << resid << ")";
        raise(Errc::no_convergence, msg.str());
    }
    if (!(resid <= pol.care_residual_tol * (1.0 + p.q.norm()))) {
        std::ostringstream msg;
        msg << "solve_care: residual " << resid << " exceeds tolerance";
        raise(Errc::no_convergence, msg.str());
    }
    if (!is_hurwitz(p.a - p.b * r_fact.solve(p.b.transpose() * x)))
        raise(Errc::certification_failed, "solve_care: closed loop failed the Hurwitz certificate");
    return x;
}

Eigen::MatrixXd stabilizing_gain(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != a.cols() || b.rows() != a.rows())
        raise(Errc::invalid_scenario, "stabilizing_gain: dimension mismatch");
    const Eigen::Index n = a.rows(), m = b.cols();
    CareProblem prob{a, b, Eigen::MatrixXd::Identity(n, n), Eigen::MatrixXd::Identity(m, m)};
    const Eigen::MatrixXd p = solve_care(prob);
    Eigen::MatrixXd k = -(b.transpose() * p);
    if (!is_hurwitz(a + b * k))
        raise(Errc::certification_failed, "stabilizing_gain: closed loop failed the Hurwitz certificate");
    return k;
}

bool is_stabilizable(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const Eigen::Index n = a.rows();
    if (n == 0) return true;
    Eigen::MatrixXcd pencil(n, n + b.cols());
    for (const auto& lambda : eigenvalues_of(a)) {
        if (lambda.real() < -1e-9) continue; // stable modes need no control
        pencil << (a.cast<std::complex<double>>() -
                   lambda * Eigen::MatrixXcd::Identity(n, n)),
            b.cast<std::complex<double>>();
        if (complex_rank(pencil) < n) return false;
    }
    return true;
}

bool is_detectable(const Eigen::MatrixXd& a, const Eigen::MatrixXd& c) {
    return is_stabilizable(a.transpose(), c.transpose());
}

bool is_observable(const Eigen::MatrixXd& a, const Eigen::MatrixXd& c) {
    const Eigen::Index n = a.rows();
    if (n == 0) return true;
    Eigen::MatrixXcd pencil(n + c.rows(), n);
    for (const auto& lambda : eigenvalues_of(a)) {
        pencil << (a.cast<std::complex<double>>() -
                   lambda * Eigen::MatrixXcd::Identity(n, n)),
            c.cast<std::complex<double>>();
        if (complex_rank(pencil) < n) return false;
    }
    return true;
}

} // namespace coopreg::linalg
