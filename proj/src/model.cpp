#include "coopreg/model.hpp"

#include <sstream>

namespace coopreg {

namespace {

void ensure_shape(Eigen::MatrixXd& delta, Eigen::Index rows, Eigen::Index cols,
                  const char* name) {
    if (delta.size() == 0) {
        delta = Eigen::MatrixXd::Zero(rows, cols);
        return;
    }
    if (delta.rows() != rows || delta.cols() != cols) {
        std::ostringstream msg;
        msg << name << " has shape " << delta.rows() << "x" << delta.cols()
            << ", expected " << rows << "x" << cols;
        raise(Errc::invalid_scenario, msg.str());
    }
}

} // namespace

void LtiSubsystem::finalize(int q) {
    const Eigen::Index nn = a_nom.rows();
    const Eigen::Index mm = b_nom.cols();
    const Eigen::Index pp = c_nom.rows();
    if (a_nom.cols() != nn)
        raise(Errc::invalid_scenario, "subsystem a must be square");
    if (b_nom.rows() != nn)
        raise(Errc::invalid_scenario, "subsystem b row count must match a");
    if (c_nom.cols() != nn)
        raise(Errc::invalid_scenario, "subsystem c column count must match a");
    if (d_nom.rows() != pp || d_nom.cols() != q)
        raise(Errc::invalid_scenario, "subsystem d must be p x q");
    if (e_nom.rows() != nn || e_nom.cols() != q)
        raise(Errc::invalid_scenario, "subsystem e must be n x q");
    ensure_shape(delta_a, nn, nn, "delta_a");
    ensure_shape(delta_b, nn, mm, "delta_b");
    ensure_shape(delta_c, pp, nn, "delta_c");
    ensure_shape(delta_d, pp, q, "delta_d");
    ensure_shape(delta_e, nn, q, "delta_e");
}

void Exosystem::validate() const {
    if (s.rows() != s.cols())
        raise(Errc::invalid_scenario, "exosystem s must be square");
    if (f.cols() != s.rows())
        raise(Errc::invalid_scenario, "exosystem f column count must match s");
    if (v0.size() != s.rows())
        raise(Errc::invalid_scenario, "exosystem v0 length must match s");
}

} // namespace coopreg
