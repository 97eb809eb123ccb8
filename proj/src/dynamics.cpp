// dynamics.cpp
#include "nzkk/dynamics.hpp"

#include "nzkk/liouville.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <sstream>

namespace nzkk {

SpectralPropagator::SpectralPropagator(const JointHamiltonian& h) : ds_(h.ds), db_(h.db) {
    require(h.matrix.rows() == h.dim(), ErrorKind::dimension, "propagator: dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Mat> es(h.matrix);
    require(es.info() == Eigen::Success, ErrorKind::numerical, "Hamiltonian eigensolve failed");
    energies_ = es.eigenvalues();
    vectors_ = es.eigenvectors();
}

Mat SpectralPropagator::evolve(const Mat& rho0, double t) const {
    const Vec ph = (-I * t * energies_.cast<cplx>()).array().exp();
    Mat r = to_eigenbasis(rho0);
    r = ph.asDiagonal() * r * ph.conjugate().asDiagonal();
    return vectors_ * r * vectors_.adjoint();
}

Mat SpectralPropagator::channel_amplitudes(const Mat& r, int i, int j) const {
    // O = U^dag (|j><i| x 1) U  restricted to rows of block j, cols of block i
    const Mat ui = vectors_.middleRows(static_cast<Eigen::Index>(i) * db_, db_);
    const Mat uj = vectors_.middleRows(static_cast<Eigen::Index>(j) * db_, db_);
    const Mat o = uj.adjoint() * ui;  // o(l, k)
    return r.cwiseProduct(o.transpose());
}

ReducedResolvent::ReducedResolvent(const SpectralPropagator& prop, const Mat& rho0) : ds(prop.ds()) {
    require(rho0.rows() == prop.dim(), ErrorKind::dimension, "resolvent: state has wrong dimension");
    const Mat r = prop.to_eigenbasis(rho0);
    const RVec& e = prop.energies();
    bohr = e.replicate(1, e.size()) - e.transpose().replicate(e.size(), 1);
    for (int j = 0; j < ds; ++j)
        for (int i = 0; i < ds; ++i) amps.push_back(prop.channel_amplitudes(r, i, j));
}

Mat ReducedResolvent::operator()(cplx z) const {
    const Mat w = (I * (z - bohr.cast<cplx>().array()).inverse()).matrix();
    Mat out(ds, ds);
    for (int j = 0; j < ds; ++j)
        for (int i = 0; i < ds; ++i) out(i, j) = amps[i + j * ds].cwiseProduct(w).sum();
    return out;
}

std::vector<cplx> ReducedTrajectory::channel(int i, int j) const {
    std::vector<cplx> out(states.size());
    for (std::size_t n = 0; n < states.size(); ++n) out[n] = states[n](i, j);
    return out;
}

std::vector<Vec> ReducedTrajectory::vectors() const {
    std::vector<Vec> out;
    out.reserve(states.size());
    for (const auto& s : states) out.push_back(vec(s));
    return out;
}

std::string to_string(CanonicalPrep p) {
    switch (p) {
        case CanonicalPrep::excited: return "e";
        case CanonicalPrep::ground: return "g";
        case CanonicalPrep::plus: return "+";
        case CanonicalPrep::plus_i: return "+i";
    }
    return "?";
}

Mat system_state(CanonicalPrep p) {
    Vec psi(2);
    const double s = 1.0 / std::sqrt(2.0);
    switch (p) {
        case CanonicalPrep::excited: psi << 1.0, 0.0; break;
        case CanonicalPrep::ground: psi << 0.0, 1.0; break;
        case CanonicalPrep::plus: psi << s, s; break;
        case CanonicalPrep::plus_i: psi << s, I * s; break;
    }
    return psi * psi.adjoint();
}

std::array<CanonicalPrep, 4> canonical_preps() {
    return {CanonicalPrep::excited, CanonicalPrep::ground, CanonicalPrep::plus, CanonicalPrep::plus_i};
}

void check_density_matrix(const Mat& rho, const std::string& what, double tol) {
    require(rho.rows() == rho.cols(), ErrorKind::dimension, what + ": not square");
    require((rho - rho.adjoint()).norm() <= tol * std::max(1.0, rho.norm()), ErrorKind::invalid_argument,
            what + ": not Hermitian");
    require(std::abs(rho.trace() - 1.0) <= tol, ErrorKind::invalid_argument, what + ": trace is not 1");
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
    require(es.eigenvalues().minCoeff() >= -tol, ErrorKind::invalid_argument, what + ": not positive");
}

ReducedTrajectory propagate_reduced(const SpectralPropagator& prop, const Mat& rho0, const TimeGrid& grid,
                                    const std::string& initial) {
    grid.check();
    require(rho0.rows() == prop.dim(), ErrorKind::dimension, "initial state has wrong dimension");
    check_density_matrix(rho0, "initial joint state");
    const int ds = prop.ds();
    const Mat r = prop.to_eigenbasis(rho0);
    std::vector<Mat> amps;
    for (int j = 0; j < ds; ++j)
        for (int i = 0; i < ds; ++i) amps.push_back(prop.channel_amplitudes(r, i, j));

    ReducedTrajectory traj;
    traj.grid = grid;
    traj.initial = initial;
    traj.states.assign(grid.n_steps, Mat::Zero(ds, ds));
    const Vec e = prop.energies().cast<cplx>();
    parallel_for(grid.n_steps, [&](std::size_t n) {
        const Vec ph = (-I * grid.t(n) * e).array().exp();
        const Vec phc = ph.conjugate();
        Mat& s = traj.states[n];
        for (int j = 0; j < ds; ++j)
            for (int i = 0; i < ds; ++i) s(i, j) = ph.transpose() * (amps[i + j * ds] * phc);
    });
    return traj;
}

ReducedTrajectory propagate_reduced(const JointHamiltonian& h, const Mat& rho0, const TimeGrid& grid,
                                    const std::string& initial) {
    return propagate_reduced(SpectralPropagator(h), rho0, grid, initial);
}

TrajectorySet build_trajectory_set(const JointHamiltonian& h, const Mat& bath_state, const TimeGrid& grid,
                                   const std::vector<Mat>& system_states) {
    grid.check();
    require(system_states.size() == static_cast<std::size_t>(h.ds * h.ds), ErrorKind::dimension,
            "trajectory set needs ds^2 initial system states");
    TrajectorySet set;
    set.grid = grid;
    set.system_states = system_states;
    const Eigen::Index m = h.ds * h.ds;
    set.v0 = Mat(m, m);
    for (Eigen::Index c = 0; c < m; ++c) set.v0.col(c) = vec(system_states[c]);
    Eigen::JacobiSVD<Mat> svd(set.v0);
    const auto& sv = svd.singularValues();
    if (sv(m - 1) <= 1e-12 * sv(0)) {
        std::ostringstream os;
        os << "initial system states are linearly dependent (smallest singular value " << sv(m - 1) << ")";
        fail(ErrorKind::numerical, os.str());
    }
    set.v0_condition = sv(0) / sv(m - 1);

    const SpectralPropagator prop(h);
    set.trajectories.resize(system_states.size());
    for (std::size_t k = 0; k < system_states.size(); ++k) {
        std::ostringstream os;
        os << "factorized: system state " << k;
        set.trajectories[k] = propagate_reduced(prop, kron(system_states[k], bath_state), grid, os.str());
    }
    return set;
}

TrajectorySet build_trajectory_set(const JointHamiltonian& h, const Mat& bath_state, const TimeGrid& grid) {
    std::vector<Mat> states;
    for (auto p : canonical_preps()) states.push_back(system_state(p));
    return build_trajectory_set(h, bath_state, grid, states);
}

NormAudit state_norm_audit(const ReducedTrajectory& traj, double tol) {
    NormAudit a;
    a.min_eigenvalue = INFINITY;
    bool flagged = false;
    for (std::size_t n = 0; n < traj.states.size(); ++n) {
        const Mat& s = traj.states[n];
        const double nrm = op_norm(s);
        const double tr = std::abs(s.trace() - 1.0);
        Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (s + s.adjoint()), Eigen::EigenvaluesOnly);
        const double lo = es.eigenvalues().minCoeff();
        a.max_op_norm = std::max(a.max_op_norm, nrm);
        a.max_trace_error = std::max(a.max_trace_error, tr);
        a.min_eigenvalue = std::min(a.min_eigenvalue, lo);
        // worst_step: first violating step, else the step with the largest norm
        const bool bad = nrm > 1.0 + tol || tr > tol || lo < -tol;
        if (bad && !flagged) {
            flagged = true;
            a.worst_step = n;
        } else if (!flagged && nrm >= a.max_op_norm) {
            a.worst_step = n;
        }
    }
    a.pass = !flagged;
    return a;
}

namespace {

template <class T>
std::vector<T> diff(const std::vector<T>& x, double dt) {
    const std::size_t n = x.size();
    require(n >= 2, ErrorKind::invalid_argument, "derivative needs at least 2 samples");
    std::vector<T> d(n);
    d[0] = (x[1] - x[0]) / dt;
    d[n - 1] = (x[n - 1] - x[n - 2]) / dt;
    for (std::size_t k = 1; k + 1 < n; ++k) d[k] = (x[k + 1] - x[k - 1]) / (2.0 * dt);
    return d;
}

}  // namespace

std::vector<cplx> derivative(const std::vector<cplx>& x, double dt) { return diff(x, dt); }
std::vector<Vec> derivative(const std::vector<Vec>& x, double dt) { return diff(x, dt); }

namespace {

// Sixth-order first derivative on 7-point stencils, one-sided near the ends.
std::vector<cplx> derivative6(const std::vector<cplx>& x, double dt) {
    static constexpr double st[4][7] = {
        {-49.0 / 20, 6.0, -15.0 / 2, 20.0 / 3, -15.0 / 4, 6.0 / 5, -1.0 / 6},
        {-1.0 / 6, -77.0 / 60, 5.0 / 2, -5.0 / 3, 5.0 / 6, -1.0 / 4, 1.0 / 30},
        {1.0 / 30, -2.0 / 5, -7.0 / 12, 4.0 / 3, -1.0 / 2, 2.0 / 15, -1.0 / 60},
        {-1.0 / 60, 3.0 / 20, -3.0 / 4, 0.0, 3.0 / 4, -3.0 / 20, 1.0 / 60},
    };
    const std::size_t n = x.size();
    if (n < 7) return derivative(x, dt);
    std::vector<cplx> d(n);
    for (std::size_t k = 0; k < n; ++k) {
        cplx s = 0.0;
        if (k < 3) {
            for (std::size_t j = 0; j < 7; ++j) s += st[k][j] * x[j];
        } else if (k + 3 >= n) {
            const std::size_t p = n - 1 - k;
            for (std::size_t j = 0; j < 7; ++j) s -= st[p][j] * x[n - 1 - j];
        } else {
            for (std::size_t j = 0; j < 7; ++j) s += st[3][j] * x[k + j - 3];
        }
        d[k] = s / dt;
    }
    return d;
}

}  // namespace

std::vector<double> born_residual_proxy(const ReducedTrajectory& traj, const KernelSeries& born_kernel,
                                        double delta_q) {
    require(born_kernel.grid == traj.grid && born_kernel.size() == traj.states.size(), ErrorKind::dimension,
            "Born proxy: kernel and trajectory grids differ");
    require(born_kernel.scalar(), ErrorKind::dimension, "Born proxy needs a scalar kernel");
    const std::size_t n = traj.states.size();
    const double dt = traj.grid.dt;
    std::vector<cplx> sz(n);
    for (std::size_t k = 0; k < n; ++k) sz[k] = traj.states[k](0, 0) - traj.states[k](1, 1);
    const auto dsz = derivative6(sz, dt);
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        cplx conv = 0.0;
        if (k > 0) {
            conv = 0.5 * (born_kernel.values[0](0, 0) * sz[k] + born_kernel.values[k](0, 0) * sz[0]);
            for (std::size_t m = 1; m < k; ++m) conv += born_kernel.values[m](0, 0) * sz[k - m];
            conv *= dt;
        }
        out[k] = (dsz[k] - 2.0 * delta_q * traj.states[k](1, 0).imag() - conv).real();
    }
    return out;
}

}  // namespace nzkk
