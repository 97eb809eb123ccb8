// dynamics.hpp: exact reduced dynamics by one-time diagonalization of the joint Hamiltonian
#pragma once

#include "nzkk/core.hpp"
#include "nzkk/model.hpp"
#include "nzkk/series.hpp"

#include <array>
#include <string>
#include <vector>

namespace nzkk {

// H = U diag(E) U^dagger, shared read-only by all trajectories of one model.
class SpectralPropagator {
public:
    explicit SpectralPropagator(const JointHamiltonian& h);

    const RVec& energies() const { return energies_; }
    const Mat& eigenvectors() const { return vectors_; }
    int ds() const { return ds_; }
    int db() const { return db_; }
    int dim() const { return ds_ * db_; }

    Mat to_eigenbasis(const Mat& rho) const { return vectors_.adjoint() * rho * vectors_; }
    // Joint state at time t (dense; used for audits and small models).
    Mat evolve(const Mat& rho0, double t) const;

    // sigma_ij(t) = sum_kl A_kl exp(-i (E_k - E_l) t), A_kl = r_kl <l| (|j><i| x 1) |k>.
    Mat channel_amplitudes(const Mat& rho0_eigen, int i, int j) const;

private:
    RVec energies_;
    Mat vectors_;
    int ds_ = 2;
    int db_ = 1;
};

// Exact Laplace transform of the reduced state: sum_kl A_kl i / (z - (E_k - E_l)).
struct ReducedResolvent {
    RMat bohr;               // E_k - E_l
    std::vector<Mat> amps;   // index i + j*ds
    int ds = 2;

    ReducedResolvent(const SpectralPropagator& prop, const Mat& rho0);
    Mat operator()(cplx z) const;
};

struct ReducedTrajectory {
    TimeGrid grid;
    std::vector<Mat> states;  // ds x ds per step
    std::string initial;      // "factorized: ..." or "correlated: ..."

    std::vector<cplx> channel(int i, int j) const;
    // Column-stacked vec of each state.
    std::vector<Vec> vectors() const;
};

enum class CanonicalPrep { excited, ground, plus, plus_i };

std::string to_string(CanonicalPrep p);
Mat system_state(CanonicalPrep p);
std::array<CanonicalPrep, 4> canonical_preps();

void check_density_matrix(const Mat& rho, const std::string& what, double tol = 1e-10);

ReducedTrajectory propagate_reduced(const SpectralPropagator& prop, const Mat& rho0, const TimeGrid& grid,
                                    const std::string& initial = "factorized");
ReducedTrajectory propagate_reduced(const JointHamiltonian& h, const Mat& rho0, const TimeGrid& grid,
                                    const std::string& initial = "factorized");

struct TrajectorySet {
    TimeGrid grid;
    std::vector<ReducedTrajectory> trajectories;
    std::vector<Mat> system_states;
    Mat v0;  // columns = vec of initial system states
    double v0_condition = 0.0;
};

TrajectorySet build_trajectory_set(const JointHamiltonian& h, const Mat& bath_state, const TimeGrid& grid,
                                   const std::vector<Mat>& system_states);
TrajectorySet build_trajectory_set(const JointHamiltonian& h, const Mat& bath_state, const TimeGrid& grid);

struct NormAudit {
    double max_op_norm = 0.0;
    double max_trace_error = 0.0;
    double min_eigenvalue = 0.0;
    std::size_t worst_step = 0;
    bool pass = true;
};

NormAudit state_norm_audit(const ReducedTrajectory& traj, double tol = 1e-10);

// Centered differences inside, one-sided at both ends.
std::vector<cplx> derivative(const std::vector<cplx>& x, double dt);
std::vector<Vec> derivative(const std::vector<Vec>& x, double dt);

// I(t) = ds_z/dt - 2 Dq Im sigma_01 - (K * s_z)(t), sixth-order derivative, trapezoidal convolution.
// sigma_01 is the lower-left element <1|sigma|0>; s_z = sigma_00 - sigma_11.
std::vector<double> born_residual_proxy(const ReducedTrajectory& traj, const KernelSeries& born_kernel,
                                        double delta_q);

}  // namespace nzkk
