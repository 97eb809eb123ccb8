// model.hpp: truncated Hamiltonians, bath discretization, thermal states, correlators
#pragma once

#include "nzkk/core.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nzkk {

enum class CouplingAxis { raising_lowering, sigma_z };

struct SystemSpec {
    double level_splitting = 1.0;  // omega_0 (JC) or Delta (spin-boson)
    CouplingAxis axis = CouplingAxis::raising_lowering;

    static SystemSpec jc(double omega0) { return {omega0, CouplingAxis::raising_lowering}; }
    static SystemSpec spin_boson(double delta) { return {delta, CouplingAxis::sigma_z}; }
};

enum class BathKind { single_mode_fock, discrete_multimode, drude_lorentz, ohmic, sub_ohmic };

std::string to_string(BathKind k);

struct Mode {
    double omega = 1.0;
    double coupling = 0.0;
};

struct BathSpec {
    BathKind kind = BathKind::single_mode_fock;
    double cutoff = 1.0;    // omega_c or gamma
    double coupling = 0.0;  // g, eta or lambda depending on kind
    double exponent = 0.5;  // sub-Ohmic s
    int fock_truncation = 1;
    int mode_count = 1;
    double beta = 1.0;
    // Explicit modes for discrete-multimode; when empty, mode_count copies of
    // (cutoff, coupling) are used.
    std::vector<Mode> modes;

    void validate() const;
    bool analytic() const {
        return kind == BathKind::drude_lorentz || kind == BathKind::ohmic || kind == BathKind::sub_ohmic;
    }
    std::vector<Mode> resolved_modes() const;

    static BathSpec single_mode(double omega_c, double g, int n_max, double beta = 1.0);
    static BathSpec discrete(std::vector<Mode> modes, int n_max, double beta = 1.0);
    static BathSpec drude_lorentz(double lambda, double gamma, double beta);
    static BathSpec ohmic(double eta, double omega_c, double beta);
    static BathSpec sub_ohmic(double eta, double omega_c, double s, double beta);
};

struct JointHamiltonian {
    Mat matrix;
    int ds = 2;
    int db = 1;
    Mat system_hamiltonian;  // ds x ds
    Mat bath_hamiltonian;    // db x db
    Mat coupling_operator;   // ds x ds system factor of the interaction
    SystemSpec system;
    BathSpec bath;

    int dim() const { return ds * db; }
};

JointHamiltonian build_jc(const SystemSpec& system, const BathSpec& bath);
JointHamiltonian build_spin_boson(const SystemSpec& system, const BathSpec& bath,
                                  std::size_t dim_cap = 4096);

// Dimension of a spin-boson build; throws on overflow of the cap.
std::size_t spin_boson_dimension(int mode_count, int n_max, std::size_t dim_cap);

enum class NodePlacement { linear, logarithmic, centroid, equal_reorganization };

std::string to_string(NodePlacement p);
NodePlacement parse_node_placement(const std::string& s);

std::vector<Mode> discretize_bath(const BathSpec& bath, int mode_count,
                                  NodePlacement placement = NodePlacement::linear);

double reorganization_energy(const std::vector<Mode>& modes);

double spectral_density(const BathSpec& bath, double omega);

Mat thermal_state(const Mat& h_bath, double beta);

// Truncated oscillator operators on n_max+1 Fock levels.
Mat annihilation(int n_max);

struct CorrelatorPole {
    cplx amplitude;
    cplx rate;  // Re(rate) > 0
};

// C(t) = sum_k c_k exp(-nu_k t),   C~(w) = sum_k c_k / (nu_k - i w).
struct BathCorrelatorPoles {
    std::vector<CorrelatorPole> poles;
    int matsubara_count = 0;

    cplx correlation(double t) const;
    cplx transform(cplx omega) const;
    // Part of C~ carried by Im C(t) only (the dissipative response).
    cplx dissipative_transform(cplx omega) const;
};

BathCorrelatorPoles bath_correlator_poles(const BathSpec& bath, int matsubara_count = 4);

// <B(t)B> for B = sum_k g_k (a_k + a_k^dag) in a thermal product state.
cplx discrete_correlation(const std::vector<Mode>& modes, double beta, double t);

}  // namespace nzkk
