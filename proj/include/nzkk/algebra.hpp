// algebra.hpp: rational-kernel pole budgets, Rouche bound, moment growth classification
#pragma once

#include "nzkk/core.hpp"
#include "nzkk/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nzkk {

// K(z) = R/(z - z0) + P(z)/q(z), q monic with real coefficients, deg P < deg q.
struct RationalKernelSpec {
    cplx z0{0.0, 1.0};
    Mat residue;                 // R, d x d
    std::vector<double> q{1.0};  // low order first, q.back() == 1
    std::vector<Mat> p;          // low order first, size <= deg q
    Mat liouvillian;             // L_s, d x d

    int d() const { return static_cast<int>(liouvillian.rows()); }
    int m() const { return static_cast<int>(q.size()) - 1; }
    double q_sub() const { return m() > 0 ? q[q.size() - 2] : 0.0; }  // q_{m-1}
    void validate() const;

    cplx q_at(cplx z) const;
    Mat regular(cplx z) const;  // P(z)/q(z)
    // Monic matrix polynomial M(z) = (z - z0)(z q - q L - P) - R q, coefficients low order first.
    std::vector<Mat> polynomial() const;
    Mat polynomial_at(cplx z) const;
};

struct VietaReport {
    std::vector<cplx> roots;
    cplx root_sum;
    cplx expected_sum;  // d z0 + Tr L - d q_{m-1}
    double imag_budget = 0.0;
    double expected_budget = 0.0;  // d Im z0
    double sum_error = 0.0;        // relative
    double budget_error = 0.0;
    bool pass = false;
};

VietaReport vieta_budget(const RationalKernelSpec& spec, double tol = 1e-8);

struct RoucheReport {
    double r = 0.0;
    double n_of_r = 0.0;
    double residue_norm = 0.0;
    bool verdict = false;  // ||R|| < r n(r)
    std::size_t samples = 0;
    cplx argmin;
    long winding = 0;           // zeros of det[(z - z0)(z - L - K_reg) - R] inside the circle
    std::size_t roots_inside = 0;  // companion roots inside the circle
    bool audit = false;            // winding == roots_inside == d
    long regular_winding = 0;      // zeros of det(z - L - K_reg) inside the circle
    bool hypothesis = false;       // regular_winding == 0: z - L - K_reg invertible in the disc
};

RoucheReport rouche_bound(const RationalKernelSpec& spec, double r, std::size_t min_samples = 64);

struct AnchorPair {
    cplx plus;
    cplx minus;
};

struct AlgebraAnchorReport {
    double omega1 = 0.0, omega2 = 0.0, gamma = 0.0, r = 0.0;
    std::vector<AnchorPair> factors;
    cplx root_sum;
    double imag_budget = 0.0;
    double budget_error = 0.0;
    bool each_factor_uhp = false;
    bool residue_nonsingular = false;
    bool q_rootless = true;
    double companion_mismatch = 0.0;  // closed form vs companion roots
    bool pass = false;
};

RationalKernelSpec anchor_spec(double omega1, double omega2, double gamma, double r);
AlgebraAnchorReport anchor_example(double omega1, double omega2, double gamma, double r);

// Even moments Omega_2n, n = 1..N, held as log norms so factorial growth does not overflow.
struct MomentSequence {
    std::vector<double> log_norms;
    std::vector<Mat> omega;  // optional explicit Omega_2n; M_2n = (-1)^n Omega_2n
    std::string source;

    int n_max() const { return static_cast<int>(log_norms.size()); }
    Mat sign_corrected(int n) const;

    static MomentSequence drude_lorentz(double gamma, int n_max);
    static MomentSequence ohmic(double omega_c, int n_max);
    static MomentSequence bounded(double h_norm, double c, int n_max);
    static MomentSequence from_matrices(std::vector<Mat> omega, std::string source = "matrices");
    // Omega_2n = (-1)^n sum_k g_k^2 coth(beta w_k/2) w_k^{2n} for the discrete correlator.
    static MomentSequence from_modes(const std::vector<Mode>& modes, double beta, int n_max);

    MomentSequence scaled(double lambda) const;  // Omega_2n -> lambda^{2n} Omega_2n
};

enum class CarlemanClass { satisfied, marginal, undetermined };

std::string to_string(CarlemanClass c);

struct CarlemanReport {
    std::vector<double> terms;  // ||Omega_2n||^{-1/(2n)}
    std::vector<double> partial_sums;
    double slope = 0.0;
    double intercept = 0.0;
    CarlemanClass classification = CarlemanClass::undetermined;
    bool positivity_probed = false;
    bool positivity_ok = true;
    std::vector<std::string> warnings;
};

CarlemanReport carleman_classify(const MomentSequence& moments, BathKind kind, std::uint64_t seed = 1,
                                 int probes = 8);

}  // namespace nzkk
