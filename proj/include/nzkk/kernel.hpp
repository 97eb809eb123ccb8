// kernel.hpp: Born kernels, Volterra deconvolution, effective-kernel quotient, IBM check
#pragma once

#include "nzkk/core.hpp"
#include "nzkk/dynamics.hpp"
#include "nzkk/model.hpp"
#include "nzkk/series.hpp"

#include <functional>
#include <string>
#include <vector>

namespace nzkk {

using Correlation = std::function<cplx(double)>;

// prefactor * C(t) on the grid.
KernelSeries born_kernel(const BathCorrelatorPoles& poles, const TimeGrid& grid, cplx prefactor = 1.0);
KernelSeries born_kernel(const Correlation& c, const TimeGrid& grid, cplx prefactor = 1.0);

// Second-order superoperator kernel for H = H_s + S (x) B + H_b with <B(t)B> = C(t):
// K(t) rho = -[C (S X - X S) - C* (S Y - Y S)],  X = U S rho U^dag, Y = U rho S U^dag, U = exp(-i H_s t).
KernelSeries born_superoperator_kernel(const Correlation& c, const Mat& h_s, const Mat& s, const TimeGrid& grid);

// Scalar kernel acting on s_z in the Born proxy: -2 Re C(t).
KernelSeries born_proxy_kernel(const Correlation& c, const TimeGrid& grid);

enum class VolterraRule { left, trapezoid };

std::string to_string(VolterraRule r);
VolterraRule parse_volterra_rule(const std::string& s);

// finite_difference: f = dv/dt - L_s v with the dynamics-engine stencil.
// exact_step: L_s replaced by the one-step generator of e^{L_s t} matching the stencil at t_n,
// so homogeneous dynamics give f = 0 to rounding.
enum class ResidualScheme { finite_difference, exact_step };

struct ExtractionOptions {
    VolterraRule rule = VolterraRule::left;
    ResidualScheme residual = ResidualScheme::finite_difference;
    double condition_threshold = 1e10;
};

// trajectories[j][n] = v^(j)(t_n); solves f_n = sum_m K_m v_{n-m} dt, f per opts.residual.
KernelSeries extract_matrix_kernel(const std::vector<std::vector<Vec>>& trajectories, const TimeGrid& grid,
                                   const Mat& l_s, const ExtractionOptions& opts = {});
KernelSeries extract_matrix_kernel(const TrajectorySet& set, const Mat& l_s, const ExtractionOptions& opts = {});

struct ScalarExtraction {
    KernelSeries kernel;
    double sigma0_abs = 0.0;
    bool near_zero_denominator = false;  // |sigma(0)| below 1e-6
};

// Scalar channel: f = d sigma/dt - bare * sigma.
ScalarExtraction extract_scalar_kernel(const std::vector<cplx>& channel, const TimeGrid& grid, cplx bare,
                                       const ExtractionOptions& opts = {});

// Leapfrog integration of dv/dt = L v + sum_m K_m v_{n-m} dt, the exact discrete inverse of the
// extraction (centered differences, matching convolution rule).
std::vector<Vec> forward_volterra(const KernelSeries& k, const Mat& l, const Vec& v0,
                                  VolterraRule rule = VolterraRule::left,
                                  ResidualScheme scheme = ResidualScheme::finite_difference);
std::vector<cplx> forward_volterra_scalar(const KernelSeries& k, cplx bare, cplx sigma0,
                                          VolterraRule rule = VolterraRule::left,
                                          ResidualScheme scheme = ResidualScheme::finite_difference);

struct EffectiveKernelSlice {
    std::vector<double> omega;
    double eps = 0.0;
    bool matrix_mode = false;
    std::vector<Mat> values;
    std::vector<Mat> kernel;
    std::vector<Mat> inhomogeneous;
    std::vector<Mat> sigma;
    std::vector<bool> masked;
    std::size_t masked_count = 0;
};

// K_eff = K + I sigma^{-1}; scalar mode divides channelwise, matrix mode inverts the stacked sigma.
EffectiveKernelSlice effective_kernel(const LaplaceSlice& k, const LaplaceSlice& inhom, const LaplaceSlice& sigma,
                                      bool matrix_mode, double mask_threshold = 1e-10);
// Recombines the stored components with the same arithmetic; used as a bookkeeping audit.
std::vector<Mat> recombine(const EffectiveKernelSlice& s);

struct ZeroResidue {
    cplx zeta;
    cplx residue;
};

struct ZeroResidueSet {
    std::vector<ZeroResidue> entries;
};

// R_j = I1(zeta_j) / sigma0'(zeta_j); the derivative uses an imaginary-direction step h.
ZeroResidueSet zero_residues(const std::vector<cplx>& zetas, const std::function<cplx(cplx)>& inhom1,
                             const std::function<cplx(cplx)>& sigma0, double h = 1e-8);

// Delta(w) = 2 sum_j Re[R_j / (w - zeta_j)].
std::vector<double> modified_kk_correction(const ZeroResidueSet& zeros, const std::vector<double>& omega);

struct IbmReport {
    double eps_strength = 0.0;
    double shift = 0.0;
    double factorized_residual = 0.0;
    double perturbed_residual = 0.0;
    double broken_residual = 0.0;
    std::vector<double> omega;
    std::vector<cplx> factorized;
    std::vector<cplx> perturbed;
};

// Born correlator plus eps * sum_k c_k / (nu_k + shift - i w); the broken variant keeps only
// the real part of the perturbation.
IbmReport ibm_self_consistency(const BathSpec& bath, double eps_strength, const std::vector<double>& omega,
                               int matsubara_count = 4, double shift = 0.5);

}  // namespace nzkk
