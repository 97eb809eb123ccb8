// spectral.hpp: shifted-line Laplace transforms, FFT Hilbert transform, KK and passivity audits
#pragma once

#include "nzkk/core.hpp"
#include "nzkk/model.hpp"
#include "nzkk/series.hpp"

#include <string>
#include <vector>

namespace nzkk {

enum class QuadratureRule { trapezoid, left, gregory };

std::string to_string(QuadratureRule r);
QuadratureRule parse_quadrature_rule(const std::string& s);

// f~(w + i eps) = int_0^tmax f(t) exp(i (w + i eps) t) dt on an arbitrary frequency grid.
LaplaceSlice laplace_shifted(const KernelSeries& series, double eps, const std::vector<double>& omega,
                             QuadratureRule rule = QuadratureRule::trapezoid);

// Left-endpoint sum evaluated on the FFT-native grid w_k = 2 pi k / (N dt), sorted ascending.
LaplaceSlice laplace_fft(const KernelSeries& series, double eps);
std::vector<double> fft_frequency_grid(std::size_t n, double dt);

// Standard discrete Hilbert transform: multiplier -i sgn(k), zero at DC and Nyquist (cos -> sin).
std::vector<double> hilbert_circular(const std::vector<double>& x);
// Cosine taper over the outer fraction of the grid at each end, zero-padded to twice the length.
std::vector<double> hilbert_tapered(const std::vector<double>& x, double taper_fraction = 0.1);

enum class HilbertMode { circular, tapered };

struct KKChannel {
    int row = 0;
    int col = 0;
    std::string label;
    double abs_l2 = 0.0;     // sqrt(sum r^2 dw) over the window
    double weight_l2 = 0.0;  // same norm of Re
    double rel_l2 = 0.0;
    bool empty = false;       // no in-window weight at all
    bool low_weight = false;  // large relative residual carried by negligible weight
};

struct KKReport {
    double eps = 0.0;
    double window_lo = 0.0;
    double window_hi = 0.0;
    std::vector<KKChannel> channels;
    std::vector<double> omega;            // in-window grid
    std::vector<Mat> real_part;           // Re K~ per in-window point
    std::vector<Mat> hilbert_part;        // -H[Im K~]; equals Re K~ when KK holds
    std::vector<double> op_residual;      // ||Re K~ + H[Im K~]||_op
    double integrated_relative = 0.0;
    double noise_floor = 0.0;
    std::string floor_bank;
    std::string verdict;
    std::string mode = "circular";
    double subtraction_point = 0.0;
    bool subtracted = false;

    const KKChannel& channel(int row, int col) const;
};

std::string kk_verdict(double residual, double floor);

// Residual Re - H_KK[Im] with H_KK = -H_std, i.e. Re + H_std[Im].
KKReport kk_residual(const LaplaceSlice& slice, double lo, double hi, double floor,
                     HilbertMode mode = HilbertMode::circular);

// Once-subtracted check on G(w) = (F(w) - F(w*)) / (w - w*); w* snaps to the nearest grid node,
// where G takes the difference quotient F'(w*). Rejects w* near a singular frequency or where |F(w*)| exceeds the cap.
KKReport kk_subtracted(const LaplaceSlice& slice, double omega_star, double lo, double hi, double floor,
                       double value_cap = 1e6, HilbertMode mode = HilbertMode::circular);

struct NoiseFloorReport {
    double floor = 0.0;
    std::vector<double> members;  // integrated relative residual per bank member
    std::string bank;
};

// Bank: for M in sizes, sum_j i/(z - p_j), p_j = lo + (j + 1/2)(hi - lo)/M - i (hi - lo),
// pushed through the identical Laplace (left rule, FFT grid) + circular Hilbert pipeline.
NoiseFloorReport calibrate_noise_floor(const TimeGrid& grid, double eps, double lo, double hi,
                                       const std::vector<int>& sizes = {2, 3, 4});

struct PassivityReport {
    double min_margin = 0.0;   // min of -Im <xi, K xi>
    double omega_at_min = 0.0;
    double onset = 0.0;        // first grid frequency with a violation (NaN if none)
    double tolerance = 0.0;
    bool pass = true;
};

PassivityReport passivity_audit(const LaplaceSlice& slice, const std::vector<Vec>& probes = {},
                                double tol = 1e-10);

// Correlator transform C~(w) = sum c/(nu - i w) on the real line.
LaplaceSlice correlator_slice(const BathCorrelatorPoles& poles, const std::vector<double>& omega,
                              bool dissipative_only = false);

// Re T + H_std[Im T] summed term by term with the closed-form Hilbert pair of each pole.
std::vector<double> pole_kk_residual(const std::vector<CorrelatorPole>& poles, const std::vector<double>& omega);

// Born-order sub-Ohmic correlator transform at w + i eps:
// (1/2pi) int S(w') i/(z - w') dw',  S(w) = 2 J(|w|) (n(|w|) + [w > 0]).
LaplaceSlice sub_ohmic_born_slice(const BathSpec& bath, const std::vector<double>& omega, double eps);

std::vector<double> uniform_grid(double lo, double hi, std::size_t n, bool endpoint = false);

}  // namespace nzkk
