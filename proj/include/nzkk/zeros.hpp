// zeros.hpp: zeros of finite-model reduced-state transforms in a complex rectangle
#pragma once

#include "nzkk/core.hpp"
#include "nzkk/dynamics.hpp"

#include <functional>
#include <string>
#include <vector>

namespace nzkk {

// f(z) = i sum_n a_n / (z - Omega_n)
struct PoleSum {
    std::vector<double> poles;
    std::vector<cplx> amplitudes;

    cplx operator()(cplx z) const;
    cplx derivative(cplx z) const;
    double weight() const;  // sum |a_n|
    double distance_to_pole(cplx z) const;

    // Sorts, merges poles closer than merge_tol and drops terms with |a| <= drop_tol * sum|a|.
    static PoleSum from_terms(const std::vector<double>& poles, const std::vector<cplx>& amps,
                              double merge_tol = 1e-9, double drop_tol = 1e-13);
};

// sum_ij w_ij sigma_ij(z) for the given joint initial state.
PoleSum channel_pole_sum(const ReducedResolvent& r, const Mat& weights, double merge_tol = 1e-9,
                         double drop_tol = 1e-13);
PoleSum channel_pole_sum(const ReducedResolvent& r, int i, int j, double merge_tol = 1e-9,
                         double drop_tol = 1e-13);

// Exact value; throws when z sits on a pole.
cplx sigma_channel_transform(const PoleSum& f, cplx z);

// Roots of the numerator polynomial sum_n a_n prod_{m != n} (z - Omega_m), without merging.
std::vector<cplx> numerator_roots(const PoleSum& f);

struct ScanRegion {
    double re_lo = 0.0;
    double re_hi = 3.0;
    double im_lo = -0.1;
    double im_hi = 0.6;
    int nx = 100;
    int ny = 60;

    bool contains(cplx z, double tol = 0.0) const {
        return z.real() >= re_lo - tol && z.real() <= re_hi + tol && z.imag() >= im_lo - tol &&
               z.imag() <= im_hi + tol;
    }
};

struct ScanOptions {
    int max_newton = 50;
    double residual_tol = 1e-10;
    double merge_tol = 1e-8;
    double uhp_tol = 1e-10;
    double pole_separation = 1e-6;
    int max_depth = 8;
};

struct ZeroRecord {
    cplx z;
    double residual = 0.0;
    int multiplicity = 1;
    bool converged = true;
    bool near_pole = false;
};

struct ZeroScanResult {
    std::vector<ZeroRecord> zeros;
    std::string channel;
    double coupling = 0.0;
    ScanRegion region;
    std::size_t total_count = 0;
    std::size_t uhp_count = 0;
    double uhp_fraction = 0.0;
    double max_uhp_imag = 0.0;
    std::size_t cells_with_zeros = 0;
    std::size_t audit_mismatches = 0;
    std::size_t nonconverged = 0;
    std::size_t near_pole = 0;       // includes unconverged candidates next to a pole
    double max_pair_residual = 0.0;  // max |f(-conj zeta)| over reported zeros
    double grid_shift = 0.0;         // fraction of a cell the grid was moved off poles
};

ZeroScanResult scan_zeros(const PoleSum& f, const ScanRegion& region, const ScanOptions& opts = {},
                          const std::string& channel = {}, double coupling = 0.0);

std::vector<ZeroScanResult> sweep(const std::function<PoleSum(double)>& build, const std::vector<double>& couplings,
                                  const ScanRegion& region, const ScanOptions& opts = {},
                                  const std::string& channel = {});

struct AnchorResult {
    double g = 0.0;
    std::vector<cplx> zeros;
    double expected = 0.0;  // g sqrt 2
    double max_error = 0.0;
    int multiplicity = 1;
    bool cluster = false;
    bool cancellation = false;  // zero cluster sits on a pole
    std::size_t audit_mismatches = 0;
};

// JC, N_max = 1, omega_0 = omega_c = 1, channel ee with |e><e| x vacuum.
AnchorResult jc_analytic_anchor(double g, const ScanRegion& region = {-3.0, 3.0, -1.0, 1.0, 60, 20},
                                const ScanOptions& opts = {});

}  // namespace nzkk
