// spectral.cpp
#include "nzkk/spectral.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <fftw3.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <sstream>

namespace nzkk {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// In-place DFT; sign = FFTW_FORWARD (exp(-i...)) or FFTW_BACKWARD (exp(+i...)), unnormalized.
void dft(std::vector<cplx>& data, int sign) {
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(data.size()), p, p, sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
}

// Signed frequency index of DFT bin k (numpy fftfreq convention).
long signed_bin(std::size_t k, std::size_t n) {
    return k < (n + 1) / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
}

std::vector<std::size_t> sorted_bins(std::size_t n) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [n](std::size_t a, std::size_t b) { return signed_bin(a, n) < signed_bin(b, n); });
    return order;
}

std::vector<double> quadrature_weights(std::size_t n, double dt, QuadratureRule rule) {
    std::vector<double> w(n, dt);
    switch (rule) {
        case QuadratureRule::left:
            break;
        case QuadratureRule::trapezoid:
            w.front() = w.back() = 0.5 * dt;
            break;
        case QuadratureRule::gregory: {
            require(n >= 8, ErrorKind::invalid_argument, "Gregory rule needs at least 8 samples");
            const double c[3] = {3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0};
            for (int k = 0; k < 3; ++k) {
                w[k] = c[k] * dt;
                w[n - 1 - k] = c[k] * dt;
            }
            break;
        }
    }
    return w;
}

double tail_estimate(const KernelSeries& s, double eps) {
    const double t_last = s.grid.t(s.size() - 1);
    const double f_last = op_norm(s.values.back());
    return f_last * std::exp(-eps * t_last) / std::max(eps, 1.0 / std::max(t_last, 1e-300));
}

}  // namespace

std::string to_string(QuadratureRule r) {
    switch (r) {
        case QuadratureRule::trapezoid: return "trapezoid";
        case QuadratureRule::left: return "left";
        case QuadratureRule::gregory: return "gregory";
    }
    return "?";
}

QuadratureRule parse_quadrature_rule(const std::string& s) {
    if (s == "trapezoid") return QuadratureRule::trapezoid;
    if (s == "left") return QuadratureRule::left;
    if (s == "gregory") return QuadratureRule::gregory;
    fail(ErrorKind::validation, "unknown quadrature rule '" + s + "'");
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t n, bool endpoint) {
    require(n >= 2 && hi > lo, ErrorKind::invalid_argument, "uniform grid needs n >= 2 and hi > lo");
    const double h = (hi - lo) / static_cast<double>(endpoint ? n - 1 : n);
    std::vector<double> w(n);
    for (std::size_t k = 0; k < n; ++k) w[k] = lo + h * static_cast<double>(k);
    return w;
}

LaplaceSlice laplace_shifted(const KernelSeries& series, double eps, const std::vector<double>& omega,
                             QuadratureRule rule) {
    require(eps >= 0.0, ErrorKind::invalid_argument, "laplace shift must be >= 0");
    require(series.size() >= 2, ErrorKind::invalid_argument, "Laplace transform needs at least 2 samples");
    const std::size_t n = series.size();
    const auto w = quadrature_weights(n, series.grid.dt, rule);
    LaplaceSlice out;
    out.omega = omega;
    out.eps = eps;
    out.source = "laplace:" + to_string(rule) + (series.channel_label.empty() ? "" : ":" + series.channel_label);
    out.values.assign(omega.size(), Mat::Zero(series.m(), series.m()));
    out.tail_estimate = tail_estimate(series, eps);
    parallel_for(omega.size(), [&](std::size_t k) {
        const cplx z(omega[k], eps);
        Mat acc = Mat::Zero(series.m(), series.m());
        for (std::size_t j = 0; j < n; ++j) acc += (w[j] * std::exp(I * z * series.grid.t(j))) * series.values[j];
        out.values[k] = acc;
    });
    return out;
}

std::vector<double> fft_frequency_grid(std::size_t n, double dt) {
    const auto order = sorted_bins(n);
    std::vector<double> w(n);
    for (std::size_t p = 0; p < n; ++p)
        w[p] = 2.0 * kPi * static_cast<double>(signed_bin(order[p], n)) / (static_cast<double>(n) * dt);
    return w;
}

LaplaceSlice laplace_fft(const KernelSeries& series, double eps) {
    require(eps >= 0.0, ErrorKind::invalid_argument, "laplace shift must be >= 0");
    const std::size_t n = series.size();
    require(n >= 2, ErrorKind::invalid_argument, "Laplace transform needs at least 2 samples");
    const int m = series.m();
    const double dt = series.grid.dt;
    const auto order = sorted_bins(n);
    LaplaceSlice out;
    out.omega = fft_frequency_grid(n, dt);
    out.eps = eps;
    out.source = "laplace:left:fft" + (series.channel_label.empty() ? "" : ":" + series.channel_label);
    out.values.assign(n, Mat::Zero(m, m));
    out.tail_estimate = tail_estimate(series, eps);
    std::vector<double> damp(n);
    for (std::size_t j = 0; j < n; ++j) damp[j] = std::exp(-eps * series.grid.t(j));
    parallel_for(static_cast<std::size_t>(m * m), [&](std::size_t e) {
        const int r = static_cast<int>(e) % m;
        const int c = static_cast<int>(e) / m;
        std::vector<cplx> buf(n);
        for (std::size_t j = 0; j < n; ++j) buf[j] = series.values[j](r, c) * damp[j];
        dft(buf, FFTW_BACKWARD);
        for (std::size_t p = 0; p < n; ++p) out.values[p](r, c) = dt * buf[order[p]];
    });
    return out;
}

std::vector<double> hilbert_circular(const std::vector<double>& x) {
    const std::size_t n = x.size();
    require(n >= 2 && n % 2 == 0, ErrorKind::invalid_argument, "circular Hilbert transform needs an even length");
    std::vector<cplx> buf(x.begin(), x.end());
    dft(buf, FFTW_FORWARD);
    for (std::size_t k = 0; k < n; ++k) {
        const long s = signed_bin(k, n);
        if (k == 0 || k == n / 2)
            buf[k] = 0.0;
        else
            buf[k] *= s > 0 ? -I : I;
    }
    dft(buf, FFTW_BACKWARD);
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = buf[k].real() / static_cast<double>(n);
    return out;
}

std::vector<double> hilbert_tapered(const std::vector<double>& x, double taper_fraction) {
    const std::size_t n = x.size();
    require(n >= 2 && n % 2 == 0, ErrorKind::invalid_argument, "tapered Hilbert transform needs an even length");
    require(taper_fraction > 0.0 && taper_fraction < 0.5, ErrorKind::invalid_argument,
            "taper fraction must lie in (0, 0.5)");
    const auto nt = static_cast<std::size_t>(std::ceil(taper_fraction * static_cast<double>(n)));
    std::vector<double> padded(2 * n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double w = 1.0;
        if (k < nt) w = 0.5 * (1.0 - std::cos(kPi * static_cast<double>(k) / static_cast<double>(nt)));
        if (n - 1 - k < nt)
            w = 0.5 * (1.0 - std::cos(kPi * static_cast<double>(n - 1 - k) / static_cast<double>(nt)));
        padded[k] = w * x[k];
    }
    auto h = hilbert_circular(padded);
    h.resize(n);
    return h;
}

const KKChannel& KKReport::channel(int row, int col) const {
    for (const auto& c : channels)
        if (c.row == row && c.col == col) return c;
    fail(ErrorKind::invalid_argument, "KK report has no such channel");
}

std::string kk_verdict(double residual, double floor) {
    if (residual <= floor) return "consistent";
    if (residual >= 3.0 * floor) return "violation";
    return "inconclusive";
}

KKReport kk_residual(const LaplaceSlice& slice, double lo, double hi, double floor, HilbertMode mode) {
    const std::size_t n = slice.size();
    require(n >= 2 && slice.values.size() == n, ErrorKind::dimension, "KK: malformed slice");
    require(lo < hi && slice.omega.front() <= lo && slice.omega.back() >= hi, ErrorKind::invalid_argument,
            "KK window lies outside the frequency grid");
    const int m = slice.m();
    const double dw = slice.d_omega();

    std::vector<std::size_t> win;
    for (std::size_t k = 0; k < n; ++k)
        if (slice.omega[k] > lo && slice.omega[k] < hi) win.push_back(k);
    require(!win.empty(), ErrorKind::invalid_argument, "KK window contains no grid points");

    KKReport rep;
    rep.eps = slice.eps;
    rep.window_lo = lo;
    rep.window_hi = hi;
    rep.noise_floor = floor;
    rep.mode = mode == HilbertMode::circular ? "circular" : "tapered";
    rep.omega.reserve(win.size());
    for (auto k : win) rep.omega.push_back(slice.omega[k]);
    rep.real_part.assign(win.size(), RMat::Zero(m, m).cast<cplx>());
    rep.hilbert_part.assign(win.size(), RMat::Zero(m, m).cast<cplx>());

    std::vector<KKChannel> chans(static_cast<std::size_t>(m * m));
    parallel_for(chans.size(), [&](std::size_t e) {
        const int r = static_cast<int>(e) / m;
        const int c = static_cast<int>(e) % m;
        std::vector<double> re(n), im(n);
        for (std::size_t k = 0; k < n; ++k) {
            re[k] = slice.values[k](r, c).real();
            im[k] = slice.values[k](r, c).imag();
        }
        const auto h = mode == HilbertMode::circular ? hilbert_circular(im) : hilbert_tapered(im);
        double a = 0.0, b = 0.0;
        for (std::size_t q = 0; q < win.size(); ++q) {
            const std::size_t k = win[q];
            const double res = re[k] + h[k];
            a += res * res;
            b += re[k] * re[k];
            rep.real_part[q](r, c) = re[k];
            rep.hilbert_part[q](r, c) = -h[k];
        }
        KKChannel ch;
        ch.row = r;
        ch.col = c;
        ch.label = m == 4 ? channel_label(r, c) : (m == 1 ? std::string("scalar") : std::to_string(r) + "," + std::to_string(c));
        ch.abs_l2 = std::sqrt(a * dw);
        ch.weight_l2 = std::sqrt(b * dw);
        ch.rel_l2 = ch.weight_l2 > 0.0 ? ch.abs_l2 / ch.weight_l2 : (ch.abs_l2 > 0.0 ? INFINITY : 0.0);
        chans[e] = ch;
    });
    double max_weight = 0.0;
    for (const auto& c : chans) max_weight = std::max(max_weight, c.weight_l2);
    for (auto& c : chans) {
        c.empty = c.weight_l2 <= 1e-12 * max_weight;
        c.low_weight = !c.empty && c.rel_l2 > 0.5 && c.weight_l2 < 0.1 * max_weight;
    }
    rep.channels = std::move(chans);

    double num = 0.0, den = 0.0;
    rep.op_residual.resize(win.size());
    for (std::size_t q = 0; q < win.size(); ++q) {
        const Mat res = rep.real_part[q] - rep.hilbert_part[q];
        rep.op_residual[q] = op_norm(res);
        const double rn = op_norm(rep.real_part[q]);
        num += rep.op_residual[q] * rep.op_residual[q];
        den += rn * rn;
    }
    rep.integrated_relative = den > 0.0 ? std::sqrt(num / den) : (num > 0.0 ? INFINITY : 0.0);
    rep.verdict = kk_verdict(rep.integrated_relative, floor);
    return rep;
}

KKReport kk_subtracted(const LaplaceSlice& slice, double omega_star, double lo, double hi, double floor,
                       double value_cap, HilbertMode mode) {
    require(omega_star > lo && omega_star < hi, ErrorKind::invalid_argument,
            "subtraction point must lie inside the window");
    const double dw = slice.d_omega();
    for (double s : slice.singular_frequencies) {
        if (std::abs(omega_star - s) < 2.0 * dw) {
            std::ostringstream os;
            os << "subtraction point " << omega_star << " lies at a threshold singularity (" << s << ")";
            fail(ErrorKind::invalid_argument, os.str());
        }
    }
    std::size_t s = 0;
    for (std::size_t k = 1; k < slice.size(); ++k)
        if (std::abs(slice.omega[k] - omega_star) < std::abs(slice.omega[s] - omega_star)) s = k;
    const Mat f_star = slice.values[s];
    const double mag = op_norm(f_star);
    if (!std::isfinite(mag) || mag > value_cap) {
        std::ostringstream os;
        os << "boundary value at subtraction point " << omega_star << " is not finite (|F| = " << mag << ")";
        fail(ErrorKind::invalid_argument, os.str());
    }
    LaplaceSlice g = slice;
    g.source = slice.source + ":subtracted";
    for (std::size_t k = 0; k < slice.size(); ++k)
        if (k != s) g.values[k] = (slice.values[k] - f_star) / (slice.omega[k] - slice.omega[s]);
    // removable point: G(w*) = F'(w*)
    const std::size_t a = s > 0 ? s - 1 : s, b = s + 1 < slice.size() ? s + 1 : s;
    g.values[s] = (slice.values[b] - slice.values[a]) / (slice.omega[b] - slice.omega[a]);
    auto rep = kk_residual(g, lo, hi, floor, mode);
    rep.subtracted = true;
    rep.subtraction_point = slice.omega[s];
    return rep;
}

NoiseFloorReport calibrate_noise_floor(const TimeGrid& grid, double eps, double lo, double hi,
                                       const std::vector<int>& sizes) {
    grid.check();
    require(!sizes.empty(), ErrorKind::invalid_argument, "noise-floor bank is empty");
    NoiseFloorReport rep;
    std::ostringstream bank;
    bank << "sum_j i/(z-p_j), p_j = lo+(j+1/2)(hi-lo)/M - i(hi-lo), M in {";
    for (std::size_t q = 0; q < sizes.size(); ++q) bank << (q ? "," : "") << sizes[q];
    bank << "}, window (" << lo << ", " << hi << "), eps " << eps << ", laplace left/fft, hilbert circular";
    rep.bank = bank.str();
    rep.members.resize(sizes.size());
    for (std::size_t q = 0; q < sizes.size(); ++q) {
        const int msize = sizes[q];
        require(msize >= 1, ErrorKind::invalid_argument, "bank member needs at least one pole");
        std::vector<cplx> f(grid.n_steps, 0.0);
        const double width = hi - lo;
        for (int j = 0; j < msize; ++j) {
            const cplx p(lo + (j + 0.5) * width / msize, -width);
            for (std::size_t n = 0; n < grid.n_steps; ++n) f[n] += std::exp(-I * p * grid.t(n));
        }
        const auto slice = laplace_fft(KernelSeries::from_scalar(grid, f, "bank"), eps);
        rep.members[q] = kk_residual(slice, lo, hi, 0.0).integrated_relative;
    }
    rep.floor = *std::max_element(rep.members.begin(), rep.members.end());
    return rep;
}

PassivityReport passivity_audit(const LaplaceSlice& slice, const std::vector<Vec>& probes, double tol) {
    PassivityReport rep;
    rep.min_margin = INFINITY;
    rep.onset = NAN;
    double scale = 1.0;
    for (const auto& v : slice.values) scale = std::max(scale, op_norm(v));
    rep.tolerance = tol * scale;
    for (std::size_t k = 0; k < slice.size(); ++k) {
        const Mat& kv = slice.values[k];
        double margin;
        if (probes.empty()) {
            const Mat herm = (kv - kv.adjoint()) / (2.0 * I);
            Eigen::SelfAdjointEigenSolver<Mat> es(-herm, Eigen::EigenvaluesOnly);
            margin = es.eigenvalues().minCoeff();
        } else {
            margin = INFINITY;
            for (const auto& xi : probes) {
                const Vec u = xi / xi.norm();
                margin = std::min(margin, -u.dot(kv * u).imag());
            }
        }
        if (margin < rep.min_margin) {
            rep.min_margin = margin;
            rep.omega_at_min = slice.omega[k];
        }
        if (margin < -rep.tolerance && std::isnan(rep.onset)) rep.onset = slice.omega[k];
    }
    if (slice.size() == 0) rep.min_margin = 0.0;
    rep.pass = rep.min_margin >= -rep.tolerance;
    return rep;
}

LaplaceSlice correlator_slice(const BathCorrelatorPoles& poles, const std::vector<double>& omega,
                              bool dissipative_only) {
    std::vector<cplx> v(omega.size());
    for (std::size_t k = 0; k < omega.size(); ++k)
        v[k] = dissipative_only ? poles.dissipative_transform(omega[k]) : poles.transform(omega[k]);
    return LaplaceSlice::from_scalar(omega, 0.0, v, dissipative_only ? "correlator:dissipative" : "correlator");
}

std::vector<double> pole_kk_residual(const std::vector<CorrelatorPole>& poles, const std::vector<double>& omega) {
    std::vector<double> out(omega.size(), 0.0);
    for (std::size_t k = 0; k < omega.size(); ++k) {
        double s = 0.0;
        for (const auto& p : poles) {
            // c / (nu - i w) with nu = a + i b: denominator a - i (w - b)
            const double a = p.rate.real();
            const double x = omega[k] - p.rate.imag();
            const double den = a * a + x * x;
            const double re = (p.amplitude.real() * a - p.amplitude.imag() * x) / den;
            const double h_im = (p.amplitude.imag() * x - p.amplitude.real() * a) / den;
            s += re + h_im;
        }
        out[k] = s;
    }
    return out;
}

LaplaceSlice sub_ohmic_born_slice(const BathSpec& bath, const std::vector<double>& omega, double eps) {
    require(bath.kind == BathKind::sub_ohmic, ErrorKind::model_mismatch, "sub-Ohmic slice needs a sub-Ohmic bath");
    require(eps > 0.0, ErrorKind::invalid_argument, "sub-Ohmic slice needs eps > 0");
    require(bath.beta > 0.0, ErrorKind::invalid_argument, "sub-Ohmic slice needs beta > 0");
    bath.validate();
    const double beta = bath.beta;
    // S on w > 0 (emission) and on w < 0 (absorption), both as functions of |w|
    auto s_pos = [&](double w) { return 2.0 * spectral_density(bath, w) / -std::expm1(-beta * w); };
    auto s_neg = [&](double w) { return 2.0 * spectral_density(bath, w) / std::expm1(beta * w); };
    std::vector<cplx> v(omega.size());
    parallel_for(omega.size(), [&](std::size_t k) {
        boost::math::quadrature::tanh_sinh<double> ts;
        const cplx z(omega[k], eps);
        auto part = [&](auto&& sfun, double sign) {
            // int_0^inf S(u) i / (z - sign*u) du, split at the near-resonant point
            auto re = [&](double u) { return (sfun(u) * I / (z - sign * u)).real(); };
            auto im = [&](double u) { return (sfun(u) * I / (z - sign * u)).imag(); };
            const double split = std::max(std::abs(omega[k]), 10.0 * eps);
            const double r = ts.integrate(re, 0.0, split) + ts.integrate(re, split, INFINITY);
            const double i = ts.integrate(im, 0.0, split) + ts.integrate(im, split, INFINITY);
            return cplx(r, i);
        };
        v[k] = (part(s_pos, 1.0) + part(s_neg, -1.0)) / (2.0 * kPi);
    });
    auto s = LaplaceSlice::from_scalar(omega, eps, v, "born:sub-ohmic");
    s.singular_frequencies = {0.0};
    return s;
}

}  // namespace nzkk
