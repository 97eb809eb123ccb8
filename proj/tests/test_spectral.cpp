#include "nzkk/dynamics.hpp"
#include "nzkk/spectral.hpp"

#include <Eigen/SVD>

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <functional>
#include <random>

using namespace nzkk;

namespace {

KernelSeries sampled(const TimeGrid& grid, const std::function<cplx(double)>& f) {
    std::vector<cplx> v(grid.n_steps);
    for (std::size_t n = 0; n < grid.n_steps; ++n) v[n] = f(grid.t(n));
    return KernelSeries::from_scalar(grid, v);
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double w = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) w = std::max(w, std::abs(a[k] - b[k]));
    return w;
}

// sum_j i / (w - p_j), poles below the real axis: analytic in the upper half plane
LaplaceSlice hardy_slice(const std::vector<double>& omega, const std::vector<cplx>& poles) {
    std::vector<cplx> v;
    for (double w : omega) {
        cplx s = 0.0;
        for (const cplx& p : poles) s += I / (w - p);
        v.push_back(s);
    }
    return LaplaceSlice::from_scalar(omega, 0.0, v, "hardy");
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("Laplace transform of closed-form series") {
    const auto omega = uniform_grid(-3.0, 3.0, 121, true);

    const TimeGrid g1{0.01, 4001};
    const auto e = laplace_shifted(sampled(g1, [](double t) { return std::exp(-t); }), 0.0, omega,
                                   QuadratureRule::gregory);
    double worst = 0.0;
    for (std::size_t k = 0; k < omega.size(); ++k)
        worst = std::max(worst, std::abs(e.values[k](0, 0) - 1.0 / (1.0 - I * omega[k])));
    MESSAGE("exp(-t), eps=0: max error " << worst);
    CHECK(worst < 1e-6);

    const TimeGrid g2{0.01, 6001};
    const double eps = 0.3;
    const auto c = laplace_shifted(sampled(g2, [](double) { return cplx(1.0); }), eps, omega,
                                   QuadratureRule::gregory);
    worst = 0.0;
    for (std::size_t k = 0; k < omega.size(); ++k)
        worst = std::max(worst, std::abs(c.values[k](0, 0) - 1.0 / (eps - I * omega[k])));
    MESSAGE("constant, eps=0.3: max error " << worst);
    CHECK(worst < 1e-4);

    const auto z = laplace_shifted(sampled(g1, [](double) { return cplx(0.0); }), 0.3, omega);
    for (const auto& m : z.values) CHECK(m.norm() == 0.0);
}

TEST_CASE("Laplace transforms are linear") {
    const TimeGrid grid{0.02, 2000};
    const auto a = sampled(grid, [](double t) { return std::exp(cplx(-0.4, 1.3) * t); });
    const auto b = sampled(grid, [](double t) { return std::cos(2.0 * t) * std::exp(-0.1 * t); });
    const cplx alpha(0.7, -0.2);
    KernelSeries c = a;
    for (std::size_t n = 0; n < grid.n_steps; ++n) c.values[n] = alpha * a.values[n] + b.values[n];
    const auto omega = uniform_grid(-2.0, 2.0, 81, true);
    for (auto rule : {QuadratureRule::trapezoid, QuadratureRule::left, QuadratureRule::gregory}) {
        const auto la = laplace_shifted(a, 0.2, omega, rule);
        const auto lb = laplace_shifted(b, 0.2, omega, rule);
        const auto lc = laplace_shifted(c, 0.2, omega, rule);
        for (std::size_t k = 0; k < omega.size(); ++k)
            CHECK(std::abs(lc.values[k](0, 0) - alpha * la.values[k](0, 0) - lb.values[k](0, 0)) < 1e-12);
    }
    const auto fa = laplace_fft(a, 0.2);
    const auto fb = laplace_fft(b, 0.2);
    const auto fc = laplace_fft(c, 0.2);
    for (std::size_t k = 0; k < fa.size(); ++k)
        CHECK(std::abs(fc.values[k](0, 0) - alpha * fa.values[k](0, 0) - fb.values[k](0, 0)) < 1e-11);
}

TEST_CASE("FFT Laplace agrees with direct left-rule sums") {
    const TimeGrid grid{0.05, 256};
    const auto s = sampled(grid, [](double t) { return std::exp(cplx(-0.3, 0.8) * t); });
    const auto f = laplace_fft(s, 0.25);
    const auto d = laplace_shifted(s, 0.25, f.omega, QuadratureRule::left);
    REQUIRE(f.size() == grid.n_steps);
    for (std::size_t k = 0; k < f.size(); ++k) CHECK(std::abs(f.values[k](0, 0) - d.values[k](0, 0)) < 1e-11);
}

TEST_CASE("circular Hilbert transform: eigenpair, DC, Lorentzian pair") {
    const std::size_t n = 512;
    std::vector<double> c(n), s(n), one(n, 2.5);
    for (std::size_t k = 0; k < n; ++k) {
        const double x = 2.0 * kPi * 7.0 * k / n;
        c[k] = std::cos(x);
        s[k] = std::sin(x);
    }
    CHECK(max_abs_diff(hilbert_circular(c), s) < 1e-10);
    for (double v : hilbert_circular(one)) CHECK(std::abs(v) < 1e-12);

    const double a = 0.5, gam = 1.0;
    const auto x = uniform_grid(-200.0, 200.0, 16384);
    std::vector<double> im, re;
    for (double xi : x) {
        const double d = (xi - a) * (xi - a) + gam * gam;
        im.push_back(-gam / d);
        re.push_back((xi - a) / d);
    }
    // H_KK[Im] = -H_std[Im] should reproduce the real part
    const auto h = hilbert_circular(im);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        num += std::pow(-h[k] - re[k], 2);
        den += re[k] * re[k];
    }
    const double rel = std::sqrt(num / den);
    MESSAGE("Lorentzian pair relative L2 error " << rel);
    CHECK(rel < 0.05);
}

TEST_CASE("Hilbert transform is anti-involutive and linear") {
    std::mt19937_64 rng(41);
    std::normal_distribution<double> nd;
    const std::size_t n = 1024;
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> f(n, 0.0), g(n, 0.0);
        for (int m = 1; m <= 40; ++m) {
            const double ac = nd(rng), as = nd(rng), bc = nd(rng);
            for (std::size_t k = 0; k < n; ++k) {
                const double x = 2.0 * kPi * m * k / n;
                f[k] += ac * std::cos(x) + as * std::sin(x);
                g[k] += bc * std::sin(x);
            }
        }
        const auto hh = hilbert_circular(hilbert_circular(f));
        std::vector<double> neg(n);
        for (std::size_t k = 0; k < n; ++k) neg[k] = -f[k];
        CHECK(max_abs_diff(hh, neg) < 1e-10);

        std::vector<double> mix(n);
        for (std::size_t k = 0; k < n; ++k) mix[k] = 0.3 * f[k] - 2.0 * g[k];
        const auto hm = hilbert_circular(mix);
        const auto hf = hilbert_circular(f);
        const auto hg = hilbert_circular(g);
        for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(hm[k] - 0.3 * hf[k] + 2.0 * hg[k]) < 1e-10);
    }
}

TEST_CASE("noise floor: reference grid band, refinement, reproducibility") {
    const TimeGrid grid{0.015, 4000};
    const auto a = calibrate_noise_floor(grid, 0.3, 0.05, 3.0);
    MESSAGE("floor " << a.floor << " (" << a.bank << ")");
    CHECK(a.floor >= 0.03);
    CHECK(a.floor <= 0.08);
    const auto b = calibrate_noise_floor(grid, 0.3, 0.05, 3.0);
    CHECK(same_bits(a.floor, b.floor));
    CHECK(a.bank == b.bank);

    const double t_max = 60.0;
    double prev = INFINITY;
    for (std::size_t ns : {4000u, 8000u, 16000u}) {
        const double f = calibrate_noise_floor(TimeGrid{t_max / ns, ns}, 0.3, 0.05, 3.0).floor;
        CHECK(f < prev);
        prev = f;
    }
}

TEST_CASE("KK residual: Hardy function consistent, reports bit-identical") {
    const auto omega = uniform_grid(-40.0, 40.0, 8192);
    const auto slice = hardy_slice(omega, {cplx(0.7, -0.6), cplx(2.0, -1.1)});
    const auto r1 = kk_residual(slice, 0.05, 3.0, 0.05);
    const auto r2 = kk_residual(slice, 0.05, 3.0, 0.05);
    MESSAGE("Hardy residual " << r1.integrated_relative);
    CHECK(r1.integrated_relative < 0.05);
    CHECK(r1.verdict == kk_verdict(r1.integrated_relative, 0.05));
    CHECK(same_bits(r1.integrated_relative, r2.integrated_relative));
    REQUIRE(r1.op_residual.size() == r2.op_residual.size());
    for (std::size_t k = 0; k < r1.op_residual.size(); ++k) CHECK(same_bits(r1.op_residual[k], r2.op_residual[k]));

    // conjugate (pole above the axis): not analytic in the upper half plane
    std::vector<cplx> bad;
    for (const auto& m : slice.values) bad.push_back(std::conj(m(0, 0)));
    const auto rb = kk_residual(LaplaceSlice::from_scalar(omega, 0.0, bad), 0.05, 3.0, 0.05);
    CHECK(rb.integrated_relative > 0.5);
}

TEST_CASE("subtracted KK: Hardy agreement and threshold rejection") {
    const auto omega = uniform_grid(-40.0, 40.0, 8192);
    const auto slice = hardy_slice(omega, {cplx(0.7, -0.6), cplx(2.0, -1.1)});
    const double floor = 0.05;
    const auto plain = kk_residual(slice, 0.05, 3.0, floor);
    for (double ws : {0.5, 1.3, 2.4}) {
        const auto sub = kk_subtracted(slice, ws, 0.05, 3.0, floor);
        CHECK(sub.subtracted);
        CHECK(std::abs(sub.integrated_relative - plain.integrated_relative) <= floor);
    }

    const auto so = BathSpec::sub_ohmic(0.1, 5.0, 0.5, 1.0);
    const auto born = sub_ohmic_born_slice(so, uniform_grid(-10.0, 10.0, 800), 0.05);
    CHECK_THROWS_WITH_AS(kk_subtracted(born, 0.0, -8.0, 8.0, floor), doctest::Contains("threshold singularity"), Error);
    const auto ok = kk_subtracted(born, 5.0, -8.0, 8.0, floor);
    CHECK(std::isfinite(ok.integrated_relative));
}

TEST_CASE("passivity audit") {
    const auto pos = uniform_grid(0.01, 100.0, 4000, true);
    const auto dl = bath_correlator_poles(BathSpec::drude_lorentz(0.25, 5.0, 1.0), 4);

    const auto full = passivity_audit(correlator_slice(dl, pos));
    MESSAGE("Drude-Lorentz, 4 Matsubara terms: min margin " << full.min_margin << ", onset " << full.onset);
    CHECK(full.pass);
    CHECK(passivity_audit(correlator_slice(dl, pos, true)).pass);

    const auto zero = passivity_audit(LaplaceSlice::from_scalar(pos, 0.0, std::vector<cplx>(pos.size(), 0.0)));
    CHECK(zero.pass);
    CHECK(zero.min_margin == 0.0);

    auto flipped = correlator_slice(dl, pos, true);
    for (auto& m : flipped.values) m = -m;
    CHECK_FALSE(passivity_audit(flipped).pass);

    // matrix slice with probes: -Im of a dissipative generator vs its negative
    std::vector<Mat> gen(pos.size(), Mat::Zero(2, 2));
    for (std::size_t k = 0; k < pos.size(); ++k) gen[k].diagonal() << cplx(0.0, -1.0 / (1.0 + pos[k])), cplx(0.0, -0.5);
    LaplaceSlice ms;
    ms.omega = pos;
    ms.values = gen;
    CHECK(passivity_audit(ms).pass);
    for (auto& m : ms.values) m(1, 1) = cplx(0.0, 0.5);
    CHECK_FALSE(passivity_audit(ms).pass);
}

TEST_CASE("pole-by-pole KK residual of the Drude-Lorentz correlator") {
    const auto dl = bath_correlator_poles(BathSpec::drude_lorentz(0.25, 5.0, 1.0), 4);
    const auto w = uniform_grid(-30.0, 30.0, 2001, true);
    double worst = 0.0;
    for (double r : pole_kk_residual(dl.poles, w)) worst = std::max(worst, std::abs(r));
    CHECK(worst < 1e-12);
}

TEST_CASE("Laplace bound on reduced trajectories") {
    const auto h = build_jc(SystemSpec::jc(1.0), BathSpec::single_mode(1.0, 0.3, 6));
    const SpectralPropagator prop(h);
    Mat vac = Mat::Zero(h.db, h.db);
    vac(0, 0) = 1.0;
    const TimeGrid grid{0.015, 4000};
    const auto omega = uniform_grid(-4.0, 4.0, 401, true);
    const auto op = [](const Mat& m) { return m.jacobiSvd().singularValues()(0); };
    for (auto prep : canonical_preps()) {
        const Mat rho0 = kron(system_state(prep), vac);
        const ReducedResolvent res(prop, rho0);
        KernelSeries s;
        s.grid = grid;
        s.values = propagate_reduced(prop, rho0, grid).states;
        for (double eps : {0.1, 0.3}) {
            double exact = 0.0;
            for (double w : omega) exact = std::max(exact, eps * op(res(cplx(w, eps))));
            CHECK(exact <= 1.0 + 1e-6);
            double quad = 0.0;
            for (const auto& m : laplace_shifted(s, eps, omega, QuadratureRule::gregory).values)
                quad = std::max(quad, eps * op(m));
            CHECK(quad <= 1.0 + 1e-6);
        }
    }
}
