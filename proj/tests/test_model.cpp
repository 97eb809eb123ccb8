#include "nzkk/model.hpp"

#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>

#include <algorithm>
#include <cmath>
#include <random>

using namespace nzkk;

namespace {

std::vector<double> sorted_eigs(const Mat& h) {
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(v.begin(), v.end());
    return v;
}

double hermitian_error(const Mat& h) { return (h - h.adjoint()).norm() / std::max(1.0, h.norm()); }

}  // namespace

TEST_CASE("JC dimension and uncoupled ladder") {
    const auto h = build_jc(SystemSpec::jc(1.0), BathSpec::single_mode(1.0, 0.1, 3));
    CHECK(h.dim() == 8);

    const double w0 = 1.3, wc = 0.7;
    const auto h0 = build_jc(SystemSpec::jc(w0), BathSpec::single_mode(wc, 0.0, 4));
    std::vector<double> want;
    for (int n = 0; n <= 4; ++n) {
        want.push_back(0.5 * w0 + n * wc);
        want.push_back(-0.5 * w0 + n * wc);
    }
    std::sort(want.begin(), want.end());
    const auto got = sorted_eigs(h0.matrix);
    REQUIRE(got.size() == want.size());
    for (std::size_t k = 0; k < got.size(); ++k) CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-12));
    // block diagonal in the joint basis
    for (int a = 0; a < h0.dim(); ++a)
        for (int b = 0; b < h0.dim(); ++b)
            if (a != b) CHECK(std::abs(h0.matrix(a, b)) == 0.0);
}

TEST_CASE("JC N_max=1 on resonance matches the explicit 4x4 matrix") {
    const double g = 0.3;
    const auto h = build_jc(SystemSpec::jc(1.0), BathSpec::single_mode(1.0, g, 1));
    // basis |e0>, |e1>, |g0>, |g1>
    Mat m = Mat::Zero(4, 4);
    m(0, 0) = 0.5;
    m(1, 1) = 1.5;
    m(2, 2) = -0.5;
    m(3, 3) = 0.5;
    m(0, 3) = m(3, 0) = g;
    CHECK((h.matrix - m).norm() < 1e-14);
    const auto e = sorted_eigs(m);
    const auto got = sorted_eigs(h.matrix);
    for (int k = 0; k < 4; ++k) CHECK(got[k] == doctest::Approx(e[k]).epsilon(1e-12));
    // one-excitation doublet at omega_c/2 +- g
    CHECK(got[1] == doctest::Approx(0.5 - g));
    CHECK(got[2] == doctest::Approx(0.5 + g));
}

TEST_CASE("JC Hermitian and excitation-number conserving over a parameter sweep") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 2.5);
    for (int trial = 0; trial < 25; ++trial) {
        const int n_max = 1 + trial % 8;
        const auto h = build_jc(SystemSpec::jc(u(rng)), BathSpec::single_mode(0.1 + u(rng), u(rng), n_max));
        CHECK(hermitian_error(h.matrix) < 1e-12);
        Mat num = Mat::Zero(h.dim(), h.dim());
        for (int a = 0; a < 2; ++a)
            for (int n = 0; n < h.db; ++n) num(a * h.db + n, a * h.db + n) = n + (a == 0 ? 1 : 0);
        CHECK((h.matrix * num - num * h.matrix).norm() < 1e-12 * std::max(1.0, h.matrix.norm()));
    }
}

TEST_CASE("spin-boson dimension, uncoupled spectrum and explicit 4x4") {
    std::vector<Mode> two(2, Mode{1.0, 0.5});
    CHECK(build_spin_boson(SystemSpec::spin_boson(1.0), BathSpec::discrete(two, 2)).dim() == 18);
    CHECK(spin_boson_dimension(2, 2, 4096) == 18);
    CHECK_THROWS_AS(spin_boson_dimension(12, 3, 4096), Error);

    const double delta = 0.8;
    std::vector<Mode> free{{1.0, 0.0}, {1.7, 0.0}};
    const auto h0 = build_spin_boson(SystemSpec::spin_boson(delta), BathSpec::discrete(free, 2));
    std::vector<double> want;
    for (double s : {-0.5 * delta, 0.5 * delta})
        for (int n1 = 0; n1 <= 2; ++n1)
            for (int n2 = 0; n2 <= 2; ++n2) want.push_back(s + n1 * 1.0 + n2 * 1.7);
    std::sort(want.begin(), want.end());
    const auto got = sorted_eigs(h0.matrix);
    for (std::size_t k = 0; k < want.size(); ++k) CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-12));

    const auto h1 = build_spin_boson(SystemSpec::spin_boson(1.0), BathSpec::discrete({{1.0, 0.5}}, 1));
    // basis |up,0>, |up,1>, |dn,0>, |dn,1>
    Mat m = Mat::Zero(4, 4);
    m(0, 2) = m(2, 0) = 0.5;
    m(1, 3) = m(3, 1) = 0.5;
    m(1, 1) = m(3, 3) = 1.0;
    m(0, 1) = m(1, 0) = 0.5;
    m(2, 3) = m(3, 2) = -0.5;
    CHECK((h1.matrix - m).norm() < 1e-14);
    const auto e = sorted_eigs(m);
    const auto g1 = sorted_eigs(h1.matrix);
    for (int k = 0; k < 4; ++k) CHECK(g1[k] == doctest::Approx(e[k]).epsilon(1e-12));
    CHECK(hermitian_error(h1.matrix) < 1e-12);
}

TEST_CASE("spectral density identities") {
    const auto dl = BathSpec::drude_lorentz(0.25, 5.0, 1.0);
    CHECK(spectral_density(dl, 5.0) == doctest::Approx(0.25).epsilon(1e-14));
    const auto oh = BathSpec::ohmic(0.1, 5.0, 1.0);
    CHECK(spectral_density(oh, 1e-9) / 1e-9 == doctest::Approx(0.1).epsilon(1e-8));
    const double eta = 0.1, wc = 5.0;
    const auto so = BathSpec::sub_ohmic(eta, wc, 0.5, 1.0);
    // eta wc^{1-s} wc^s e^{-1} = eta wc / e
    CHECK(spectral_density(so, wc) == doctest::Approx(eta * wc * std::exp(-1.0)).epsilon(1e-13));
}

TEST_CASE("discretization: centroid single mode and Drude-Lorentz reorganization") {
    const auto dl = BathSpec::drude_lorentz(0.25, 5.0, 1.0);
    const auto one = discretize_bath(dl, 1, NodePlacement::centroid);
    REQUIRE(one.size() == 1);
    auto J = [&](double w) { return 2.0 * 0.25 * 5.0 * w / (w * w + 25.0); };
    // Simpson on [0, 4 gamma]
    const int n = 20000;
    const double h = 20.0 / n;
    double m0 = 0.0, m1 = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double w = k * h;
        const double c = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        m0 += c * J(w);
        m1 += c * w * J(w);
    }
    CHECK(one[0].omega == doctest::Approx(m1 / m0).epsilon(1e-9));

    const double lam_quad =
        boost::math::quadrature::gauss_kronrod<double, 61>::integrate([&](double w) { return J(w) / w; }, 0.0,
                                                                      std::numeric_limits<double>::infinity()) /
        kPi;
    CHECK(lam_quad == doctest::Approx(0.25).epsilon(1e-8));
    const auto four = discretize_bath(dl, 4, NodePlacement::equal_reorganization);
    CHECK(std::abs(reorganization_energy(four) - lam_quad) < 0.05 * lam_quad);

    const auto zero = discretize_bath(BathSpec::ohmic(0.0, 1.0, 1.0), 3);
    for (const auto& m : zero) CHECK(m.coupling == 0.0);
}

TEST_CASE("thermal state limits and geometric populations") {
    const Mat a = annihilation(6);
    const Mat h = a.adjoint() * a;
    const Mat inf = thermal_state(h, 0.0);
    CHECK((inf - Mat::Identity(7, 7) / 7.0).norm() < 1e-15);

    const Mat cold = thermal_state(h, 1e3);
    Mat proj = Mat::Zero(7, 7);
    proj(0, 0) = 1.0;
    CHECK((cold - proj).norm() < 1e-8);

    const Mat th = thermal_state(h, 1.0);
    double z = 0.0;
    for (int n = 0; n <= 6; ++n) z += std::exp(-n);
    for (int n = 0; n <= 6; ++n) CHECK(th(n, n).real() == doctest::Approx(std::exp(-n) / z).epsilon(1e-12));

    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 10; ++trial) {
        Mat r(5, 5);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) r(i, j) = cplx(nd(rng), nd(rng));
        const Mat rho = thermal_state(r + r.adjoint(), 0.1 * (trial + 1));
        CHECK(std::abs(rho.trace() - 1.0) < 1e-12);
        Eigen::SelfAdjointEigenSolver<Mat> es(rho);
        CHECK(es.eigenvalues().minCoeff() >= -1e-12);
    }
}

TEST_CASE("Drude-Lorentz correlator poles against Fourier quadrature") {
    const double lam = 0.25, gam = 5.0, beta = 1.0;
    const auto bath = BathSpec::drude_lorentz(lam, gam, beta);
    CHECK(bath_correlator_poles(BathSpec::drude_lorentz(0.0, gam, beta), 4).poles.empty());

    auto J = [&](double w) { return 2.0 * lam * gam * w / (w * w + gam * gam); };
    boost::math::quadrature::ooura_fourier_cos<double> cosq;
    boost::math::quadrature::ooura_fourier_sin<double> sinq;
    auto s_plus = [&](double w) {
        if (w < 1e-12) return 4.0 * lam / (gam * beta * kPi);
        return J(w) / std::tanh(0.5 * beta * w) / kPi;
    };
    auto re_c = [&](double t) { return cosq.integrate(s_plus, t).first; };
    auto im_c = [&](double t) { return -sinq.integrate([&](double w) { return J(w) / kPi; }, t).first; };

    const auto poles = bath_correlator_poles(bath, 4);
    for (double t : {0.2, 0.5, 1.0}) {
        const cplx c = poles.correlation(t);
        const cplx q(re_c(t), im_c(t));
        CHECK(std::abs(c - q) < 0.01 * std::abs(q));
    }
    // monotone approach in the Matsubara count
    const double target = re_c(0.2);
    double prev = INFINITY;
    for (int m = 0; m <= 8; ++m) {
        const double err = std::abs(bath_correlator_poles(bath, m).correlation(0.2).real() - target);
        CHECK(err <= prev);
        prev = err;
    }
    // classical limit: count 0 and beta gamma << 1 gives c_1 ~ 2 lambda / beta
    const auto hot = bath_correlator_poles(BathSpec::drude_lorentz(lam, gam, 1e-3), 0);
    REQUIRE(hot.poles.size() == 1);
    CHECK(hot.poles[0].amplitude.real() == doctest::Approx(2.0 * lam / 1e-3).epsilon(1e-5));
    CHECK(hot.poles[0].rate.real() == doctest::Approx(gam));
}

TEST_CASE("discrete correlation at t=0") {
    std::vector<Mode> m{{1.0, 0.3}, {2.0, 0.1}};
    const cplx c = discrete_correlation(m, 2.0, 0.0);
    CHECK(c.real() == doctest::Approx(0.09 / std::tanh(1.0) + 0.01 / std::tanh(2.0)));
    CHECK(c.imag() == 0.0);
}
