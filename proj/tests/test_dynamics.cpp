#include "nzkk/dynamics.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace nzkk;

namespace {

Mat vacuum(int db) {
    Mat v = Mat::Zero(db, db);
    v(0, 0) = 1.0;
    return v;
}

Mat random_density(std::mt19937_64& rng, int d) {
    std::normal_distribution<double> nd;
    Mat a(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = cplx(nd(rng), nd(rng));
    Mat rho = a * a.adjoint();
    return rho / rho.trace();
}

}  // namespace

TEST_CASE("uncoupled evolution: constant populations, coherence phase") {
    const double w0 = 1.4;
    const auto h = build_jc(SystemSpec::jc(w0), BathSpec::single_mode(1.0, 0.0, 3));
    const TimeGrid grid{0.05, 200};
    const auto te = propagate_reduced(h, kron(system_state(CanonicalPrep::excited), vacuum(h.db)), grid);
    const auto tp = propagate_reduced(h, kron(system_state(CanonicalPrep::plus), vacuum(h.db)), grid);
    for (std::size_t n = 0; n < grid.n_steps; ++n) {
        CHECK(std::abs(te.states[n](0, 0) - 1.0) < 1e-12);
        CHECK(std::abs(tp.states[n](0, 1) - 0.5 * std::exp(-I * w0 * grid.t(n))) < 1e-12);
    }
}

TEST_CASE("vacuum Rabi oscillation") {
    const double g = 0.3;
    const auto h = build_jc(SystemSpec::jc(1.0), BathSpec::single_mode(1.0, g, 1));
    const TimeGrid grid{0.01, 2000};
    const auto t = propagate_reduced(h, kron(system_state(CanonicalPrep::excited), vacuum(2)), grid);
    double worst = 0.0;
    for (std::size_t n = 0; n < grid.n_steps; ++n) {
        const double c = std::cos(g * grid.t(n));
        worst = std::max(worst, std::abs(t.states[n](0, 0).real() - c * c));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("unitarity and linearity of propagation") {
    std::mt19937_64 rng(17);
    const auto h = build_jc(SystemSpec::jc(1.0), BathSpec::single_mode(0.9, 0.6, 4));
    const SpectralPropagator p(h);
    std::normal_distribution<double> nd;
    Vec psi(h.dim());
    for (int k = 0; k < h.dim(); ++k) psi(k) = cplx(nd(rng), nd(rng));
    psi.normalize();
    const Mat pure = psi * psi.adjoint();
    for (double t : {0.0, 0.7, 3.1, 25.0}) {
        const Mat r = p.evolve(pure, t);
        CHECK(std::abs((r * r).trace() - 1.0) < 1e-10);
    }

    const Mat r1 = random_density(rng, h.dim());
    const Mat r2 = random_density(rng, h.dim());
    const double alpha = 0.3;
    const TimeGrid grid{0.1, 100};
    const auto a = propagate_reduced(p, r1, grid);
    const auto b = propagate_reduced(p, r2, grid);
    const auto c = propagate_reduced(p, alpha * r1 + (1.0 - alpha) * r2, grid);
    double worst = 0.0;
    for (std::size_t n = 0; n < grid.n_steps; ++n)
        worst = std::max(worst, (c.states[n] - alpha * a.states[n] - (1.0 - alpha) * b.states[n]).norm());
    CHECK(worst < 1e-10);
    CHECK(state_norm_audit(a).pass);
    CHECK(state_norm_audit(c).pass);
}

TEST_CASE("trajectory set: independence, rank deficiency, initial projectors") {
    Mat v0(4, 4);
    const auto preps = canonical_preps();
    for (int j = 0; j < 4; ++j) v0.col(j) = Eigen::Map<const Vec>(system_state(preps[j]).data(), 4);
    CHECK(std::abs(v0.determinant()) > 1e-6);

    const auto h = build_jc(SystemSpec::jc(1.0), BathSpec::single_mode(1.0, 0.3, 10));
    const TimeGrid grid{0.015, 50};
    std::vector<Mat> dup{system_state(CanonicalPrep::excited), system_state(CanonicalPrep::ground),
                         system_state(CanonicalPrep::plus), system_state(CanonicalPrep::plus)};
    CHECK_THROWS_AS(build_trajectory_set(h, vacuum(h.db), grid, dup), Error);

    const auto set = build_trajectory_set(h, vacuum(h.db), grid);
    REQUIRE(set.trajectories.size() == 4);
    for (std::size_t j = 0; j < 4; ++j)
        CHECK((set.trajectories[j].states[0] - system_state(preps[j])).norm() < 1e-12);
    CHECK(std::isfinite(set.v0_condition));
}

TEST_CASE("state norm audit: factorized, correlated quench, corrupted") {
    std::vector<Mode> modes{{0.5, 0.2}, {1.5, 0.3}};
    const auto bath = BathSpec::discrete(modes, 2, 1.0);
    const auto h0 = build_spin_boson(SystemSpec::spin_boson(1.0), bath);
    const auto hq = build_spin_boson(SystemSpec::spin_boson(1.5), bath);
    const TimeGrid grid{0.05, 400};

    const auto fact = propagate_reduced(h0, kron(system_state(CanonicalPrep::excited), thermal_state(h0.bath_hamiltonian, 1.0)), grid);
    CHECK(state_norm_audit(fact).pass);
    const auto quench = propagate_reduced(hq, thermal_state(h0.matrix, 1.0), grid, "correlated");
    CHECK(state_norm_audit(quench).pass);
    CHECK(state_norm_audit(quench).max_op_norm <= 1.0 + 1e-10);

    auto bad = fact;
    bad.states[123] *= 1.1;
    const auto audit = state_norm_audit(bad);
    CHECK_FALSE(audit.pass);
    CHECK(audit.worst_step == 123);
}

TEST_CASE("discretized spin-boson population oscillates without relaxing") {
    const BathSpec ohmic = BathSpec::ohmic(0.1, 5.0, 1.0);
    const auto modes = discretize_bath(ohmic, 4, NodePlacement::linear);
    const auto h = build_spin_boson(SystemSpec::spin_boson(1.0), BathSpec::discrete(modes, 2, 1.0));
    const TimeGrid grid{0.01, 3000};
    const auto t = propagate_reduced(h, kron(system_state(CanonicalPrep::excited), thermal_state(h.bath_hamiltonian, 1.0)), grid);
    double lo = INFINITY, hi = -INFINITY, mean = 0.0, pol = 0.0;
    std::size_t count = 0;
    for (std::size_t n = grid.n_steps / 2; n < grid.n_steps; ++n) {
        const double sz = (t.states[n](0, 0) - t.states[n](1, 1)).real();
        lo = std::min(lo, sz);
        hi = std::max(hi, sz);
        mean += sz;
        pol -= 2.0 * t.states[n](0, 1).real();
        ++count;
    }
    mean /= static_cast<double>(count);
    pol /= static_cast<double>(count);
    MESSAGE("late <sigma_z> mean " << mean << " range [" << lo << ", " << hi << "]; -<sigma_x> mean " << pol);
    CHECK(hi - lo > 0.05);  // no full relaxation
    CHECK(mean >= 0.3);
    CHECK(mean <= 0.6);
    CHECK(state_norm_audit(t).pass);
}

TEST_CASE("Born residual proxy") {
    const TimeGrid grid{1e-3, 4001};
    const double dq = 0.8, c = 0.4, nu = 1.3;
    const cplx lam(-0.2, 1.1);
    std::vector<cplx> kv(grid.n_steps);
    for (std::size_t n = 0; n < grid.n_steps; ++n) kv[n] = c * std::exp(-nu * grid.t(n));
    const auto kernel = KernelSeries::from_scalar(grid, kv);

    // synthetic trajectory obeying s_z' = 2 dq Im sigma_01 + (K * s_z) in closed form
    ReducedTrajectory tr;
    tr.grid = grid;
    for (std::size_t n = 0; n < grid.n_steps; ++n) {
        const double t = grid.t(n);
        const double sz = 0.6 * std::exp(lam * t).real();
        const double dsz = 0.6 * (lam * std::exp(lam * t)).real();
        const double conv = 0.6 * c * ((std::exp(lam * t) - std::exp(-nu * t)) / (lam + nu)).real();
        const double im01 = (dsz - conv) / (2.0 * dq);
        Mat s(2, 2);
        s(0, 0) = 0.5 * (1.0 + sz);
        s(1, 1) = 0.5 * (1.0 - sz);
        s(1, 0) = cplx(0.0, im01);
        s(0, 1) = std::conj(s(1, 0));
        tr.states.push_back(s);
    }
    const auto res = born_residual_proxy(tr, kernel, dq);
    double worst = 0.0;
    for (double r : res) worst = std::max(worst, std::abs(r));
    CHECK(worst < 1e-6);

    // zero coupling, zero kernel, matching splitting
    const auto h = build_spin_boson(SystemSpec::spin_boson(1.2), BathSpec::discrete({{1.0, 0.0}}, 2, 1.0));
    const TimeGrid g2{0.01, 2000};
    const auto free = propagate_reduced(h, kron(system_state(CanonicalPrep::excited), thermal_state(h.bath_hamiltonian, 1.0)), g2);
    const auto zero = KernelSeries::from_scalar(g2, std::vector<cplx>(g2.n_steps, 0.0));
    const auto r0 = born_residual_proxy(free, zero, 1.2);
    double w0 = 0.0;
    for (double r : r0) w0 = std::max(w0, std::abs(r));
    CHECK(w0 < 1e-10);
}

TEST_CASE("derivative is exact for quadratics inside the grid") {
    std::vector<cplx> x;
    const double dt = 0.1;
    for (int n = 0; n < 20; ++n) x.push_back(cplx(n * n * dt * dt, -n * dt));
    const auto d = derivative(x, dt);
    for (int n = 1; n < 19; ++n) CHECK(std::abs(d[n] - cplx(2.0 * n * dt, -1.0)) < 1e-12);
}
