// kernel.cpp
#include "nzkk/kernel.hpp"

#include "nzkk/liouville.hpp"
#include "nzkk/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>
#include <sstream>

namespace nzkk {

KernelSeries born_kernel(const BathCorrelatorPoles& poles, const TimeGrid& grid, cplx prefactor) {
    return born_kernel([&](double t) { return poles.correlation(t); }, grid, prefactor);
}

KernelSeries born_kernel(const Correlation& c, const TimeGrid& grid, cplx prefactor) {
    grid.check();
    std::vector<cplx> v(grid.n_steps);
    for (std::size_t n = 0; n < grid.n_steps; ++n) v[n] = prefactor * c(grid.t(n));
    return KernelSeries::from_scalar(grid, v, "born");
}

KernelSeries born_superoperator_kernel(const Correlation& c, const Mat& h_s, const Mat& s, const TimeGrid& grid) {
    grid.check();
    const Eigen::Index d = h_s.rows();
    require(s.rows() == d && h_s.cols() == d, ErrorKind::dimension, "Born kernel: operator dimensions differ");
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h_s + h_s.adjoint()));
    const Mat& v = es.eigenvectors();
    const Vec e = es.eigenvalues().cast<cplx>();
    KernelSeries out;
    out.grid = grid;
    out.channel_label = "born-superoperator";
    out.values.assign(grid.n_steps, Mat::Zero(d * d, d * d));
    parallel_for(grid.n_steps, [&](std::size_t n) {
        const double t = grid.t(n);
        const Mat u = v * (-I * t * e).array().exp().matrix().asDiagonal() * v.adjoint();
        const cplx ct = c(t);
        Mat& k = out.values[n];
        for (Eigen::Index col = 0; col < d * d; ++col) {
            Mat rho = Mat::Zero(d, d);
            rho(col % d, col / d) = 1.0;
            const Mat x = u * s * rho * u.adjoint();
            const Mat y = u * rho * s * u.adjoint();
            const Mat r = -(ct * (s * x - x * s) - std::conj(ct) * (s * y - y * s));
            k.col(col) = vec(r);
        }
    });
    return out;
}

KernelSeries born_proxy_kernel(const Correlation& c, const TimeGrid& grid) {
    grid.check();
    std::vector<cplx> v(grid.n_steps);
    for (std::size_t n = 0; n < grid.n_steps; ++n) v[n] = -2.0 * c(grid.t(n)).real();
    return KernelSeries::from_scalar(grid, v, "born-proxy");
}

std::string to_string(VolterraRule r) { return r == VolterraRule::left ? "left" : "trapezoid"; }

VolterraRule parse_volterra_rule(const std::string& s) {
    if (s == "left") return VolterraRule::left;
    if (s == "trapezoid") return VolterraRule::trapezoid;
    fail(ErrorKind::validation, "unknown Volterra rule '" + s + "'");
}

namespace {

// one-step generators of the homogeneous flow: (e^{L dt} - 1)/dt, sinh(L dt)/dt, (1 - e^{-L dt})/dt
struct StepGenerators {
    Mat fwd, ctr, bwd;
    StepGenerators(const Mat& l, double dt, bool exact) {
        if (!exact) {
            fwd = ctr = bwd = l;
            return;
        }
        const Mat id = Mat::Identity(l.rows(), l.cols());
        const Mat ep = Mat(l * dt).exp();
        const Mat em = Mat(-l * dt).exp();
        fwd = (ep - id) / dt;
        ctr = (ep - em) / (2.0 * dt);
        bwd = (id - em) / dt;
    }
};

template <int M>
std::vector<Mat> solve_volterra(const std::vector<Mat>& vcols, const std::vector<Mat>& f, double dt,
                                const ExtractionOptions& opts) {
    using Block = Eigen::Matrix<cplx, M, M>;
    const std::size_t n = vcols.size();
    const Eigen::Index m = vcols.front().rows();
    std::vector<Block> v(n), k(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = vcols[j];

    const Block v0 = v[0];
    Eigen::JacobiSVD<Mat> svd{Mat(v0)};
    const auto& sv = svd.singularValues();
    const double cond = sv(m - 1) > 0.0 ? sv(0) / sv(m - 1) : INFINITY;
    if (!(cond <= opts.condition_threshold)) {
        std::ostringstream os;
        os << "Volterra step 0 is ill-conditioned (condition number " << cond << " above "
           << opts.condition_threshold << ")";
        fail(ErrorKind::numerical, os.str());
    }
    const Block v0_inv = Mat(v0).inverse();
    const Block half_inv = 2.0 * v0_inv;
    const bool trap = opts.rule == VolterraRule::trapezoid;

    for (std::size_t s = 0; s < n; ++s) {
        Block acc = f[s] / dt;
        if (s == 0) {
            k[0] = acc * v0_inv;
            continue;
        }
        if (trap) {
            acc -= 0.5 * k[0] * v[s];
            for (std::size_t q = 1; q < s; ++q) acc -= k[q] * v[s - q];
            k[s] = acc * half_inv;
        } else {
            for (std::size_t q = 0; q < s; ++q) acc -= k[q] * v[s - q];
            k[s] = acc * v0_inv;
        }
        if (!k[s].allFinite()) {
            std::ostringstream os;
            os << "Volterra step " << s << " produced a non-finite kernel value";
            fail(ErrorKind::numerical, os.str());
        }
    }
    std::vector<Mat> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = k[j];
    return out;
}

}  // namespace

KernelSeries extract_matrix_kernel(const std::vector<std::vector<Vec>>& traj, const TimeGrid& grid,
                                   const Mat& l_s, const ExtractionOptions& opts) {
    grid.check();
    const std::size_t m = traj.size();
    require(m >= 1 && l_s.rows() == static_cast<Eigen::Index>(m) && l_s.cols() == l_s.rows(),
            ErrorKind::dimension, "extraction needs as many trajectories as the Liouville dimension");
    for (const auto& t : traj)
        require(t.size() == grid.n_steps, ErrorKind::dimension, "trajectory lengths differ from the grid");
    const std::size_t n = grid.n_steps;
    std::vector<Mat> v(n, Mat(m, m)), f(n, Mat(m, m));
    const StepGenerators gen(l_s, grid.dt, opts.residual == ResidualScheme::exact_step);
    for (std::size_t j = 0; j < m; ++j) {
        const auto d = derivative(traj[j], grid.dt);
        for (std::size_t s = 0; s < n; ++s) {
            v[s].col(j) = traj[j][s];
            const Mat& g = s == 0 ? gen.fwd : (s + 1 == n ? gen.bwd : gen.ctr);
            f[s].col(j) = d[s] - g * traj[j][s];
        }
    }
    KernelSeries out;
    out.grid = grid;
    out.channel_label = "matrix";
    switch (m) {
        case 1: out.values = solve_volterra<1>(v, f, grid.dt, opts); break;
        case 4: out.values = solve_volterra<4>(v, f, grid.dt, opts); break;
        default: out.values = solve_volterra<Eigen::Dynamic>(v, f, grid.dt, opts); break;
    }
    return out;
}

KernelSeries extract_matrix_kernel(const TrajectorySet& set, const Mat& l_s, const ExtractionOptions& opts) {
    std::vector<std::vector<Vec>> traj;
    for (const auto& t : set.trajectories) {
        require(t.grid == set.grid, ErrorKind::dimension, "trajectory set grids differ");
        traj.push_back(t.vectors());
    }
    return extract_matrix_kernel(traj, set.grid, l_s, opts);
}

ScalarExtraction extract_scalar_kernel(const std::vector<cplx>& channel, const TimeGrid& grid, cplx bare,
                                       const ExtractionOptions& opts) {
    grid.check();
    require(channel.size() == grid.n_steps, ErrorKind::dimension, "channel length differs from the grid");
    ScalarExtraction out;
    out.sigma0_abs = std::abs(channel.front());
    require(out.sigma0_abs >= 1e-12, ErrorKind::numerical,
            "initial channel value below 1e-12; scalar deconvolution undefined");
    out.near_zero_denominator = out.sigma0_abs < 1e-6;
    std::vector<std::vector<Vec>> traj(1);
    traj[0].reserve(channel.size());
    for (const auto& x : channel) traj[0].push_back(Vec::Constant(1, x));
    out.kernel = extract_matrix_kernel(traj, grid, Mat::Constant(1, 1, bare), opts);
    out.kernel.channel_label = "scalar";
    return out;
}

std::vector<Vec> forward_volterra(const KernelSeries& k, const Mat& l, const Vec& v0, VolterraRule rule,
                                  ResidualScheme scheme) {
    const std::size_t n = k.size();
    require(n >= 2, ErrorKind::invalid_argument, "forward integration needs at least 2 steps");
    require(l.rows() == v0.size() && k.m() == v0.size(), ErrorKind::dimension, "forward integration: sizes differ");
    const double dt = k.grid.dt;
    std::vector<Vec> v(n);
    v[0] = v0;
    auto conv = [&](std::size_t s) {
        Vec acc = Vec::Zero(v0.size());
        if (s == 0) return Vec(k.values[0] * v[0] * dt);
        if (rule == VolterraRule::trapezoid) {
            acc += 0.5 * (k.values[0] * v[s] + k.values[s] * v[0]);
            for (std::size_t q = 1; q < s; ++q) acc += k.values[q] * v[s - q];
        } else {
            for (std::size_t q = 0; q <= s; ++q) acc += k.values[q] * v[s - q];
        }
        return Vec(acc * dt);
    };
    const StepGenerators gen(l, dt, scheme == ResidualScheme::exact_step);
    v[1] = v[0] + dt * (gen.fwd * v[0] + conv(0));
    for (std::size_t s = 1; s + 1 < n; ++s) v[s + 1] = v[s - 1] + 2.0 * dt * (gen.ctr * v[s] + conv(s));
    return v;
}

std::vector<cplx> forward_volterra_scalar(const KernelSeries& k, cplx bare, cplx sigma0, VolterraRule rule,
                                          ResidualScheme scheme) {
    const auto v = forward_volterra(k, Mat::Constant(1, 1, bare), Vec::Constant(1, sigma0), rule, scheme);
    std::vector<cplx> out(v.size());
    for (std::size_t s = 0; s < v.size(); ++s) out[s] = v[s](0);
    return out;
}

EffectiveKernelSlice effective_kernel(const LaplaceSlice& k, const LaplaceSlice& inhom, const LaplaceSlice& sigma,
                                      bool matrix_mode, double mask_threshold) {
    require(k.omega == inhom.omega && k.omega == sigma.omega && k.eps == inhom.eps && k.eps == sigma.eps,
            ErrorKind::dimension, "effective kernel: slices must share the frequency grid and eps");
    EffectiveKernelSlice out;
    out.omega = k.omega;
    out.eps = k.eps;
    out.matrix_mode = matrix_mode;
    out.kernel = k.values;
    out.inhomogeneous = inhom.values;
    out.sigma = sigma.values;
    const std::size_t n = k.size();
    std::vector<double> size(n);
    double peak = 0.0;
    for (std::size_t q = 0; q < n; ++q) {
        size[q] = matrix_mode ? std::abs(sigma.values[q].determinant()) : sigma.values[q].cwiseAbs().minCoeff();
        peak = std::max(peak, size[q]);
    }
    out.masked.assign(n, false);
    for (std::size_t q = 0; q < n; ++q) {
        out.masked[q] = !(size[q] > mask_threshold * peak);
        if (out.masked[q]) ++out.masked_count;
    }
    out.values = recombine(out);
    return out;
}

std::vector<Mat> recombine(const EffectiveKernelSlice& s) {
    std::vector<Mat> v(s.kernel.size());
    for (std::size_t q = 0; q < v.size(); ++q) {
        if (s.masked[q]) {
            v[q] = Mat::Constant(s.kernel[q].rows(), s.kernel[q].cols(), cplx(NAN, NAN));
        } else if (s.matrix_mode) {
            v[q] = s.kernel[q] + s.inhomogeneous[q] * s.sigma[q].inverse();
        } else {
            v[q] = s.kernel[q] + s.inhomogeneous[q].cwiseQuotient(s.sigma[q]);
        }
    }
    return v;
}

ZeroResidueSet zero_residues(const std::vector<cplx>& zetas, const std::function<cplx(cplx)>& inhom1,
                             const std::function<cplx(cplx)>& sigma0, double h) {
    ZeroResidueSet out;
    for (const auto& z : zetas) {
        const cplx d = (sigma0(z + I * h) - sigma0(z - I * h)) / (2.0 * I * h);
        require(std::abs(d) > 0.0, ErrorKind::numerical, "zero residue: vanishing derivative (multiple zero)");
        out.entries.push_back({z, inhom1(z) / d});
    }
    return out;
}

std::vector<double> modified_kk_correction(const ZeroResidueSet& zeros, const std::vector<double>& omega) {
    for (const auto& e : zeros.entries)
        require(e.zeta.imag() > 0.0, ErrorKind::invalid_argument,
                "modified KK correction needs zeros strictly in the upper half-plane");
    std::vector<double> out(omega.size(), 0.0);
    for (std::size_t k = 0; k < omega.size(); ++k)
        for (const auto& e : zeros.entries) out[k] += 2.0 * (e.residue / (omega[k] - e.zeta)).real();
    return out;
}

IbmReport ibm_self_consistency(const BathSpec& bath, double eps_strength, const std::vector<double>& omega,
                               int matsubara_count, double shift) {
    require(bath.kind == BathKind::drude_lorentz, ErrorKind::model_mismatch, "IBM check needs a Drude-Lorentz bath");
    require(shift >= 0.0, ErrorKind::invalid_argument, "perturbation shift must be >= 0");
    const auto poles = bath_correlator_poles(bath, matsubara_count);
    std::vector<CorrelatorPole> pert_poles;
    for (const auto& p : poles.poles) pert_poles.push_back({eps_strength * p.amplitude, p.rate + shift});
    std::vector<CorrelatorPole> all = poles.poles;
    all.insert(all.end(), pert_poles.begin(), pert_poles.end());

    IbmReport rep;
    rep.eps_strength = eps_strength;
    rep.shift = shift;
    rep.omega = omega;
    auto max_abs = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    };
    rep.factorized_residual = max_abs(pole_kk_residual(poles.poles, omega));
    rep.perturbed_residual = max_abs(pole_kk_residual(all, omega));

    // Unpaired: the perturbation enters Re only, so its Hilbert partner is missing.
    std::vector<double> broken = pole_kk_residual(poles.poles, omega);
    BathCorrelatorPoles pert;
    pert.poles = pert_poles;
    for (std::size_t k = 0; k < omega.size(); ++k) broken[k] += pert.transform(omega[k]).real();
    rep.broken_residual = max_abs(broken);

    BathCorrelatorPoles full;
    full.poles = all;
    for (double w : omega) {
        rep.factorized.push_back(poles.transform(w));
        rep.perturbed.push_back(full.transform(w));
    }
    return rep;
}

}  // namespace nzkk
