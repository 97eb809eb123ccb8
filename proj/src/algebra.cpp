// algebra.cpp
#include "nzkk/algebra.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace nzkk {

void RationalKernelSpec::validate() const {
    require(liouvillian.rows() >= 1 && liouvillian.rows() == liouvillian.cols(), ErrorKind::dimension,
            "L_s must be square");
    require(residue.rows() == liouvillian.rows() && residue.cols() == liouvillian.cols(), ErrorKind::dimension,
            "residue must match L_s");
    require(z0.imag() > 0.0, ErrorKind::invalid_argument, "pole z0 must lie in the upper half-plane");
    require(!q.empty() && q.back() == 1.0, ErrorKind::invalid_argument, "q must be monic");
    require(p.size() <= static_cast<std::size_t>(m()), ErrorKind::invalid_argument,
            "regular numerator degree must be below deg q");
    for (const auto& c : p)
        require(c.rows() == liouvillian.rows() && c.cols() == liouvillian.cols(), ErrorKind::dimension,
                "regular numerator coefficient has wrong size");
}

cplx RationalKernelSpec::q_at(cplx z) const {
    cplx s = 0.0;
    for (auto it = q.rbegin(); it != q.rend(); ++it) s = s * z + *it;
    return s;
}

Mat RationalKernelSpec::regular(cplx z) const {
    Mat s = Mat::Zero(d(), d());
    for (auto it = p.rbegin(); it != p.rend(); ++it) s = s * z + *it;
    return s / q_at(z);
}

std::vector<Mat> RationalKernelSpec::polynomial() const {
    const int dd = d();
    const int mm = m();
    const Mat id = Mat::Identity(dd, dd);
    auto qk = [&](int k) { return (k >= 0 && k <= mm) ? q[static_cast<std::size_t>(k)] : 0.0; };
    auto pk = [&](int k) -> Mat {
        return (k >= 0 && k < static_cast<int>(p.size())) ? p[static_cast<std::size_t>(k)] : Mat::Zero(dd, dd);
    };
    // N(z) = z q - q L - P
    std::vector<Mat> n(static_cast<std::size_t>(mm + 2));
    for (int k = 0; k <= mm + 1; ++k) n[static_cast<std::size_t>(k)] = qk(k - 1) * id - qk(k) * liouvillian - pk(k);
    auto nk = [&](int k) -> Mat { return (k >= 0 && k <= mm + 1) ? n[static_cast<std::size_t>(k)] : Mat::Zero(dd, dd); };
    std::vector<Mat> out(static_cast<std::size_t>(mm + 3));
    for (int k = 0; k <= mm + 2; ++k) out[static_cast<std::size_t>(k)] = nk(k - 1) - z0 * nk(k) - qk(k) * residue;
    return out;
}

Mat RationalKernelSpec::polynomial_at(cplx z) const {
    const auto c = polynomial();
    Mat s = Mat::Zero(d(), d());
    for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * z + *it;
    return s;
}

namespace {

std::vector<cplx> companion_roots(const RationalKernelSpec& spec) {
    const auto c = spec.polynomial();
    const int dd = spec.d();
    const int n = static_cast<int>(c.size()) - 1;
    require((c.back() - Mat::Identity(dd, dd)).norm() == 0.0, ErrorKind::numerical,
            "matrix polynomial is not monic; root count would not match");
    const int size = dd * n;
    Mat comp = Mat::Zero(size, size);
    for (int b = 0; b + 1 < n; ++b) comp.block(b * dd, (b + 1) * dd, dd, dd) = Mat::Identity(dd, dd);
    for (int b = 0; b < n; ++b) comp.block((n - 1) * dd, b * dd, dd, dd) = -c[static_cast<std::size_t>(b)];
    Eigen::ComplexEigenSolver<Mat> es(comp, false);
    require(es.info() == Eigen::Success, ErrorKind::numerical, "companion eigensolver failed");
    std::vector<cplx> roots(es.eigenvalues().data(), es.eigenvalues().data() + size);
    std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return roots;
}

double min_singular(const Mat& m) {
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

}  // namespace

VietaReport vieta_budget(const RationalKernelSpec& spec, double tol) {
    spec.validate();
    VietaReport rep;
    rep.roots = companion_roots(spec);
    const std::size_t expected_count = static_cast<std::size_t>(spec.d() * (spec.m() + 2));
    require(rep.roots.size() == expected_count, ErrorKind::numerical, "root count mismatch");
    rep.root_sum = 0.0;
    for (const auto& z : rep.roots) rep.root_sum += z;
    const double dd = spec.d();
    rep.expected_sum = dd * spec.z0 + spec.liouvillian.trace() - dd * spec.q_sub();
    rep.imag_budget = rep.root_sum.imag();
    rep.expected_budget = dd * spec.z0.imag();
    rep.sum_error = std::abs(rep.root_sum - rep.expected_sum) / std::max(1.0, std::abs(rep.expected_sum));
    rep.budget_error = std::abs(rep.imag_budget - rep.expected_budget) / std::max(1.0, rep.expected_budget);
    rep.pass = rep.sum_error <= tol && rep.budget_error <= tol;
    return rep;
}

RoucheReport rouche_bound(const RationalKernelSpec& spec, double r, std::size_t min_samples) {
    spec.validate();
    require(r > 0.0 && r < spec.z0.imag(), ErrorKind::invalid_argument, "radius must satisfy 0 < r < Im z0");
    const Mat id = Mat::Identity(spec.d(), spec.d());
    RoucheReport rep;
    rep.r = r;
    rep.residue_norm = op_norm(spec.residue);

    auto sample_min = [&](std::size_t n, cplx& where) {
        double best = INFINITY;
        for (std::size_t k = 0; k < n; ++k) {
            const cplx z = spec.z0 + r * std::polar(1.0, 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n));
            const double s = min_singular(z * id - spec.liouvillian - spec.regular(z));
            if (!(s > 1e-12)) {
                std::ostringstream os;
                os << "z - L - K_reg is near-singular on the circle at z = (" << z.real() << ", " << z.imag()
                   << "), sigma_min = " << s;
                fail(ErrorKind::numerical, os.str());
            }
            if (s < best) {
                best = s;
                where = z;
            }
        }
        return best;
    };
    std::size_t n = std::max<std::size_t>(min_samples, 8);
    cplx where;
    double prev = sample_min(n, where);
    for (;;) {
        cplx w2;
        const double next = sample_min(2 * n, w2);
        n *= 2;
        const bool settled = std::abs(next - prev) < 0.01 * prev;
        if (next < prev) {
            prev = next;
            where = w2;
        }
        if (settled || n >= (1u << 16)) break;
    }
    rep.n_of_r = prev;
    rep.samples = n;
    rep.argmin = where;
    rep.verdict = rep.residue_norm < r * rep.n_of_r;

    // Argument-principle audit on det[(z - z0)(z - L - K_reg(z)) - R], analytic in the disc when q is rootless there.
    auto det_at = [&](cplx z) {
        return ((z - spec.z0) * (z * id - spec.liouvillian - spec.regular(z)) - spec.residue).determinant();
    };
    auto reg_at = [&](cplx z) { return (z * id - spec.liouvillian - spec.regular(z)).determinant(); };
    double total = 0.0, reg_total = 0.0;
    const std::size_t m = 4 * n;
    cplx prev_v = det_at(spec.z0 + r), prev_g = reg_at(spec.z0 + r);
    for (std::size_t k = 1; k <= m; ++k) {
        const cplx z = spec.z0 + r * std::polar(1.0, 2.0 * kPi * static_cast<double>(k) / static_cast<double>(m));
        const cplx v = det_at(z), g = reg_at(z);
        total += std::arg(v / prev_v);
        reg_total += std::arg(g / prev_g);
        prev_v = v;
        prev_g = g;
    }
    rep.winding = std::lround(total / (2.0 * kPi));
    rep.regular_winding = std::lround(reg_total / (2.0 * kPi));
    rep.hypothesis = rep.regular_winding == 0;
    std::size_t q_inside = 0;
    if (spec.m() > 0) {
        Eigen::MatrixXd qc = Eigen::MatrixXd::Zero(spec.m(), spec.m());
        for (int k = 1; k < spec.m(); ++k) qc(k, k - 1) = 1.0;
        for (int k = 0; k < spec.m(); ++k) qc(k, spec.m() - 1) = -spec.q[static_cast<std::size_t>(k)];
        Eigen::EigenSolver<Eigen::MatrixXd> es(qc, false);
        for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
            if (std::abs(es.eigenvalues()(k) - spec.z0) < r) ++q_inside;
    }
    for (const auto& z : companion_roots(spec))
        if (std::abs(z - spec.z0) < r) ++rep.roots_inside;
    rep.roots_inside -= std::min(rep.roots_inside, q_inside * static_cast<std::size_t>(spec.d()));
    rep.audit = rep.winding == spec.d() && rep.roots_inside == static_cast<std::size_t>(spec.d());
    return rep;
}

RationalKernelSpec anchor_spec(double omega1, double omega2, double gamma, double r) {
    RationalKernelSpec s;
    s.z0 = cplx(0.0, gamma);
    s.liouvillian = Mat::Zero(2, 2);
    s.liouvillian(0, 0) = omega1;
    s.liouvillian(1, 1) = omega2;
    s.residue = r * Mat::Identity(2, 2);
    s.q = {1.0};
    return s;
}

AlgebraAnchorReport anchor_example(double omega1, double omega2, double gamma, double r) {
    require(gamma > 0.0 && r > 0.0, ErrorKind::invalid_argument, "anchor needs gamma > 0 and r > 0");
    AlgebraAnchorReport rep;
    rep.omega1 = omega1;
    rep.omega2 = omega2;
    rep.gamma = gamma;
    rep.r = r;
    rep.root_sum = 0.0;
    rep.each_factor_uhp = true;
    std::vector<cplx> closed;
    for (double w : {omega1, omega2}) {
        const cplx root = std::sqrt((w - I * gamma) * (w - I * gamma) + 4.0 * r);
        AnchorPair f{0.5 * (w + I * gamma + root), 0.5 * (w + I * gamma - root)};
        rep.factors.push_back(f);
        rep.root_sum += f.plus + f.minus;
        rep.each_factor_uhp = rep.each_factor_uhp && (f.plus.imag() > 0.0 || f.minus.imag() > 0.0);
        closed.push_back(f.plus);
        closed.push_back(f.minus);
    }
    rep.imag_budget = rep.root_sum.imag();
    rep.budget_error = std::abs(rep.imag_budget - 2.0 * gamma);
    const auto spec = anchor_spec(omega1, omega2, gamma, r);
    rep.residue_nonsingular = min_singular(spec.residue) > 1e-12;
    rep.q_rootless = spec.m() == 0;
    // match each closed-form root to its nearest unused companion root
    auto comp = companion_roots(spec);
    for (const auto& z : closed) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < comp.size(); ++k)
            if (std::abs(comp[k] - z) < std::abs(comp[best] - z)) best = k;
        rep.companion_mismatch = std::max(rep.companion_mismatch, std::abs(comp[best] - z));
        comp.erase(comp.begin() + static_cast<std::ptrdiff_t>(best));
    }
    rep.pass = rep.budget_error <= 1e-12 && rep.each_factor_uhp && rep.residue_nonsingular && rep.q_rootless;
    return rep;
}

Mat MomentSequence::sign_corrected(int n) const {
    require(n >= 1 && n <= static_cast<int>(omega.size()), ErrorKind::invalid_argument,
            "no explicit moment matrix for this order");
    return (n % 2 ? -1.0 : 1.0) * omega[static_cast<std::size_t>(n - 1)];
}

MomentSequence MomentSequence::drude_lorentz(double gamma, int n_max) {
    require(gamma > 0.0 && n_max >= 2, ErrorKind::invalid_argument, "Drude-Lorentz moments need gamma > 0, N >= 2");
    MomentSequence m;
    m.source = "drude-lorentz";
    for (int n = 1; n <= n_max; ++n) m.log_norms.push_back(2.0 * n * std::log(gamma));
    return m;
}

MomentSequence MomentSequence::ohmic(double omega_c, int n_max) {
    require(omega_c > 0.0 && n_max >= 2, ErrorKind::invalid_argument, "Ohmic moments need omega_c > 0, N >= 2");
    MomentSequence m;
    m.source = "ohmic";
    // (2n-1)! omega_c^{2n}
    for (int n = 1; n <= n_max; ++n) m.log_norms.push_back(std::lgamma(2.0 * n) + 2.0 * n * std::log(omega_c));
    return m;
}

MomentSequence MomentSequence::bounded(double h_norm, double c, int n_max) {
    require(h_norm > 0.0 && c > 0.0 && n_max >= 2, ErrorKind::invalid_argument, "bounded moments need positive inputs");
    MomentSequence m;
    m.source = "bounded";
    for (int n = 1; n <= n_max; ++n) m.log_norms.push_back(std::log(c) + 2.0 * n * std::log(h_norm));
    return m;
}

MomentSequence MomentSequence::from_matrices(std::vector<Mat> omega, std::string source) {
    require(omega.size() >= 2, ErrorKind::invalid_argument, "moment sequence needs N >= 2");
    MomentSequence m;
    m.source = std::move(source);
    for (const auto& o : omega) m.log_norms.push_back(std::log(op_norm(o)));
    m.omega = std::move(omega);
    return m;
}

MomentSequence MomentSequence::from_modes(const std::vector<Mode>& modes, double beta, int n_max) {
    require(!modes.empty() && beta > 0.0 && n_max >= 2, ErrorKind::invalid_argument,
            "mode moments need modes, beta > 0, N >= 2");
    std::vector<Mat> om;
    for (int n = 1; n <= n_max; ++n) {
        double s = 0.0;
        for (const auto& md : modes)
            s += md.coupling * md.coupling / std::tanh(0.5 * beta * md.omega) * std::pow(md.omega, 2.0 * n);
        om.push_back(Mat::Constant(1, 1, (n % 2 ? -1.0 : 1.0) * s));
    }
    return from_matrices(std::move(om), "discrete-modes");
}

MomentSequence MomentSequence::scaled(double lambda) const {
    require(lambda > 0.0, ErrorKind::invalid_argument, "scale must be > 0");
    MomentSequence m = *this;
    for (std::size_t k = 0; k < m.log_norms.size(); ++k) {
        const double n = static_cast<double>(k + 1);
        m.log_norms[k] += 2.0 * n * std::log(lambda);
        if (k < m.omega.size()) m.omega[k] *= std::pow(lambda, 2.0 * n);
    }
    return m;
}

std::string to_string(CarlemanClass c) {
    switch (c) {
        case CarlemanClass::satisfied: return "satisfied";
        case CarlemanClass::marginal: return "marginal";
        case CarlemanClass::undetermined: return "undetermined";
    }
    return "undetermined";
}

CarlemanReport carleman_classify(const MomentSequence& moments, BathKind, std::uint64_t seed, int probes) {
    const int n_max = moments.n_max();
    require(n_max >= 4, ErrorKind::invalid_argument, "Carleman classification needs N_max >= 4");
    CarlemanReport rep;
    double sum = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        const double t = std::exp(-moments.log_norms[static_cast<std::size_t>(n - 1)] / (2.0 * n));
        rep.terms.push_back(t);
        sum += t;
        rep.partial_sums.push_back(sum);
    }
    // least squares of log term on {1, log n} over the top half
    const int first = n_max / 2 + 1;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, cnt = 0;
    for (int n = first; n <= n_max; ++n) {
        const double x = std::log(static_cast<double>(n));
        const double y = std::log(rep.terms[static_cast<std::size_t>(n - 1)]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        cnt += 1;
    }
    const double den = cnt * sxx - sx * sx;
    rep.slope = den > 0 ? (cnt * sxy - sx * sy) / den : 0.0;
    rep.intercept = (sy - rep.slope * sx) / cnt;
    if (rep.slope > -0.2)
        rep.classification = CarlemanClass::satisfied;
    else if (rep.slope >= -1.2 && rep.slope <= -0.8)
        rep.classification = CarlemanClass::marginal;
    else
        rep.classification = CarlemanClass::undetermined;

    if (!moments.omega.empty()) {
        rep.positivity_probed = true;
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> nd;
        for (int n = 1; n <= static_cast<int>(moments.omega.size()); ++n) {
            const Mat m2 = moments.sign_corrected(n);
            const double scale = op_norm(m2);
            for (int p = 0; p < probes; ++p) {
                Vec v(m2.rows());
                for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = cplx(nd(rng), nd(rng));
                const cplx e = v.dot(m2 * v);
                if (e.real() < -1e-12 * scale * v.squaredNorm()) {
                    rep.positivity_ok = false;
                    std::ostringstream os;
                    os << "M_" << 2 * n << " is not positive on a probe vector; spectral hypothesis suspect";
                    rep.warnings.push_back(os.str());
                    break;
                }
            }
        }
    }
    return rep;
}

}  // namespace nzkk
