// model.cpp
#include "nzkk/model.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <sstream>

namespace nzkk {

std::string to_string(BathKind k) {
    switch (k) {
        case BathKind::single_mode_fock: return "single-mode-fock";
        case BathKind::discrete_multimode: return "discrete-multimode";
        case BathKind::drude_lorentz: return "drude-lorentz";
        case BathKind::ohmic: return "ohmic";
        case BathKind::sub_ohmic: return "sub-ohmic";
    }
    return "?";
}

std::string to_string(NodePlacement p) {
    switch (p) {
        case NodePlacement::linear: return "linear";
        case NodePlacement::logarithmic: return "logarithmic";
        case NodePlacement::centroid: return "centroid";
        case NodePlacement::equal_reorganization: return "equal-reorganization";
    }
    return "?";
}

NodePlacement parse_node_placement(const std::string& s) {
    if (s == "linear") return NodePlacement::linear;
    if (s == "logarithmic") return NodePlacement::logarithmic;
    if (s == "centroid") return NodePlacement::centroid;
    if (s == "equal-reorganization") return NodePlacement::equal_reorganization;
    fail(ErrorKind::validation, "unknown node placement '" + s + "'");
}

void BathSpec::validate() const {
    require(std::isfinite(cutoff) && cutoff > 0.0, ErrorKind::invalid_argument, "bath cutoff must be > 0");
    require(beta >= 0.0, ErrorKind::invalid_argument, "inverse temperature must be >= 0");
    if (kind == BathKind::sub_ohmic)
        require(exponent > 0.0 && exponent < 1.0, ErrorKind::invalid_argument,
                "sub-Ohmic exponent must lie in (0, 1)");
    if (kind == BathKind::single_mode_fock || kind == BathKind::discrete_multimode)
        require(fock_truncation >= 1, ErrorKind::invalid_argument, "Fock truncation must be >= 1");
    if (kind == BathKind::discrete_multimode)
        require(mode_count >= 1 || !modes.empty(), ErrorKind::invalid_argument, "mode count must be >= 1");
}

std::vector<Mode> BathSpec::resolved_modes() const {
    if (!modes.empty()) return modes;
    return std::vector<Mode>(static_cast<std::size_t>(mode_count), Mode{cutoff, coupling});
}

BathSpec BathSpec::single_mode(double omega_c, double g, int n_max, double beta) {
    BathSpec b;
    b.kind = BathKind::single_mode_fock;
    b.cutoff = omega_c;
    b.coupling = g;
    b.fock_truncation = n_max;
    b.beta = beta;
    return b;
}

BathSpec BathSpec::discrete(std::vector<Mode> modes, int n_max, double beta) {
    BathSpec b;
    b.kind = BathKind::discrete_multimode;
    b.mode_count = static_cast<int>(modes.size());
    b.modes = std::move(modes);
    b.fock_truncation = n_max;
    b.beta = beta;
    return b;
}

BathSpec BathSpec::drude_lorentz(double lambda, double gamma, double beta) {
    BathSpec b;
    b.kind = BathKind::drude_lorentz;
    b.coupling = lambda;
    b.cutoff = gamma;
    b.beta = beta;
    return b;
}

BathSpec BathSpec::ohmic(double eta, double omega_c, double beta) {
    BathSpec b;
    b.kind = BathKind::ohmic;
    b.coupling = eta;
    b.cutoff = omega_c;
    b.beta = beta;
    return b;
}

BathSpec BathSpec::sub_ohmic(double eta, double omega_c, double s, double beta) {
    BathSpec b = ohmic(eta, omega_c, beta);
    b.kind = BathKind::sub_ohmic;
    b.exponent = s;
    return b;
}

Mat annihilation(int n_max) {
    const int n = n_max + 1;
    Mat a = Mat::Zero(n, n);
    for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
    return a;
}

namespace {

Mat symmetrize(const Mat& h) { return 0.5 * (h + h.adjoint()); }

const Mat& pauli_z() {
    static const Mat m = (Mat(2, 2) << 1.0, 0.0, 0.0, -1.0).finished();
    return m;
}
const Mat& pauli_x() {
    static const Mat m = (Mat(2, 2) << 0.0, 1.0, 1.0, 0.0).finished();
    return m;
}

}  // namespace

JointHamiltonian build_jc(const SystemSpec& system, const BathSpec& bath) {
    require(bath.kind == BathKind::single_mode_fock, ErrorKind::model_mismatch,
            "JC builder needs a single-mode-fock bath, got " + to_string(bath.kind));
    require(system.axis == CouplingAxis::raising_lowering, ErrorKind::model_mismatch,
            "JC builder needs raising/lowering coupling");
    bath.validate();
    const int nb = bath.fock_truncation + 1;
    const Mat a = annihilation(bath.fock_truncation);
    const Mat ib = Mat::Identity(nb, nb);
    // index 0 = e, 1 = g
    Mat sp = Mat::Zero(2, 2);
    sp(0, 1) = 1.0;
    const Mat sm = sp.adjoint();

    JointHamiltonian h;
    h.ds = 2;
    h.db = nb;
    h.system = system;
    h.bath = bath;
    h.system_hamiltonian = 0.5 * system.level_splitting * pauli_z();
    h.bath_hamiltonian = bath.cutoff * a.adjoint() * a;
    h.coupling_operator = sp;
    h.matrix = kron(h.system_hamiltonian, ib) + kron(Mat::Identity(2, 2), h.bath_hamiltonian) +
               bath.coupling * (kron(sp, a) + kron(sm, a.adjoint()));
    h.matrix = symmetrize(h.matrix);
    return h;
}

std::size_t spin_boson_dimension(int mode_count, int n_max, std::size_t dim_cap) {
    require(mode_count >= 1 && n_max >= 1, ErrorKind::invalid_argument,
            "spin-boson needs mode_count >= 1 and n_max >= 1");
    std::size_t d = 2;
    for (int k = 0; k < mode_count; ++k) {
        if (d > std::numeric_limits<std::size_t>::max() / static_cast<std::size_t>(n_max + 1)) {
            d = std::numeric_limits<std::size_t>::max();
            break;
        }
        d *= static_cast<std::size_t>(n_max + 1);
    }
    if (d > dim_cap) {
        std::ostringstream os;
        os << "spin-boson dimension " << d << " exceeds cap " << dim_cap;
        fail(ErrorKind::dimension, os.str());
    }
    return d;
}

JointHamiltonian build_spin_boson(const SystemSpec& system, const BathSpec& bath, std::size_t dim_cap) {
    require(bath.kind == BathKind::discrete_multimode, ErrorKind::model_mismatch,
            "spin-boson builder needs a discrete-multimode bath, got " + to_string(bath.kind));
    require(system.axis == CouplingAxis::sigma_z, ErrorKind::model_mismatch,
            "spin-boson builder needs sigma_z coupling");
    bath.validate();
    const auto modes = bath.resolved_modes();
    const int nm = bath.fock_truncation;
    const std::size_t d = spin_boson_dimension(static_cast<int>(modes.size()), nm, dim_cap);
    const int nb = static_cast<int>(d / 2);

    const Mat a = annihilation(nm);
    const Mat num = a.adjoint() * a;
    const Mat x = a + a.adjoint();
    auto embed = [&](const Mat& op, std::size_t which) {
        Mat out = Mat::Identity(1, 1);
        for (std::size_t k = 0; k < modes.size(); ++k)
            out = kron(out, k == which ? op : Mat::Identity(nm + 1, nm + 1));
        return out;
    };

    Mat hb = Mat::Zero(nb, nb);
    Mat bop = Mat::Zero(nb, nb);
    for (std::size_t k = 0; k < modes.size(); ++k) {
        hb += modes[k].omega * embed(num, k);
        bop += modes[k].coupling * embed(x, k);
    }

    JointHamiltonian h;
    h.ds = 2;
    h.db = nb;
    h.system = system;
    h.bath = bath;
    h.system_hamiltonian = 0.5 * system.level_splitting * pauli_x();
    h.bath_hamiltonian = hb;
    h.coupling_operator = pauli_z();
    h.matrix = kron(h.system_hamiltonian, Mat::Identity(nb, nb)) + kron(Mat::Identity(2, 2), hb) +
               kron(pauli_z(), bop);
    h.matrix = symmetrize(h.matrix);
    return h;
}

double spectral_density(const BathSpec& bath, double omega) {
    require(bath.analytic(), ErrorKind::model_mismatch, "spectral density needs an analytic bath kind");
    require(omega >= 0.0, ErrorKind::invalid_argument, "spectral density needs omega >= 0");
    const double wc = bath.cutoff;
    switch (bath.kind) {
        case BathKind::drude_lorentz:
            return 2.0 * bath.coupling * wc * omega / (omega * omega + wc * wc);
        case BathKind::ohmic:
            return bath.coupling * omega * std::exp(-omega / wc);
        case BathKind::sub_ohmic:
            return bath.coupling * std::pow(omega, bath.exponent) * std::exp(-omega / wc) /
                   std::pow(wc, bath.exponent - 1.0);
        default:
            break;
    }
    return 0.0;
}

std::vector<Mode> discretize_bath(const BathSpec& bath, int mode_count, NodePlacement placement) {
    require(mode_count >= 1, ErrorKind::invalid_argument, "mode_count must be >= 1");
    require(bath.analytic(), ErrorKind::model_mismatch, "discretization needs an analytic bath kind");
    bath.validate();
    const auto n = static_cast<std::size_t>(mode_count);
    const double w_hi = 4.0 * bath.cutoff;
    std::vector<Mode> out(n);
    auto J = [&](double w) { return spectral_density(bath, w); };

    switch (placement) {
        case NodePlacement::linear: {
            const double dw = w_hi / mode_count;
            for (std::size_t k = 0; k < n; ++k) {
                const double w = (static_cast<double>(k) + 0.5) * dw;
                out[k] = {w, std::sqrt(J(w) * dw / kPi)};
            }
            break;
        }
        case NodePlacement::logarithmic: {
            const double w_lo = 1e-3 * w_hi;
            const double r = std::pow(w_hi / w_lo, 1.0 / mode_count);
            for (std::size_t k = 0; k < n; ++k) {
                const double a = w_lo * std::pow(r, static_cast<double>(k));
                const double b = a * r;
                const double w = std::sqrt(a * b);
                out[k] = {w, std::sqrt(J(w) * (b - a) / kPi)};
            }
            break;
        }
        case NodePlacement::centroid: {
            using boost::math::quadrature::gauss_kronrod;
            const double dw = w_hi / mode_count;
            for (std::size_t k = 0; k < n; ++k) {
                const double a = static_cast<double>(k) * dw;
                const double b = a + dw;
                const double mass = gauss_kronrod<double, 61>::integrate(J, a, b, 8, 1e-13);
                const double first = gauss_kronrod<double, 61>::integrate(
                    [&](double w) { return w * J(w); }, a, b, 8, 1e-13);
                const double w = mass > 0.0 ? first / mass : 0.5 * (a + b);
                out[k] = {w, std::sqrt(std::max(0.0, mass) / kPi)};
            }
            break;
        }
        case NodePlacement::equal_reorganization: {
            require(bath.kind == BathKind::drude_lorentz, ErrorKind::model_mismatch,
                    "equal-reorganization placement is defined for Drude-Lorentz baths");
            for (std::size_t k = 0; k < n; ++k) {
                const double w =
                    bath.cutoff * std::tan(kPi * (static_cast<double>(k) + 0.5) / (2.0 * mode_count));
                out[k] = {w, std::sqrt(bath.coupling * w / mode_count)};
            }
            break;
        }
    }
    return out;
}

double reorganization_energy(const std::vector<Mode>& modes) {
    double s = 0.0;
    for (const auto& m : modes) s += m.coupling * m.coupling / m.omega;
    return s;
}

Mat thermal_state(const Mat& h_bath, double beta) {
    require(beta >= 0.0, ErrorKind::invalid_argument, "inverse temperature must be >= 0");
    const Eigen::Index n = h_bath.rows();
    if (beta == 0.0) return Mat::Identity(n, n) / static_cast<double>(n);
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h_bath + h_bath.adjoint()));
    const RVec e = es.eigenvalues();
    RVec w = (-beta * (e.array() - e.minCoeff())).exp();
    w /= w.sum();
    Mat rho = es.eigenvectors() * w.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
    return 0.5 * (rho + rho.adjoint());
}

cplx BathCorrelatorPoles::correlation(double t) const {
    cplx s = 0.0;
    for (const auto& p : poles) s += p.amplitude * std::exp(-p.rate * t);
    return s;
}

cplx BathCorrelatorPoles::transform(cplx omega) const {
    cplx s = 0.0;
    for (const auto& p : poles) s += p.amplitude / (p.rate - I * omega);
    return s;
}

cplx BathCorrelatorPoles::dissipative_transform(cplx omega) const {
    cplx s = 0.0;
    for (const auto& p : poles) s += I * p.amplitude.imag() / (p.rate - I * omega);
    return s;
}

BathCorrelatorPoles bath_correlator_poles(const BathSpec& bath, int matsubara_count) {
    require(bath.kind == BathKind::drude_lorentz, ErrorKind::model_mismatch,
            "pole decomposition is implemented for Drude-Lorentz baths only");
    require(matsubara_count >= 0, ErrorKind::invalid_argument, "matsubara_count must be >= 0");
    require(bath.beta > 0.0, ErrorKind::invalid_argument, "pole decomposition needs beta > 0");
    bath.validate();
    BathCorrelatorPoles out;
    out.matsubara_count = matsubara_count;
    const double lam = bath.coupling;
    const double gam = bath.cutoff;
    const double beta = bath.beta;
    if (lam == 0.0) return out;
    const double half = 0.5 * beta * gam;
    require(std::abs(std::sin(half)) > 1e-12, ErrorKind::numerical,
            "Drude pole coincides with a Matsubara frequency");
    out.poles.push_back({lam * gam * cplx(std::cos(half) / std::sin(half), -1.0), gam});
    for (int k = 1; k <= matsubara_count; ++k) {
        const double nu = 2.0 * kPi * k / beta;
        out.poles.push_back({4.0 * lam * gam / beta * nu / (nu * nu - gam * gam), nu});
    }
    return out;
}

cplx discrete_correlation(const std::vector<Mode>& modes, double beta, double t) {
    require(beta > 0.0, ErrorKind::invalid_argument, "discrete correlation needs beta > 0");
    cplx s = 0.0;
    for (const auto& m : modes) {
        const double g2 = m.coupling * m.coupling;
        const double coth = 1.0 / std::tanh(0.5 * beta * m.omega);
        s += g2 * cplx(coth * std::cos(m.omega * t), -std::sin(m.omega * t));
    }
    return s;
}

}  // namespace nzkk
