// zeros.cpp
#include "nzkk/zeros.hpp"

#include "nzkk/model.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace nzkk {

cplx PoleSum::operator()(cplx z) const {
    cplx s = 0.0;
    for (std::size_t n = 0; n < poles.size(); ++n) s += amplitudes[n] / (z - poles[n]);
    return I * s;
}

cplx PoleSum::derivative(cplx z) const {
    cplx s = 0.0;
    for (std::size_t n = 0; n < poles.size(); ++n) {
        const cplx d = z - poles[n];
        s += amplitudes[n] / (d * d);
    }
    return -I * s;
}

double PoleSum::weight() const {
    double s = 0.0;
    for (const auto& a : amplitudes) s += std::abs(a);
    return s;
}

double PoleSum::distance_to_pole(cplx z) const {
    double d = INFINITY;
    for (double p : poles) d = std::min(d, std::abs(z - p));
    return d;
}

PoleSum PoleSum::from_terms(const std::vector<double>& poles, const std::vector<cplx>& amps, double merge_tol,
                            double drop_tol) {
    require(poles.size() == amps.size(), ErrorKind::dimension, "pole sum: sizes differ");
    std::vector<std::size_t> order(poles.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return poles[a] < poles[b]; });
    PoleSum merged;
    double anchor = 0.0;
    for (auto k : order) {
        if (!merged.poles.empty() && poles[k] - anchor <= merge_tol) {
            merged.amplitudes.back() += amps[k];
        } else {
            anchor = poles[k];
            merged.poles.push_back(poles[k]);
            merged.amplitudes.push_back(amps[k]);
        }
    }
    const double total = merged.weight();
    PoleSum out;
    for (std::size_t n = 0; n < merged.poles.size(); ++n) {
        if (std::abs(merged.amplitudes[n]) > drop_tol * total) {
            out.poles.push_back(merged.poles[n]);
            out.amplitudes.push_back(merged.amplitudes[n]);
        }
    }
    return out;
}

PoleSum channel_pole_sum(const ReducedResolvent& r, const Mat& weights, double merge_tol, double drop_tol) {
    require(weights.rows() == r.ds && weights.cols() == r.ds, ErrorKind::dimension, "channel weights: wrong size");
    const Eigen::Index d = r.bohr.rows();
    std::vector<double> poles;
    std::vector<cplx> amps;
    poles.reserve(static_cast<std::size_t>(d * d));
    amps.reserve(static_cast<std::size_t>(d * d));
    for (Eigen::Index k = 0; k < d; ++k)
        for (Eigen::Index l = 0; l < d; ++l) {
            cplx a = 0.0;
            for (int j = 0; j < r.ds; ++j)
                for (int i = 0; i < r.ds; ++i)
                    if (weights(i, j) != 0.0) a += weights(i, j) * r.amps[i + j * r.ds](k, l);
            poles.push_back(r.bohr(k, l));
            amps.push_back(a);
        }
    return PoleSum::from_terms(poles, amps, merge_tol, drop_tol);
}

PoleSum channel_pole_sum(const ReducedResolvent& r, int i, int j, double merge_tol, double drop_tol) {
    Mat w = Mat::Zero(r.ds, r.ds);
    w(i, j) = 1.0;
    return channel_pole_sum(r, w, merge_tol, drop_tol);
}

cplx sigma_channel_transform(const PoleSum& f, cplx z) {
    for (double p : f.poles)
        if (z == cplx(p, 0.0)) {
            std::ostringstream os;
            os << "transform evaluated exactly at the Bohr frequency " << p;
            fail(ErrorKind::invalid_argument, os.str());
        }
    return f(z);
}

std::vector<cplx> numerator_roots(const PoleSum& f) {
    const std::size_t n = f.poles.size();
    if (n <= 1) return {};
    // coefficients, lowest order first
    std::vector<cplx> num(n, 0.0);
    for (std::size_t a = 0; a < n; ++a) {
        std::vector<cplx> prod{1.0};
        for (std::size_t b = 0; b < n; ++b) {
            if (b == a) continue;
            std::vector<cplx> next(prod.size() + 1, 0.0);
            for (std::size_t q = 0; q < prod.size(); ++q) {
                next[q + 1] += prod[q];
                next[q] -= f.poles[b] * prod[q];
            }
            prod = std::move(next);
        }
        for (std::size_t q = 0; q < prod.size(); ++q) num[q] += f.amplitudes[a] * prod[q];
    }
    double mag = 0.0;
    for (const auto& c : num) mag = std::max(mag, std::abs(c));
    while (num.size() > 1 && std::abs(num.back()) <= 1e-14 * mag) num.pop_back();
    const std::size_t deg = num.size() - 1;
    if (deg == 0) return {};
    Mat comp = Mat::Zero(static_cast<Eigen::Index>(deg), static_cast<Eigen::Index>(deg));
    for (std::size_t q = 1; q < deg; ++q) comp(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(q - 1)) = 1.0;
    for (std::size_t q = 0; q < deg; ++q) comp(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(deg - 1)) = -num[q] / num[deg];
    Eigen::ComplexEigenSolver<Mat> es(comp, false);
    std::vector<cplx> roots(es.eigenvalues().data(), es.eigenvalues().data() + deg);
    std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return roots;
}

namespace {

bool usable(cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()) && std::abs(v) > 0.0; }

struct Rect {
    double x0, x1, y0, y1;
    bool contains(cplx z, double tol) const {
        return z.real() >= x0 - tol && z.real() < x1 + tol && z.imag() >= y0 - tol && z.imag() < y1 + tol;
    }
    cplx at(double u, double v) const { return {x0 + u * (x1 - x0), y0 + v * (y1 - y0)}; }
};

class Scanner {
public:
    Scanner(const PoleSum& f, const ScanOptions& o) : f_(f), o_(o) {}

    // Zeros minus poles enclosed, by adaptive argument tracking.
    int winding(const Rect& r, bool& ok) const {
        const cplx c[4] = {{r.x0, r.y0}, {r.x1, r.y0}, {r.x1, r.y1}, {r.x0, r.y1}};
        double total = 0.0;
        for (int e = 0; e < 4; ++e) total += edge(c[e], c[(e + 1) % 4], ok);
        const double w = total / (2.0 * kPi);
        const long wi = std::lround(w);
        if (std::abs(w - static_cast<double>(wi)) > 0.25) ok = false;
        return static_cast<int>(wi);
    }

    int count(const Rect& r, bool& ok) const {
        int poles = 0;
        for (double p : f_.poles)
            if (p > r.x0 && p < r.x1 && r.y0 < 0.0 && r.y1 > 0.0) ++poles;
        return winding(r, ok) + poles;
    }

    ZeroRecord newton(cplx z) const {
        ZeroRecord rec;
        cplx fz = f_(z);
        int it = 0;
        bool small_step = false;
        for (; it < o_.max_newton; ++it) {
            if (!usable(fz)) break;
            const cplx d = f_.derivative(z);
            if (!usable(d)) break;
            const cplx step = fz / d;
            double lam = 1.0;
            cplx zn = z - step;
            cplx fn = f_(zn);
            while (!(std::isfinite(std::abs(fn)) && std::abs(fn) < std::abs(fz)) && lam > 1e-4) {
                lam *= 0.5;
                zn = z - lam * step;
                fn = f_(zn);
            }
            if (!std::isfinite(std::abs(fn))) break;
            const double moved = std::abs(zn - z);
            z = zn;
            fz = fn;
            small_step = moved <= 4e-16 * std::max(1.0, std::abs(z));
            if (std::abs(fz) < o_.residual_tol && small_step) break;
            if (std::abs(fz) == 0.0) break;
        }
        rec.z = z;
        rec.residual = std::abs(fz);
        rec.converged = std::isfinite(rec.residual) && rec.residual < o_.residual_tol;
        rec.near_pole = f_.distance_to_pole(z) <= o_.pole_separation;
        return rec;
    }

    void locate(const Rect& r, int c, int depth, std::vector<ZeroRecord>& out,
                std::vector<ZeroRecord>& failed) const {
        if (c <= 0) return;
        if (c > 1 && depth < o_.max_depth) {
            const double xm = 0.5 * (r.x0 + r.x1), ym = 0.5 * (r.y0 + r.y1);
            const Rect sub[4] = {{r.x0, xm, r.y0, ym}, {xm, r.x1, r.y0, ym}, {r.x0, xm, ym, r.y1}, {xm, r.x1, ym, r.y1}};
            int counts[4];
            int sum = 0;
            bool ok = true;
            for (int q = 0; q < 4; ++q) {
                counts[q] = count(sub[q], ok);
                sum += counts[q];
            }
            if (ok && sum == c) {
                for (int q = 0; q < 4; ++q) locate(sub[q], counts[q], depth + 1, out, failed);
                return;
            }
        }
        seed(r, c, out, failed);
    }

private:
    double edge(cplx a, cplx b, bool& ok) const {
        const int n0 = 8;
        double s = 0.0;
        cplx za = a, fa = f_(a);
        for (int k = 1; k <= n0; ++k) {
            const cplx zb = a + (b - a) * (static_cast<double>(k) / n0);
            const cplx fb = f_(zb);
            s += segment(za, fa, zb, fb, 0, ok);
            za = zb;
            fa = fb;
        }
        return s;
    }

    double segment(cplx a, cplx fa, cplx b, cplx fb, int depth, bool& ok) const {
        if (!usable(fa) || !usable(fb)) {
            ok = false;
            return 0.0;
        }
        const double d = std::arg(fb / fa);
        if (std::abs(d) < 0.25 * kPi) return d;
        if (depth >= 48) {
            ok = false;
            return d;
        }
        const cplx m = 0.5 * (a + b);
        const cplx fm = f_(m);
        return segment(a, fa, m, fm, depth + 1, ok) + segment(m, fm, b, fb, depth + 1, ok);
    }

    void seed(const Rect& r, int c, std::vector<ZeroRecord>& out, std::vector<ZeroRecord>& failed) const {
        const double tol = 1e-9 * std::max(r.x1 - r.x0, r.y1 - r.y0);
        std::vector<ZeroRecord> found;
        ZeroRecord last_failed;
        bool any_failed = false;
        for (int level = 1; level <= 4 && static_cast<int>(found.size()) < c; ++level) {
            const int k = 2 * level - 1;  // 1, 3, 5, 7 seeds per side
            for (int a = 0; a < k && static_cast<int>(found.size()) < c; ++a)
                for (int b = 0; b < k && static_cast<int>(found.size()) < c; ++b) {
                    const auto rec = newton(r.at((a + 0.5) / k, (b + 0.5) / k));
                    if (!rec.converged) {
                        last_failed = rec;
                        any_failed = true;
                        continue;
                    }
                    if (!r.contains(rec.z, tol)) continue;
                    bool dup = false;
                    for (const auto& z : found) dup = dup || std::abs(z.z - rec.z) <= o_.merge_tol;
                    if (!dup) found.push_back(rec);
                }
        }
        // zeros hiding next to a pole (near-cancelling doublets) are out of reach from the cell seeds
        for (double p : f_.poles) {
            if (static_cast<int>(found.size()) >= c) break;
            if (!(p > r.x0 && p < r.x1 && r.y0 < 0.0 && r.y1 > 0.0)) continue;
            for (double delta = 1e-2 * (r.x1 - r.x0); delta > 1e-12 && static_cast<int>(found.size()) < c; delta *= 0.1)
                for (cplx dir : {cplx(1, 0), cplx(-1, 0), cplx(0, 1), cplx(0, -1)}) {
                    const auto rec = newton(p + delta * dir);
                    if (!r.contains(rec.z, tol)) continue;
                    if (!rec.converged) {
                        if (rec.near_pole && f_.distance_to_pole(rec.z) > 0.0) {
                            last_failed = rec;
                            any_failed = true;
                        }
                        continue;
                    }
                    bool dup = false;
                    for (const auto& z : found) dup = dup || std::abs(z.z - rec.z) <= o_.merge_tol;
                    if (!dup) found.push_back(rec);
                    if (static_cast<int>(found.size()) >= c) break;
                }
        }
        if (found.size() == 1 && c > 1) found.front().multiplicity = c;
        if (found.empty() && any_failed && r.contains(last_failed.z, tol)) failed.push_back(last_failed);
        out.insert(out.end(), found.begin(), found.end());
    }

    const PoleSum& f_;
    const ScanOptions& o_;
};

struct Attempt {
    std::vector<ZeroRecord> zeros;
    std::vector<ZeroRecord> failed;
    std::size_t unreliable = 0;
    std::size_t mismatches = 0;
    std::size_t cells_with_zeros = 0;
    double shift = 0.0;
};

Attempt scan_attempt(const PoleSum& f, const ScanRegion& g, const ScanOptions& o, double shift) {
    const double hx = (g.re_hi - g.re_lo) / g.nx;
    const double hy = (g.im_hi - g.im_lo) / g.ny;
    const int nx = g.nx + (shift > 0.0 ? 1 : 0);
    const int ny = g.ny + (shift > 0.0 ? 1 : 0);
    const double x0 = g.re_lo - shift * hx;
    const double y0 = g.im_lo - shift * hy;
    const Scanner sc(f, o);

    const std::size_t ncell = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
    std::vector<int> counts(ncell, 0);
    std::vector<char> reliable(ncell, 1);
    std::vector<std::vector<ZeroRecord>> found(ncell), failed(ncell);
    auto rect = [&](std::size_t c) {
        const int ix = static_cast<int>(c % static_cast<std::size_t>(nx));
        const int iy = static_cast<int>(c / static_cast<std::size_t>(nx));
        return Rect{x0 + ix * hx, x0 + (ix + 1) * hx, y0 + iy * hy, y0 + (iy + 1) * hy};
    };
    parallel_for(ncell, [&](std::size_t c) {
        const Rect r = rect(c);
        bool ok = true;
        counts[c] = sc.count(r, ok);
        reliable[c] = ok && counts[c] >= 0;
        if (ok && counts[c] > 0) sc.locate(r, counts[c], 0, found[c], failed[c]);
    });

    Attempt at;
    at.shift = shift;
    for (std::size_t c = 0; c < ncell; ++c) {
        if (!reliable[c]) ++at.unreliable;
        if (counts[c] > 0) ++at.cells_with_zeros;
        for (const auto& z : found[c]) {
            bool dup = false;
            for (auto& y : at.zeros)
                if (std::abs(y.z - z.z) <= o.merge_tol) {
                    y.multiplicity = std::max(y.multiplicity, z.multiplicity);
                    dup = true;
                }
            if (!dup) at.zeros.push_back(z);
        }
        at.failed.insert(at.failed.end(), failed[c].begin(), failed[c].end());
    }
    // audit: refined zeros per cell against the winding count
    std::vector<int> assigned(ncell, 0);
    for (const auto& z : at.zeros) {
        const double fx = (z.z.real() - x0) / hx, fy = (z.z.imag() - y0) / hy;
        if (fx < 0 || fy < 0 || fx >= nx || fy >= ny) continue;
        assigned[static_cast<std::size_t>(fy) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(fx)] +=
            z.multiplicity;
    }
    for (std::size_t c = 0; c < ncell; ++c)
        if (!reliable[c] || assigned[c] != std::max(counts[c], 0)) ++at.mismatches;
    return at;
}

bool grid_hits_pole(const PoleSum& f, const ScanRegion& g, double shift) {
    const double hx = (g.re_hi - g.re_lo) / g.nx;
    const double hy = (g.im_hi - g.im_lo) / g.ny;
    const double x0 = g.re_lo - shift * hx;
    const double y0 = g.im_lo - shift * hy;
    const int nx = g.nx + (shift > 0.0 ? 1 : 0);
    const int ny = g.ny + (shift > 0.0 ? 1 : 0);
    bool any_in_band = false;
    for (double p : f.poles) {
        const double u = (p - x0) / hx;
        if (u < -1e-6 || u > nx + 1e-6) continue;
        any_in_band = true;
        if (std::abs(u - std::round(u)) < 1e-6) return true;
    }
    const double v = (0.0 - y0) / hy;
    return any_in_band && v >= -1e-6 && v <= ny + 1e-6 && std::abs(v - std::round(v)) < 1e-6;
}

}  // namespace

ZeroScanResult scan_zeros(const PoleSum& f, const ScanRegion& region, const ScanOptions& opts,
                          const std::string& channel, double coupling) {
    require(region.re_hi > region.re_lo && region.im_hi > region.im_lo && region.nx >= 1 && region.ny >= 1,
            ErrorKind::invalid_argument, "scan region is empty");
    static const double shifts[] = {0.0, 0.2360679774997897, 0.3819660112501051, 0.1458980337503155,
                                    0.4721359549995794, 0.0901699437494742};
    Attempt best;
    bool have = false;
    for (double s : shifts) {
        if (grid_hits_pole(f, region, s)) continue;
        Attempt at = scan_attempt(f, region, opts, s);
        const bool better = !have || at.unreliable + at.mismatches < best.unreliable + best.mismatches;
        if (better) {
            best = std::move(at);
            have = true;
        }
        if (best.unreliable == 0 && best.mismatches == 0) break;
    }
    require(have, ErrorKind::numerical, "scan grid could not be moved off the poles");

    ZeroScanResult res;
    res.channel = channel;
    res.coupling = coupling;
    res.region = region;
    res.grid_shift = best.shift;
    res.cells_with_zeros = best.cells_with_zeros;
    res.audit_mismatches = best.mismatches;
    for (const auto& z : best.zeros)
        if (region.contains(z.z)) res.zeros.push_back(z);
    for (const auto& z : best.failed)
        if (region.contains(z.z)) {
            res.zeros.push_back(z);
            ++res.nonconverged;
        }
    std::sort(res.zeros.begin(), res.zeros.end(), [](const ZeroRecord& a, const ZeroRecord& b) {
        return a.z.real() != b.z.real() ? a.z.real() < b.z.real() : a.z.imag() < b.z.imag();
    });
    for (const auto& z : res.zeros) {
        if (z.near_pole) ++res.near_pole;
        if (!z.converged) continue;
        res.total_count += static_cast<std::size_t>(z.multiplicity);
        if (z.z.imag() > opts.uhp_tol) {
            res.uhp_count += static_cast<std::size_t>(z.multiplicity);
            res.max_uhp_imag = std::max(res.max_uhp_imag, z.z.imag());
        }
        const cplx mirror = -std::conj(z.z);
        if (f.distance_to_pole(mirror) > 0.0) res.max_pair_residual = std::max(res.max_pair_residual, std::abs(f(mirror)));
    }
    res.uhp_fraction = res.total_count ? static_cast<double>(res.uhp_count) / static_cast<double>(res.total_count) : 0.0;
    return res;
}

std::vector<ZeroScanResult> sweep(const std::function<PoleSum(double)>& build, const std::vector<double>& couplings,
                                  const ScanRegion& region, const ScanOptions& opts, const std::string& channel) {
    std::vector<ZeroScanResult> out(couplings.size());
    parallel_for(couplings.size(), [&](std::size_t k) {
        out[k] = scan_zeros(build(couplings[k]), region, opts, channel, couplings[k]);
    });
    return out;
}

AnchorResult jc_analytic_anchor(double g, const ScanRegion& region, const ScanOptions& opts) {
    require(g >= 0.0, ErrorKind::invalid_argument, "anchor coupling must be >= 0");
    AnchorResult res;
    res.g = g;
    res.expected = g * std::sqrt(2.0);
    if (g <= 1e-12) {
        // Generic representation {0, +-2g} with weights 1/2, 1/4, 1/4 kept unmerged.
        PoleSum generic;
        generic.poles = {0.0, 2.0 * g, -2.0 * g};
        generic.amplitudes = {0.5, 0.25, 0.25};
        res.zeros = numerator_roots(generic);
        double spread = 0.0;
        for (const auto& a : res.zeros)
            for (const auto& b : res.zeros) spread = std::max(spread, std::abs(a - b));
        res.cluster = res.zeros.size() > 1 && spread <= 1e-8;
        res.multiplicity = static_cast<int>(res.zeros.size());
        for (const auto& z : res.zeros) {
            res.max_error = std::max(res.max_error, std::abs(std::abs(z) - res.expected));
            res.cancellation = res.cancellation || generic.distance_to_pole(z) <= opts.pole_separation;
        }
        return res;
    }
    const JointHamiltonian h = build_jc(SystemSpec::jc(1.0), BathSpec::single_mode(1.0, g, 1));
    Mat rho0 = Mat::Zero(h.dim(), h.dim());
    rho0(0, 0) = 1.0;  // |e, 0>
    const SpectralPropagator prop(h);
    const ReducedResolvent rr(prop, rho0);
    const auto f = channel_pole_sum(rr, 0, 0);
    const auto scan = scan_zeros(f, region, opts, "ee", g);
    res.audit_mismatches = scan.audit_mismatches;
    for (const auto& z : scan.zeros) res.zeros.push_back(z.z);
    const cplx expected[2] = {-res.expected, res.expected};
    for (const auto& e : expected) {
        double best = INFINITY;
        for (const auto& z : res.zeros) best = std::min(best, std::abs(z - e));
        res.max_error = std::max(res.max_error, best);
    }
    if (res.zeros.size() != 2) res.max_error = INFINITY;
    return res;
}

}  // namespace nzkk
