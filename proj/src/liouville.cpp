// liouville.cpp
#include "nzkk/liouville.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace nzkk {

Vec vec(const Mat& a) {
    return Eigen::Map<const Vec>(a.data(), a.size());
}

Mat unvec(const Vec& v, int d) {
    require(v.size() == static_cast<Eigen::Index>(d) * d, ErrorKind::dimension, "unvec: size mismatch");
    return Eigen::Map<const Mat>(v.data(), d, d);
}

Mat commutator_matrix(const Mat& h) {
    const Eigen::Index d = h.rows();
    const Mat id = Mat::Identity(d, d);
    return kron(id, h) - kron(h.transpose(), id);
}

Mat system_liouvillian(const Mat& h) { return -I * commutator_matrix(h); }

SuperOperator liouvillian_matrix(const JointHamiltonian& h) {
    require(h.matrix.rows() == h.matrix.cols() && h.matrix.rows() == h.dim(), ErrorKind::dimension,
            "Hamiltonian dimension does not match ds*db");
    return {commutator_matrix(h.matrix), h.ds, h.db, SuperLabel::liouvillian};
}

Mat partial_trace_bath(const Mat& rho, int ds, int db) {
    require(rho.rows() == static_cast<Eigen::Index>(ds) * db, ErrorKind::dimension,
            "partial trace: dimension mismatch");
    Mat out = Mat::Zero(ds, ds);
    for (int a = 0; a < ds; ++a)
        for (int b = 0; b < ds; ++b) {
            cplx s = 0.0;
            for (int n = 0; n < db; ++n) s += rho(a * db + n, b * db + n);
            out(a, b) = s;
        }
    return out;
}

std::pair<SuperOperator, SuperOperator> nz_projection(const Mat& rho_ref, int ds, int db) {
    require(rho_ref.rows() == db && rho_ref.cols() == db, ErrorKind::dimension,
            "reference state has wrong dimension");
    require(std::abs(rho_ref.trace() - 1.0) < 1e-10, ErrorKind::invalid_argument,
            "reference state must have unit trace");
    const Eigen::Index d = static_cast<Eigen::Index>(ds) * db;
    Mat p = Mat::Zero(d * d, d * d);
    for (int a = 0; a < ds; ++a)
        for (int b = 0; b < ds; ++b)
            for (int n = 0; n < db; ++n)
                for (int m = 0; m < db; ++m) {
                    const Eigen::Index row = (a * db + n) + (b * db + m) * d;
                    for (int k = 0; k < db; ++k) {
                        const Eigen::Index col = (a * db + k) + (b * db + k) * d;
                        p(row, col) = rho_ref(n, m);
                    }
                }
    Mat q = Mat::Identity(d * d, d * d) - p;
    return {SuperOperator{std::move(p), ds, db, SuperLabel::projection_P},
            SuperOperator{std::move(q), ds, db, SuperLabel::complement_Q}};
}

SpectrumReport qlq_spectrum(const JointHamiltonian& h, const Mat& rho_ref, const QlqOptions& opts) {
    const std::size_t d = static_cast<std::size_t>(h.dim());
    if (d * d > opts.dim_sq_cap) {
        std::ostringstream os;
        os << "QLQ dimension " << d * d << " exceeds cap " << opts.dim_sq_cap;
        fail(ErrorKind::dimension, os.str());
    }
    const auto lmat = liouvillian_matrix(h);
    const auto [p, q] = nz_projection(rho_ref, h.ds, h.db);
    const Mat m = q.matrix * lmat.matrix * q.matrix;

    SpectrumReport r;
    r.d = static_cast<int>(d);
    r.reality_threshold = opts.reality_threshold;
    r.nonhermiticity_frobenius = (m - m.adjoint()).norm();
    r.projector_idempotency_error = (p.matrix * p.matrix - p.matrix).norm();
    r.projector_nonorthogonality = (p.matrix - p.matrix.adjoint()).norm();

    // split into connected components of the sparsity pattern; eigenvectors are block diagonal
    const Eigen::Index n = m.rows();
    std::vector<Eigen::Index> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), Eigen::Index{0});
    auto root = [&](Eigen::Index i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i)
            if (m(i, j) != 0.0) parent[root(i)] = root(j);
    std::map<Eigen::Index, std::vector<Eigen::Index>> blocks;
    for (Eigen::Index i = 0; i < n; ++i) blocks[root(i)].push_back(i);

    double sv_max = 0.0, sv_min = INFINITY;
    for (const auto& [key, idx] : blocks) {
        const auto k = static_cast<Eigen::Index>(idx.size());
        Mat b(k, k);
        for (Eigen::Index j = 0; j < k; ++j)
            for (Eigen::Index i = 0; i < k; ++i) b(i, j) = m(idx[i], idx[j]);
        Eigen::ComplexEigenSolver<Mat> es(b, true);
        if (es.info() != Eigen::Success) {
            std::ostringstream os;
            os << "QLQ eigensolver failed; block (" << k << "x" << k << "):\n" << b;
            fail(ErrorKind::numerical, os.str());
        }
        for (Eigen::Index e = 0; e < k; ++e) r.eigenvalues.push_back(es.eigenvalues()(e));
        Eigen::BDCSVD<Mat> svd(es.eigenvectors());
        const auto& sv = svd.singularValues();
        sv_max = std::max(sv_max, sv(0));
        sv_min = std::min(sv_min, sv(k - 1));
    }
    r.blocks = static_cast<int>(blocks.size());
    for (const auto& ev : r.eigenvalues) r.max_abs_imag = std::max(r.max_abs_imag, std::abs(ev.imag()));
    r.eigvec_condition = sv_min > 0.0 ? sv_max / sv_min : INFINITY;
    return r;
}

}  // namespace nzkk
