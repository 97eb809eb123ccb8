// liouville.hpp: column-stacked Liouville space: Liouvillian, projection pair, QLQ spectrum
#pragma once

#include "nzkk/core.hpp"
#include "nzkk/model.hpp"

#include <string>
#include <utility>
#include <vector>

namespace nzkk {

enum class SuperLabel { liouvillian, projection_P, complement_Q, projected_QLQ, other };

struct SuperOperator {
    Mat matrix;
    int ds = 1;
    int db = 1;
    SuperLabel label = SuperLabel::other;

    int dim() const { return ds * db; }
};

// vec(A)[i + j*d] = A(i, j)
Vec vec(const Mat& a);
Mat unvec(const Vec& v, int d);

// I (x) H - H^T (x) I, acting as vec([H, rho]).
Mat commutator_matrix(const Mat& h);
// -i [H, .]
Mat system_liouvillian(const Mat& h);

SuperOperator liouvillian_matrix(const JointHamiltonian& h);

// P rho = Tr_b[rho] (x) rho_ref in the joint (system-major) ordering; Q = 1 - P.
std::pair<SuperOperator, SuperOperator> nz_projection(const Mat& rho_ref, int ds, int db);

Mat partial_trace_bath(const Mat& rho, int ds, int db);

struct SpectrumReport {
    std::string label;
    int d = 0;
    std::vector<cplx> eigenvalues;
    double max_abs_imag = 0.0;
    double nonhermiticity_frobenius = 0.0;
    double eigvec_condition = 0.0;
    int blocks = 0;  // decoupled sectors solved separately
    double projector_idempotency_error = 0.0;
    double projector_nonorthogonality = 0.0;
    double reality_threshold = 1e-10;

    bool real() const { return max_abs_imag < reality_threshold; }
};

struct QlqOptions {
    std::size_t dim_sq_cap = 1764;
    double reality_threshold = 1e-10;
};

SpectrumReport qlq_spectrum(const JointHamiltonian& h, const Mat& rho_ref, const QlqOptions& opts = {});

}  // namespace nzkk
