// core.hpp: shared numeric aliases, errors, time grids and the worker pool
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nzkk {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr cplx I{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

enum class ErrorKind {
    invalid_argument,
    model_mismatch,
    dimension,
    numerical,
    io,
    validation,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);
inline void require(bool cond, ErrorKind kind, const std::string& what) {
    if (!cond) fail(kind, what);
}

// Uniform grid t_n = n*dt, n = 0..n_steps-1.
struct TimeGrid {
    double dt = 0.01;
    std::size_t n_steps = 0;

    double t_max() const { return dt * static_cast<double>(n_steps); }
    double t(std::size_t n) const { return dt * static_cast<double>(n); }
    void check() const;
    bool operator==(const TimeGrid& o) const { return dt == o.dt && n_steps == o.n_steps; }
};

Mat kron(const Mat& a, const Mat& b);

// Operator (largest singular value) norm.
double op_norm(const Mat& m);

// Worker count: hardware concurrency capped by NZKK_THREADS.
unsigned worker_count();

// Runs body(i) for i in [0, n) on up to worker_count() threads. Results must be
// written to per-index slots so that output never depends on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace nzkk
