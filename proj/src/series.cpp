// series.cpp
#include "nzkk/series.hpp"

namespace nzkk {

KernelSeries KernelSeries::from_scalar(const TimeGrid& grid, const std::vector<cplx>& v, std::string label) {
    KernelSeries k;
    k.grid = grid;
    k.channel_label = std::move(label);
    k.values.reserve(v.size());
    for (const auto& x : v) k.values.push_back(Mat::Constant(1, 1, x));
    return k;
}

std::vector<cplx> KernelSeries::element(int i, int j) const {
    std::vector<cplx> out(values.size());
    for (std::size_t n = 0; n < values.size(); ++n) out[n] = values[n](i, j);
    return out;
}

std::vector<double> KernelSeries::op_norms() const {
    std::vector<double> out(values.size());
    for (std::size_t n = 0; n < values.size(); ++n) out[n] = op_norm(values[n]);
    return out;
}

LaplaceSlice LaplaceSlice::from_scalar(std::vector<double> omega, double eps, const std::vector<cplx>& v,
                                       std::string source) {
    require(omega.size() == v.size(), ErrorKind::dimension, "slice: grid and value sizes differ");
    LaplaceSlice s;
    s.omega = std::move(omega);
    s.eps = eps;
    s.source = std::move(source);
    s.values.reserve(v.size());
    for (const auto& x : v) s.values.push_back(Mat::Constant(1, 1, x));
    return s;
}

std::vector<cplx> LaplaceSlice::element(int i, int j) const {
    std::vector<cplx> out(values.size());
    for (std::size_t n = 0; n < values.size(); ++n) out[n] = values[n](i, j);
    return out;
}

std::string vec_label(int k) {
    static const char* names[] = {"ee", "ge", "eg", "gg"};
    require(k >= 0 && k < 4, ErrorKind::invalid_argument, "vec label index out of range");
    return names[k];
}

std::string channel_label(int row, int col) { return vec_label(row) + "," + vec_label(col); }

int vec_index(const std::string& label) {
    for (int k = 0; k < 4; ++k)
        if (vec_label(k) == label) return k;
    fail(ErrorKind::invalid_argument, "unknown channel '" + label + "'");
}

}  // namespace nzkk
