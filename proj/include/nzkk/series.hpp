// series.hpp: time-domain kernel series and shifted-line frequency slices
#pragma once

#include "nzkk/core.hpp"

#include <string>
#include <vector>

namespace nzkk {

struct KernelSeries {
    TimeGrid grid;
    std::vector<Mat> values;  // one m x m block per step
    std::string channel_label;

    int m() const { return values.empty() ? 0 : static_cast<int>(values.front().rows()); }
    std::size_t size() const { return values.size(); }
    bool scalar() const { return m() == 1; }

    static KernelSeries from_scalar(const TimeGrid& grid, const std::vector<cplx>& v,
                                    std::string label = {});
    std::vector<cplx> element(int i, int j) const;
    std::vector<double> op_norms() const;
};

struct LaplaceSlice {
    std::vector<double> omega;  // uniform, ascending
    double eps = 0.0;
    std::vector<Mat> values;
    std::string source;
    double tail_estimate = 0.0;
    // Real frequencies where the underlying transform is non-analytic (threshold
    // singularities, discrete Bohr lines); consulted by the subtracted KK check.
    std::vector<double> singular_frequencies;

    int m() const { return values.empty() ? 0 : static_cast<int>(values.front().rows()); }
    std::size_t size() const { return omega.size(); }
    double d_omega() const { return omega.size() > 1 ? omega[1] - omega[0] : 0.0; }

    static LaplaceSlice from_scalar(std::vector<double> omega, double eps, const std::vector<cplx>& v,
                                    std::string source = {});
    std::vector<cplx> element(int i, int j) const;
};

// Channel names in the column-stacked 2x2 basis: index 0=ee, 1=ge, 2=eg, 3=gg.
std::string vec_label(int k);
std::string channel_label(int row, int col);
int vec_index(const std::string& label);

}  // namespace nzkk
