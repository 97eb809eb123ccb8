// io.hpp: binary matrix files, CSV and report writers, checksums
#pragma once

#include "nzkk/core.hpp"
#include "nzkk/liouville.hpp"
#include "nzkk/series.hpp"
#include "nzkk/spectral.hpp"
#include "nzkk/zeros.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace nzkk {

namespace fs = std::filesystem;

// %.17g
std::string format_double(double x);

// "NZKKMAT1", uint32 rows, uint32 cols, row-major little-endian (re, im) pairs.
void write_matrix(const fs::path& path, const Mat& m);
Mat read_matrix(const fs::path& path);

// "NZKKTRJ1", uint32 rows, uint32 cols, uint64 steps, double dt, then one row-major matrix per step.
struct MatrixSeries {
    TimeGrid grid;
    std::vector<Mat> values;
};

void write_matrix_series(const fs::path& path, const TimeGrid& grid, const std::vector<Mat>& values);
MatrixSeries read_matrix_series(const fs::path& path);

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);
    CsvWriter& cell(double x);
    CsvWriter& cell(const std::string& s);
    CsvWriter& cell(long long x);
    void end_row();
    std::string str() const { return out_; }
    void save(const fs::path& path) const;

private:
    std::size_t columns_;
    std::size_t filled_ = 0;
    std::string out_;
};

// Element labels for an m x m block: channel labels for 4x4, "i_j" otherwise.
std::string element_label(int m, int i, int j);

// t (or omega), then re/im of every element.
void write_series_csv(const fs::path& path, const std::string& axis, const std::vector<double>& x,
                      const std::vector<Mat>& values);
void write_kernel_csv(const fs::path& path, const KernelSeries& k);
void write_slice_csv(const fs::path& path, const LaplaceSlice& s);

// key = value header, a blank line, then CSV rows (omega, re/hilbert/residual per channel, op residual).
std::string kk_report_text(const KKReport& r);
void write_kk_report(const fs::path& path, const KKReport& r);
std::map<std::string, std::string> read_report_header(const fs::path& path);

// g, re, im, residual, channel
void write_zero_csv(const fs::path& path, const std::vector<ZeroScanResult>& scans);

struct SpectrumRow {
    std::string table;
    std::string reference;
    double n_max_or_g = 0.0;
    double g = 0.0;
    SpectrumReport report;
};

void write_spectrum_csv(const fs::path& path, const std::vector<SpectrumRow>& rows);

void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const fs::path& path);

}  // namespace nzkk
