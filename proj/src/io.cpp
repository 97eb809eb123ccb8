// io.cpp
#include "nzkk/io.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace nzkk {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

constexpr char kMatMagic[8] = {'N', 'Z', 'K', 'K', 'M', 'A', 'T', '1'};
constexpr char kTrjMagic[8] = {'N', 'Z', 'K', 'K', 'T', 'R', 'J', '1'};

template <class T>
void put(std::string& out, T v) {
    char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    out.append(b, sizeof(T));
}

template <class T>
T get(const std::string& in, std::size_t& pos, const fs::path& path) {
    require(pos + sizeof(T) <= in.size(), ErrorKind::io, "truncated file " + path.string());
    T v;
    std::memcpy(&v, in.data() + pos, sizeof(T));
    pos += sizeof(T);
    return v;
}

void put_matrix_body(std::string& out, const Mat& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            put(out, m(i, j).real());
            put(out, m(i, j).imag());
        }
}

Mat get_matrix_body(const std::string& in, std::size_t& pos, std::uint32_t rows, std::uint32_t cols,
                    const fs::path& path) {
    Mat m(rows, cols);
    for (std::uint32_t i = 0; i < rows; ++i)
        for (std::uint32_t j = 0; j < cols; ++j) {
            const double re = get<double>(in, pos, path);
            const double im = get<double>(in, pos, path);
            m(i, j) = cplx(re, im);
        }
    return m;
}

std::string read_bytes(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    require(static_cast<bool>(f), ErrorKind::io, "cannot open " + path.string());
    return std::string(std::istreambuf_iterator<char>(f), {});
}

void write_bytes(const fs::path& path, const std::string& bytes, bool binary) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
    require(static_cast<bool>(f), ErrorKind::io, "cannot write " + path.string());
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    require(static_cast<bool>(f), ErrorKind::io, "write failed for " + path.string());
}

}  // namespace

void write_matrix(const fs::path& path, const Mat& m) {
    std::string out(kMatMagic, 8);
    put(out, static_cast<std::uint32_t>(m.rows()));
    put(out, static_cast<std::uint32_t>(m.cols()));
    put_matrix_body(out, m);
    write_bytes(path, out, true);
}

Mat read_matrix(const fs::path& path) {
    const std::string in = read_bytes(path);
    require(in.size() >= 16 && std::memcmp(in.data(), kMatMagic, 8) == 0, ErrorKind::io,
            "not an NZKKMAT1 file: " + path.string());
    std::size_t pos = 8;
    const auto rows = get<std::uint32_t>(in, pos, path);
    const auto cols = get<std::uint32_t>(in, pos, path);
    require(in.size() == 16 + 16ull * rows * cols, ErrorKind::io, "size mismatch in " + path.string());
    return get_matrix_body(in, pos, rows, cols, path);
}

void write_matrix_series(const fs::path& path, const TimeGrid& grid, const std::vector<Mat>& values) {
    require(!values.empty(), ErrorKind::invalid_argument, "empty matrix series");
    std::string out(kTrjMagic, 8);
    put(out, static_cast<std::uint32_t>(values.front().rows()));
    put(out, static_cast<std::uint32_t>(values.front().cols()));
    put(out, static_cast<std::uint64_t>(values.size()));
    put(out, grid.dt);
    for (const auto& m : values) {
        require(m.rows() == values.front().rows() && m.cols() == values.front().cols(), ErrorKind::dimension,
                "matrix series blocks differ in size");
        put_matrix_body(out, m);
    }
    write_bytes(path, out, true);
}

MatrixSeries read_matrix_series(const fs::path& path) {
    const std::string in = read_bytes(path);
    require(in.size() >= 32 && std::memcmp(in.data(), kTrjMagic, 8) == 0, ErrorKind::io,
            "not an NZKKTRJ1 file: " + path.string());
    std::size_t pos = 8;
    const auto rows = get<std::uint32_t>(in, pos, path);
    const auto cols = get<std::uint32_t>(in, pos, path);
    const auto steps = get<std::uint64_t>(in, pos, path);
    MatrixSeries s;
    s.grid.dt = get<double>(in, pos, path);
    s.grid.n_steps = steps;
    require(in.size() == 32 + 16ull * rows * cols * steps, ErrorKind::io, "size mismatch in " + path.string());
    s.values.reserve(steps);
    for (std::uint64_t n = 0; n < steps; ++n) s.values.push_back(get_matrix_body(in, pos, rows, cols, path));
    return s;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
    for (std::size_t k = 0; k < header.size(); ++k) {
        if (k) out_ += ',';
        out_ += header[k];
    }
    out_ += '\n';
}

CsvWriter& CsvWriter::cell(double x) { return cell(format_double(x)); }

CsvWriter& CsvWriter::cell(long long x) { return cell(std::to_string(x)); }

CsvWriter& CsvWriter::cell(const std::string& s) {
    if (filled_) out_ += ',';
    if (s.find_first_of(",\"\n") != std::string::npos) {
        out_ += '"';
        for (char c : s) {
            if (c == '"') out_ += '"';
            out_ += c;
        }
        out_ += '"';
    } else {
        out_ += s;
    }
    ++filled_;
    return *this;
}

void CsvWriter::end_row() {
    require(filled_ == columns_, ErrorKind::io, "CSV row has the wrong number of cells");
    out_ += '\n';
    filled_ = 0;
}

void CsvWriter::save(const fs::path& path) const { write_bytes(path, out_, false); }

std::string element_label(int m, int i, int j) {
    if (m == 4) return channel_label(i, j);
    if (m == 2) return vec_label(i + 2 * j);
    return std::to_string(i) + "_" + std::to_string(j);
}

void write_series_csv(const fs::path& path, const std::string& axis, const std::vector<double>& x,
                      const std::vector<Mat>& values) {
    require(x.size() == values.size(), ErrorKind::dimension, "series axis and values differ in length");
    const int m = values.empty() ? 0 : static_cast<int>(values.front().rows());
    std::vector<std::string> header{axis};
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) {
            header.push_back("re[" + element_label(m, i, j) + "]");
            header.push_back("im[" + element_label(m, i, j) + "]");
        }
    CsvWriter w(header);
    for (std::size_t n = 0; n < x.size(); ++n) {
        w.cell(x[n]);
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < m; ++i) w.cell(values[n](i, j).real()).cell(values[n](i, j).imag());
        w.end_row();
    }
    w.save(path);
}

void write_kernel_csv(const fs::path& path, const KernelSeries& k) {
    std::vector<double> t(k.size());
    for (std::size_t n = 0; n < t.size(); ++n) t[n] = k.grid.t(n);
    write_series_csv(path, "t", t, k.values);
}

void write_slice_csv(const fs::path& path, const LaplaceSlice& s) { write_series_csv(path, "omega", s.omega, s.values); }

std::string kk_report_text(const KKReport& r) {
    std::ostringstream os;
    os << "format = nzkk-kkreport-1\n";
    os << "eps = " << format_double(r.eps) << '\n';
    os << "window_lo = " << format_double(r.window_lo) << '\n';
    os << "window_hi = " << format_double(r.window_hi) << '\n';
    os << "hilbert_mode = " << r.mode << '\n';
    os << "subtracted = " << (r.subtracted ? "true" : "false") << '\n';
    if (r.subtracted) os << "subtraction_point = " << format_double(r.subtraction_point) << '\n';
    os << "integrated_relative = " << format_double(r.integrated_relative) << '\n';
    os << "noise_floor = " << format_double(r.noise_floor) << '\n';
    os << "floor_bank = " << r.floor_bank << '\n';
    os << "verdict = " << r.verdict << '\n';
    for (const auto& c : r.channels) {
        os << "channel[" << c.label << "] = abs " << format_double(c.abs_l2) << " weight " << format_double(c.weight_l2)
           << " rel " << format_double(c.rel_l2);
        if (c.empty) os << " empty";
        if (c.low_weight) os << " low_weight";
        os << '\n';
    }
    os << '\n';
    std::vector<std::string> header{"omega"};
    for (const auto& c : r.channels) {
        header.push_back("re[" + c.label + "]");
        header.push_back("hkk[" + c.label + "]");
        header.push_back("residual[" + c.label + "]");
    }
    header.push_back("op_residual");
    CsvWriter w(header);
    for (std::size_t n = 0; n < r.omega.size(); ++n) {
        w.cell(r.omega[n]);
        for (const auto& c : r.channels) {
            const double re = r.real_part[n](c.row, c.col).real();
            const double hk = r.hilbert_part[n](c.row, c.col).real();
            w.cell(re).cell(hk).cell(re - hk);
        }
        w.cell(r.op_residual[n]);
        w.end_row();
    }
    os << w.str();
    return os.str();
}

void write_kk_report(const fs::path& path, const KKReport& r) { write_bytes(path, kk_report_text(r), false); }

std::map<std::string, std::string> read_report_header(const fs::path& path) {
    std::istringstream in(read_bytes(path));
    std::map<std::string, std::string> out;
    std::string line;
    while (std::getline(in, line) && !line.empty()) {
        const auto eq = line.find(" = ");
        require(eq != std::string::npos, ErrorKind::io, "malformed report header line: " + line);
        out[line.substr(0, eq)] = line.substr(eq + 3);
    }
    return out;
}

void write_zero_csv(const fs::path& path, const std::vector<ZeroScanResult>& scans) {
    CsvWriter w({"g", "re", "im", "residual", "channel"});
    for (const auto& s : scans)
        for (const auto& z : s.zeros)
            for (int k = 0; k < z.multiplicity; ++k) {
                w.cell(s.coupling).cell(z.z.real()).cell(z.z.imag()).cell(z.residual).cell(s.channel);
                w.end_row();
            }
    w.save(path);
}

void write_spectrum_csv(const fs::path& path, const std::vector<SpectrumRow>& rows) {
    CsvWriter w({"table", "reference", "n_max_or_g", "g", "dim", "nonhermiticity", "max_abs_imag", "eigvec_condition",
                 "status"});
    for (const auto& r : rows) {
        w.cell(r.table)
            .cell(r.reference)
            .cell(r.n_max_or_g)
            .cell(r.g)
            .cell(static_cast<long long>(r.report.d))
            .cell(r.report.nonhermiticity_frobenius)
            .cell(r.report.max_abs_imag)
            .cell(r.report.eigvec_condition)
            .cell(std::string(r.report.real() ? "real" : "complex"));
        w.end_row();
    }
    w.save(path);
}

void write_text(const fs::path& path, const std::string& text) { write_bytes(path, text, false); }

std::string read_text(const fs::path& path) { return read_bytes(path); }

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    require(EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) == 1, ErrorKind::io,
            "SHA-256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int k = 0; k < len; ++k) {
        out += hex[md[k] >> 4];
        out += hex[md[k] & 15];
    }
    return out;
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_bytes(path)); }

}  // namespace nzkk
