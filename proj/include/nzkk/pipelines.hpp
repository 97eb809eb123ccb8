// pipelines.hpp: preset pipelines; each writes its outputs and returns criterion checks
#pragma once

#include "nzkk/config.hpp"
#include "nzkk/core.hpp"
#include "nzkk/dynamics.hpp"

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace nzkk {

struct Check {
    int criterion = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

struct StageTime {
    std::string name;
    double seconds = 0.0;
};

class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what)
        : Error(ErrorKind::numerical, "stage " + stage + ": " + what), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

// Output directory plus bookkeeping of written files and stage wall times.
class Sink {
public:
    explicit Sink(std::filesystem::path dir);

    // Absolute path for a relative output name; the name is recorded once.
    std::filesystem::path file(const std::string& rel);
    void stage(const std::string& name, const std::function<void()>& body);

    const std::filesystem::path& dir() const { return dir_; }
    const std::vector<std::string>& files() const { return files_; }
    const std::vector<StageTime>& stages() const { return stages_; }

private:
    std::filesystem::path dir_;
    std::vector<std::string> files_;
    std::vector<StageTime> stages_;
};

std::vector<Check> run_pipeline(const RunConfig& cfg, Sink& sink);

// Individual presets.
std::vector<Check> pipeline_qlq_tables(const RunConfig& cfg, Sink& sink);
std::vector<Check> pipeline_fig_zeros(const RunConfig& cfg, Sink& sink);
std::vector<Check> pipeline_fig_jc_kk(const RunConfig& cfg, Sink& sink);
std::vector<Check> pipeline_fig_ibm(const RunConfig& cfg, Sink& sink);
std::vector<Check> pipeline_fig_fp(const RunConfig& cfg, Sink& sink);
std::vector<Check> pipeline_fig_counter(const RunConfig& cfg, Sink& sink);
std::vector<Check> pipeline_fig_matrix_kk(const RunConfig& cfg, Sink& sink);
std::vector<Check> pipeline_carleman_report(const RunConfig& cfg, Sink& sink);
std::vector<Check> pipeline_anchor_report(const RunConfig& cfg, Sink& sink);

// Late-time amplitude: mean of local maxima of ||K(t)||_op over the last quarter, last two samples excluded.
double late_time_amplitude(const std::vector<double>& op_norms);

// max over omega of eps * ||sigma~(omega + i eps)||_op for an exact resolvent.
double resolvent_bound(const ReducedResolvent& r, const std::vector<double>& omega, double eps);

}  // namespace nzkk
