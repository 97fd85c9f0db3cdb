#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rkhs/functions.hpp"
#include "rkhs/interpolant.hpp"
#include "rkhs/serialize.hpp"
#include "rkhs/witness.hpp"

namespace rkhs {

inline constexpr const char* kReportSchema = "rkhs-cert/report/v1";

/// Tasks always run in this order.
enum class Task { Psd, Decay, Witness, Analytic, Interpolant };

struct DecaySettings {
    std::int64_t window = 3;
    std::int64_t ell_max = 10;
    std::string threshold = "exp(-100)";  // scalar expression
};

struct PsdSettings {
    std::vector<double> points;  // empty: the first `window` sequence terms
    std::int64_t window = 8;
    std::optional<double> x0;  // adds the Schur-complement control at x0
};

struct AnalyticSettings {
    unsigned n_max = 15;
    double norm_f = 1.0;
};

struct InterpolantSettings {
    ExtensionRule rule = ExtensionRule::Widen;
    int steps = 6;
    std::vector<double> base_points{0.0};
    double ridge = 0.0;
    double divergence_factor = 1e3;
};

struct OutputPaths {
    std::optional<std::filesystem::path> report;
    std::optional<std::filesystem::path> certificate_dir;  // one file per certificate
    std::optional<std::filesystem::path> interpolant_csv;
    std::optional<std::filesystem::path> gram_csv;  // Gram matrix of the psd task
};

struct RunConfig {
    std::string kernel;
    std::string function;
    std::string sequence = "triangular+";
    DomainSpec domain;
    std::vector<Task> tasks;
    std::vector<double> c_grid = default_c_grid();
    std::int64_t ell_max = 64;
    unsigned precision_bits = kDefaultPrecisionBits;
    unsigned jobs = 1;
    std::optional<double> alpha;
    int max_doublings = 6;
    bool enforce_tail_hypothesis = true;
    DecaySettings decay;
    PsdSettings psd;
    AnalyticSettings analytic;
    InterpolantSettings interpolant;
    OutputPaths output;

    /// Checks the fields and that every identifier resolves. Throws `ConfigError`.
    void validate() const;
};

/// Reads a configuration object. Unknown keys are rejected. Throws `ConfigError`.
RunConfig parse_config(const Json& json);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical echo of the settings that affect results (not `jobs` or output paths).
Json config_to_json(const RunConfig& config);

std::string to_string(Task task);
Task task_from_string(std::string_view name);

struct RunOutcome {
    Json report;
    std::vector<WitnessCertificate> certificates;
    std::optional<NormTrace> trace;
    std::optional<GramMatrix> gram;
    bool task_error = false;
};

/// Runs the requested tasks. A failing task is recorded under "errors" and sets
/// `task_error`; the others still run.
RunOutcome run(const RunConfig& config);

/// Writes the report and any configured side files.
void emit_outputs(const RunOutcome& outcome, const RunConfig& config);
void emit_report(const Json& report, const std::filesystem::path& path);

void save_certificate(const WitnessCertificate& cert, const std::filesystem::path& path);
WitnessCertificate load_certificate(const std::filesystem::path& path);

/// Outcome of re-checking a serialized certificate against freshly built objects.
struct CertificateCheck {
    bool verified = false;
    std::string detail;
};
CertificateCheck check_certificate(const WitnessCertificate& cert);

}  // namespace rkhs
