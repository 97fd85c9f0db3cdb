// rkhs-cert: batch front-end for the certification library.

#include <iostream>

#include <CLI11.hpp>

#include "rkhs/cli.hpp"
#include "rkhs/error.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitTask = 2;

struct Common {
    std::string kernel;
    std::string function;
    std::string sequence;
    std::vector<double> c_grid;
    std::optional<double> alpha;
    std::int64_t ell_max = -1;
    unsigned precision_bits = 0;
    unsigned jobs = 0;
    std::string out;
};

void add_common(CLI::App* cmd, Common& o, bool with_function) {
    cmd->add_option("--kernel", o.kernel, "kernel identifier");
    if (with_function) cmd->add_option("--function", o.function, "candidate function identifier");
    cmd->add_option("--precision-bits", o.precision_bits, "working precision in bits");
    cmd->add_option("--out", o.out, "report path (default: stdout)");
}

void apply(const Common& o, rkhs::RunConfig& config) {
    if (!o.kernel.empty()) config.kernel = o.kernel;
    if (!o.function.empty()) config.function = o.function;
    if (!o.sequence.empty()) config.sequence = o.sequence;
    if (!o.c_grid.empty()) config.c_grid = o.c_grid;
    if (o.alpha) config.alpha = o.alpha;
    if (o.ell_max >= 0) config.ell_max = o.ell_max;
    if (o.precision_bits) config.precision_bits = o.precision_bits;
    if (o.jobs) config.jobs = o.jobs;
    if (!o.out.empty()) config.output.report = o.out;
}

int execute(const rkhs::RunConfig& config) {
    const rkhs::RunOutcome outcome = rkhs::run(config);
    try {
        rkhs::emit_outputs(outcome, config);
    } catch (const rkhs::ConfigError&) {
        throw;
    } catch (const rkhs::Error& e) {
        throw rkhs::ConfigError(e.what());
    }
    if (!config.output.report) std::cout << rkhs::canonical_dump(outcome.report);
    for (const auto& [task, message] : outcome.report["errors"].items()) {
        std::cerr << "rkhs-cert: " << task << ": " << message.get<std::string>() << '\n';
    }
    return outcome.task_error ? kExitTask : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Certify non-membership of functions in reproducing kernel Hilbert spaces"};
    app.require_subcommand(1);

    Common run_opts;
    std::string config_path;
    std::vector<std::string> tasks;
    auto* run_cmd = app.add_subcommand("run", "run the tasks of a JSON configuration");
    run_cmd->add_option("--config", config_path, "configuration file")->required();
    add_common(run_cmd, run_opts, true);
    run_cmd->add_option("--sequence", run_opts.sequence, "sequence identifier");
    run_cmd->add_option("--c", run_opts.c_grid, "c grid");
    run_cmd->add_option("--ell-max", run_opts.ell_max, "largest ell searched");
    run_cmd->add_option("--jobs", run_opts.jobs, "parallel c-grid entries");
    run_cmd->add_option("--tasks", tasks, "subset of psd, decay, witness, analytic, interpolant");

    std::string cert_path;
    auto* verify_cmd = app.add_subcommand("verify", "re-check a serialized witness certificate");
    verify_cmd->add_option("certificate", cert_path, "certificate JSON")->required();

    Common wit;
    std::string cert_dir;
    int max_doublings = -1;
    bool no_tail_check = false;
    auto* witness_cmd = app.add_subcommand("witness", "build witness certificates over a c grid");
    add_common(witness_cmd, wit, true);
    witness_cmd->add_option("--sequence", wit.sequence, "sequence identifier");
    witness_cmd->add_option("--c", wit.c_grid, "c grid (default 2^0 .. 2^-8)");
    witness_cmd->add_option("--alpha", wit.alpha, "tail lower bound");
    witness_cmd->add_option("--ell-max", wit.ell_max, "largest ell searched");
    witness_cmd->add_option("--jobs", wit.jobs, "parallel c-grid entries");
    witness_cmd->add_option("--max-doublings", max_doublings, "doubling cap");
    witness_cmd->add_flag("--no-tail-check", no_tail_check, "skip the check of alpha on the witness points");
    witness_cmd->add_option("--cert-dir", cert_dir, "write each certificate into this directory");

    Common dec;
    std::int64_t window = 0;
    std::int64_t decay_ell_max = 0;
    std::string threshold;
    auto* decay_cmd = app.add_subcommand("decay-check", "sample the pairwise decay condition");
    add_common(decay_cmd, dec, false);
    decay_cmd->add_option("--sequence", dec.sequence, "sequence identifier");
    decay_cmd->add_option("--window", window, "window size N");
    decay_cmd->add_option("--ell-max", decay_ell_max, "largest ell sampled");
    decay_cmd->add_option("--threshold", threshold, "threshold, e.g. exp(-100)");

    Common psd;
    std::vector<double> psd_points;
    std::optional<double> x0;
    std::string gram_csv;
    auto* psd_cmd = app.add_subcommand("psd-check", "PSD verdicts for K and K - c^2 f f");
    add_common(psd_cmd, psd, true);
    psd_cmd->add_option("--sequence", psd.sequence, "sequence supplying default points");
    psd_cmd->add_option("--c", psd.c_grid, "c grid");
    psd_cmd->add_option("--points", psd_points, "evaluation points");
    psd_cmd->add_option("--x0", x0, "add the Schur-complement control at x0");
    psd_cmd->add_option("--gram-csv", gram_csv, "dump the kernel Gram matrix");

    Common der;
    unsigned n_max = 15;
    double norm_f = 1.0;
    auto* der_cmd = app.add_subcommand("derivatives", "derivative bounds against the analytic envelope");
    add_common(der_cmd, der, false);
    der_cmd->add_option("--n-max", n_max, "largest order");
    der_cmd->add_option("--norm", norm_f, "RKHS norm bound");

    Common interp;
    std::string rule;
    int steps = 0;
    std::vector<double> base;
    std::optional<double> ridge;
    std::string trace_csv;
    auto* interp_cmd = app.add_subcommand("interp-norm", "minimum-norm interpolant trace (diagnostic)");
    add_common(interp_cmd, interp, true);
    interp_cmd->add_option("--rule", rule, "widen or refine");
    interp_cmd->add_option("--steps", steps, "number of extensions");
    interp_cmd->add_option("--base", base, "base points");
    interp_cmd->add_option("--ridge", ridge, "diagonal regularization");
    interp_cmd->add_option("--csv", trace_csv, "write step,n_points,norm");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*verify_cmd) {
            const rkhs::WitnessCertificate cert = rkhs::load_certificate(cert_path);
            const rkhs::CertificateCheck check = rkhs::check_certificate(cert);
            std::cout << (check.verified ? "verified: " : "rejected: ") << check.detail << '\n';
            return check.verified ? kExitOk : kExitTask;
        }

        rkhs::RunConfig config;
        if (*run_cmd) {
            config = rkhs::load_config(config_path);
            apply(run_opts, config);
            if (!tasks.empty()) {
                config.tasks.clear();
                for (const auto& t : {rkhs::Task::Psd, rkhs::Task::Decay, rkhs::Task::Witness, rkhs::Task::Analytic,
                                      rkhs::Task::Interpolant}) {
                    for (const auto& name : tasks) {
                        if (rkhs::task_from_string(name) == t) {
                            config.tasks.push_back(t);
                            break;
                        }
                    }
                }
            }
        } else if (*witness_cmd) {
            config.tasks = {rkhs::Task::Witness};
            apply(wit, config);
            if (max_doublings >= 0) config.max_doublings = max_doublings;
            if (no_tail_check) config.enforce_tail_hypothesis = false;
            if (!cert_dir.empty()) config.output.certificate_dir = cert_dir;
        } else if (*decay_cmd) {
            config.tasks = {rkhs::Task::Decay};
            apply(dec, config);
            if (window) config.decay.window = window;
            if (decay_ell_max) config.decay.ell_max = decay_ell_max;
            if (!threshold.empty()) config.decay.threshold = threshold;
        } else if (*psd_cmd) {
            config.tasks = {rkhs::Task::Psd};
            apply(psd, config);
            config.psd.points = psd_points;
            config.psd.x0 = x0;
            if (!gram_csv.empty()) config.output.gram_csv = gram_csv;
        } else if (*der_cmd) {
            config.tasks = {rkhs::Task::Analytic};
            apply(der, config);
            config.analytic.n_max = n_max;
            config.analytic.norm_f = norm_f;
        } else if (*interp_cmd) {
            config.tasks = {rkhs::Task::Interpolant};
            apply(interp, config);
            if (!rule.empty()) config.interpolant.rule = rkhs::extension_rule_from_string(rule);
            if (steps) config.interpolant.steps = steps;
            if (!base.empty()) config.interpolant.base_points = base;
            if (ridge) config.interpolant.ridge = *ridge;
            if (!trace_csv.empty()) config.output.interpolant_csv = trace_csv;
        }
        return execute(config);
    } catch (const rkhs::ConfigError& e) {
        std::cerr << "rkhs-cert: configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const rkhs::Error& e) {
        std::cerr << "rkhs-cert: " << e.what() << '\n';
        return kExitTask;
    } catch (const std::exception& e) {
        std::cerr << "rkhs-cert: " << e.what() << '\n';
        return kExitTask;
    }
}
