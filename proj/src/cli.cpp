#include "rkhs/cli.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "rkhs/analytic.hpp"
#include "rkhs/error.hpp"
#include "rkhs/expression.hpp"

namespace rkhs {

namespace {

constexpr std::array kTaskOrder{Task::Psd, Task::Decay, Task::Witness, Task::Analytic, Task::Interpolant};

void reject_unknown_keys(const Json& j, std::string_view where, std::initializer_list<std::string_view> known) {
    if (!j.is_object()) throw ConfigError(std::string(where) + " must be an object");
    for (const auto& [key, value] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError("unknown key '" + key + "' in " + std::string(where));
        }
    }
}

std::string string_field(const Json& j, const char* name) {
    if (!j.at(name).is_string()) throw ConfigError(std::string("'") + name + "' must be a string");
    return j.at(name).get<std::string>();
}

bool bool_field(const Json& j, const char* name) {
    if (!j.at(name).is_boolean()) throw ConfigError(std::string("'") + name + "' must be a boolean");
    return j.at(name).get<bool>();
}

std::vector<double> double_list(const Json& j, const char* name) {
    if (!j.is_array()) throw ConfigError(std::string("'") + name + "' must be a list");
    std::vector<double> out;
    for (const auto& v : j) out.push_back(read_double(v, name));
    return out;
}

std::string kernel_id_from_json(const Json& j) {
    if (j.is_string()) return j.get<std::string>();
    reject_unknown_keys(j, "kernel", {"id", "profile", "decays", "nonneg", "nonincreasing"});
    const std::string id = string_field(j, "id");
    if (id != "custom") {
        if (j.size() != 1) throw ConfigError("only custom kernels take parameters");
        return id;
    }
    if (!j.contains("profile")) throw ConfigError("custom kernel needs a 'profile' expression in r");
    std::string out = "custom:" + string_field(j, "profile");
    for (const char* flag : {"decays", "nonneg", "nonincreasing"}) {
        if (j.contains(flag) && bool_field(j, flag)) out += std::string(";") + flag;
    }
    return out;
}

DomainKind domain_kind_from_string(const std::string& name) {
    if (name == "full_line") return DomainKind::FullLine;
    if (name == "interval") return DomainKind::Interval;
    if (name == "finite_set") return DomainKind::FiniteSet;
    throw ConfigError("unknown domain kind '" + name + "'");
}

std::int64_t positive_integer(const Json& j, const char* name) {
    const std::int64_t v = read_integer(j, name);
    if (v < 1) throw ConfigError(std::string("'") + name + "' must be >= 1");
    return v;
}

Json numbers(std::span<const double> values) {
    Json out = Json::array();
    for (const double v : values) out.push_back(decimal(v));
    return out;
}

template <typename F>
auto resolve(const char* what, F&& f) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(std::string(what) + ": " + e.what());
    }
}

std::string domain_note(const DomainSpec& domain) {
    if (domain.kind == DomainKind::FullLine) return "certificates concern the RKHS on the whole real line";
    if (domain.accumulation_point) {
        return "certificates concern the whole real line; non-membership on the domain follows when the "
               "extension f_e is analytic and the domain has an accumulation point (declared by the user, not verified)";
    }
    return "certificates concern the whole real line only; the domain has no declared accumulation point, so no "
           "transfer to it is claimed";
}

Json psd_task(const RunConfig& config, const Kernel& k, const CandidateFunction& f, const SequenceSpec& seq,
              RunOutcome& outcome) {
    const std::vector<double> points = config.psd.points.empty() ? seq.window(0, config.psd.window) : config.psd.points;
    const unsigned bits = config.precision_bits;
    Json j;
    j["points"] = numbers(points);
    GramMatrix gram = assemble_gram(k, points, bits);
    j["kernel"] = to_json(psd_check(gram));
    Json deflated = Json::array();
    for (const double c : config.c_grid) {
        const GramMatrix r = assemble_gram(deflate(k, f, c), points, bits);
        Json entry = to_json(psd_check(r));
        entry["c"] = decimal(c);
        deflated.push_back(entry);
    }
    j["deflated"] = deflated;
    if (config.psd.x0) {
        Json control = to_json(schur_deflation_control(k, *config.psd.x0, points, bits));
        control["x0"] = decimal(*config.psd.x0);
        j["schur_control"] = control;
    }
    outcome.gram = std::move(gram);
    return j;
}

Json decay_task(const RunConfig& config, const Kernel& k, const SequenceSpec& seq) {
    const BigFloat threshold = parse_scalar(config.decay.threshold, config.precision_bits);
    return to_json(verify_decay(k, seq, config.decay.window, config.decay.ell_max, threshold, config.precision_bits));
}

Json witness_task(const RunConfig& config, const Kernel& k, const CandidateFunction& f, const SequenceSpec& seq,
                  RunOutcome& outcome, bool& all_verified) {
    WitnessOptions options;
    options.precision_bits = config.precision_bits;
    options.max_doublings = config.max_doublings;
    options.enforce_tail_hypothesis = config.enforce_tail_hypothesis;
    const SweepResult sweep = sweep_c(k, f, seq, config.c_grid, config.ell_max, options, config.alpha, config.jobs);

    Json j;
    j["alpha"] = {{"value", decimal(sweep.alpha.alpha)},
                  {"sign", decimal(static_cast<std::int64_t>(sweep.alpha.sign))},
                  {"provenance", to_string(sweep.alpha.provenance)}};
    j["c_values"] = numbers(sweep.c_values);
    Json n_star = Json::array();
    for (const auto n : sweep.n_star) n_star.push_back(decimal(n));
    j["n_star"] = n_star;
    j["scaled_threshold"] = numbers(sweep.scaled_threshold);
    Json certs = Json::array();
    all_verified = sweep.failures.empty();
    for (const auto& cert : sweep.certificates) {
        Json entry = to_json(cert);
        const bool ok = verify_certificate(cert, k, f);
        all_verified = all_verified && ok;
        entry["verified"] = ok;
        certs.push_back(entry);
    }
    j["certificates"] = certs;
    Json failures = Json::array();
    for (const auto& failure : sweep.failures) failures.push_back({{"c", decimal(failure.c)}, {"reason", failure.reason}});
    j["failures"] = failures;
    j["scope"] = "each certificate refutes one c of the grid; smaller c needs proportionally larger N";
    outcome.certificates = sweep.certificates;
    return j;
}

Json analytic_task(const RunConfig& config, const Kernel& k) {
    return to_json(analyticity_envelope(k, config.analytic.norm_f, config.analytic.n_max, config.precision_bits));
}

Json interpolant_task(const RunConfig& config, const Kernel& k, const CandidateFunction& f, RunOutcome& outcome) {
    const auto& s = config.interpolant;
    NormTrace trace = norm_growth_trace(k, f, s.base_points, s.rule, s.steps, config.precision_bits, s.ridge,
                                        s.divergence_factor);
    Json j = to_json(trace);
    outcome.trace = std::move(trace);
    return j;
}

}  // namespace

std::string to_string(Task task) {
    switch (task) {
        case Task::Psd: return "psd";
        case Task::Decay: return "decay";
        case Task::Witness: return "witness";
        case Task::Analytic: return "analytic";
        case Task::Interpolant: return "interpolant";
    }
    return "unknown";
}

Task task_from_string(std::string_view name) {
    for (const Task t : kTaskOrder) {
        if (to_string(t) == name) return t;
    }
    throw ConfigError("unknown task '" + std::string(name) + "'");
}

void RunConfig::validate() const {
    if (tasks.empty()) throw ConfigError("tasks must be nonempty");
    if (kernel.empty()) throw ConfigError("kernel is required");
    if (c_grid.empty()) throw ConfigError("c_grid must be nonempty");
    for (const double c : c_grid) {
        if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("c_grid values must be positive and finite");
    }
    if (ell_max < 0) throw ConfigError("ell_max must be >= 0");
    if (precision_bits < 128 || precision_bits > 8192) throw ConfigError("precision_bits must lie in [128, 8192]");
    if (jobs < 1) throw ConfigError("jobs must be >= 1");
    if (alpha && !(*alpha > 0.0)) throw ConfigError("alpha must be positive");
    if (max_doublings < 0) throw ConfigError("max_doublings must be >= 0");
    if (decay.window < 2) throw ConfigError("decay.window must be >= 2");
    if (decay.ell_max < 1) throw ConfigError("decay.ell_max must be >= 1");
    resolve("decay.threshold", [&] { return parse_scalar(decay.threshold); });
    if (psd.points.empty() && psd.window < 1) throw ConfigError("psd.window must be >= 1");
    if (analytic.n_max > 200) throw ConfigError("analytic.n_max must be <= 200");
    if (!(analytic.norm_f >= 0.0)) throw ConfigError("analytic.norm_f must be nonnegative");
    if (interpolant.steps < 1) throw ConfigError("interpolant.steps must be >= 1");
    if (interpolant.base_points.empty()) throw ConfigError("interpolant.base_points must be nonempty");
    if (!(interpolant.ridge >= 0.0)) throw ConfigError("interpolant.ridge must be nonnegative");
    domain.validate();

    const Kernel k = resolve("kernel", [&] { return kernel_from_id(kernel); });
    const bool needs_function = std::any_of(tasks.begin(), tasks.end(), [](Task t) {
        return t == Task::Psd || t == Task::Witness || t == Task::Interpolant;
    });
    if (needs_function && function.empty()) throw ConfigError("function is required by the requested tasks");
    if (!function.empty()) resolve("function", [&] { return function_from_id(function, &k); });
    resolve("sequence", [&] { return sequence_from_id(sequence); });
}

RunConfig parse_config(const Json& j) {
    reject_unknown_keys(j, "config",
                        {"kernel", "function", "sequence", "domain", "tasks", "c_grid", "ell_max", "precision_bits",
                         "jobs", "alpha", "max_doublings", "enforce_tail_hypothesis", "decay", "psd", "analytic",
                         "interpolant", "output"});
    RunConfig config;
    if (!j.contains("kernel")) throw ConfigError("kernel is required");
    config.kernel = kernel_id_from_json(j.at("kernel"));
    if (j.contains("function")) config.function = string_field(j, "function");
    if (j.contains("sequence")) config.sequence = string_field(j, "sequence");
    if (j.contains("domain")) {
        const Json& d = j.at("domain");
        reject_unknown_keys(d, "domain", {"kind", "lower", "upper", "points", "accumulation_point"});
        if (d.contains("kind")) config.domain.kind = domain_kind_from_string(string_field(d, "kind"));
        if (d.contains("lower")) config.domain.lower = read_double(d.at("lower"), "domain.lower");
        if (d.contains("upper")) config.domain.upper = read_double(d.at("upper"), "domain.upper");
        if (d.contains("points")) config.domain.points = double_list(d.at("points"), "domain.points");
        config.domain.accumulation_point = config.domain.kind != DomainKind::FiniteSet;
        if (d.contains("accumulation_point")) config.domain.accumulation_point = bool_field(d, "accumulation_point");
    }
    if (j.contains("tasks")) {
        if (!j.at("tasks").is_array()) throw ConfigError("'tasks' must be a list");
        std::set<Task> requested;
        for (const auto& t : j.at("tasks")) {
            if (!t.is_string()) throw ConfigError("task names must be strings");
            requested.insert(task_from_string(t.get<std::string>()));
        }
        for (const Task t : kTaskOrder) {
            if (requested.contains(t)) config.tasks.push_back(t);
        }
    }
    if (j.contains("c_grid")) config.c_grid = double_list(j.at("c_grid"), "c_grid");
    if (j.contains("ell_max")) config.ell_max = read_integer(j.at("ell_max"), "ell_max");
    if (j.contains("precision_bits")) config.precision_bits = static_cast<unsigned>(positive_integer(j.at("precision_bits"), "precision_bits"));
    if (j.contains("jobs")) config.jobs = static_cast<unsigned>(positive_integer(j.at("jobs"), "jobs"));
    if (j.contains("alpha")) config.alpha = read_double(j.at("alpha"), "alpha");
    if (j.contains("max_doublings")) config.max_doublings = static_cast<int>(read_integer(j.at("max_doublings"), "max_doublings"));
    if (j.contains("enforce_tail_hypothesis")) config.enforce_tail_hypothesis = bool_field(j, "enforce_tail_hypothesis");
    if (j.contains("decay")) {
        const Json& d = j.at("decay");
        reject_unknown_keys(d, "decay", {"window", "ell_max", "threshold"});
        if (d.contains("window")) config.decay.window = read_integer(d.at("window"), "decay.window");
        if (d.contains("ell_max")) config.decay.ell_max = read_integer(d.at("ell_max"), "decay.ell_max");
        if (d.contains("threshold")) {
            const Json& t = d.at("threshold");
            config.decay.threshold = t.is_string() ? t.get<std::string>() : decimal(read_double(t, "decay.threshold"));
        }
    }
    if (j.contains("psd")) {
        const Json& p = j.at("psd");
        reject_unknown_keys(p, "psd", {"points", "window", "x0"});
        if (p.contains("points")) config.psd.points = double_list(p.at("points"), "psd.points");
        if (p.contains("window")) config.psd.window = read_integer(p.at("window"), "psd.window");
        if (p.contains("x0")) config.psd.x0 = read_double(p.at("x0"), "psd.x0");
    }
    if (j.contains("analytic")) {
        const Json& a = j.at("analytic");
        reject_unknown_keys(a, "analytic", {"n_max", "norm_f"});
        if (a.contains("n_max")) {
            const std::int64_t n = read_integer(a.at("n_max"), "analytic.n_max");
            if (n < 0 || n > 200) throw ConfigError("analytic.n_max must lie in [0, 200]");
            config.analytic.n_max = static_cast<unsigned>(n);
        }
        if (a.contains("norm_f")) config.analytic.norm_f = read_double(a.at("norm_f"), "analytic.norm_f");
    }
    if (j.contains("interpolant")) {
        const Json& s = j.at("interpolant");
        reject_unknown_keys(s, "interpolant", {"rule", "steps", "base_points", "ridge", "divergence_factor"});
        if (s.contains("rule")) config.interpolant.rule = extension_rule_from_string(string_field(s, "rule"));
        if (s.contains("steps")) config.interpolant.steps = static_cast<int>(read_integer(s.at("steps"), "interpolant.steps"));
        if (s.contains("base_points")) config.interpolant.base_points = double_list(s.at("base_points"), "interpolant.base_points");
        if (s.contains("ridge")) config.interpolant.ridge = read_double(s.at("ridge"), "interpolant.ridge");
        if (s.contains("divergence_factor")) {
            config.interpolant.divergence_factor = read_double(s.at("divergence_factor"), "interpolant.divergence_factor");
        }
    }
    if (j.contains("output")) {
        const Json& o = j.at("output");
        reject_unknown_keys(o, "output", {"report", "certificate_dir", "interpolant_csv", "gram_csv"});
        if (o.contains("report")) config.output.report = string_field(o, "report");
        if (o.contains("certificate_dir")) config.output.certificate_dir = string_field(o, "certificate_dir");
        if (o.contains("interpolant_csv")) config.output.interpolant_csv = string_field(o, "interpolant_csv");
        if (o.contains("gram_csv")) config.output.gram_csv = string_field(o, "gram_csv");
    }
    return config;
}

RunConfig load_config(const std::filesystem::path& path) { return parse_config(read_json_file(path)); }

Json config_to_json(const RunConfig& config) {
    Json j;
    j["kernel"] = config.kernel;
    j["function"] = config.function;
    j["sequence"] = config.sequence;
    j["domain"] = {{"kind", to_string(config.domain.kind)},
                   {"lower", decimal(config.domain.lower)},
                   {"upper", decimal(config.domain.upper)},
                   {"points", numbers(config.domain.points)},
                   {"accumulation_point", config.domain.accumulation_point}};
    Json tasks = Json::array();
    for (const Task t : config.tasks) tasks.push_back(to_string(t));
    j["tasks"] = tasks;
    j["c_grid"] = numbers(config.c_grid);
    j["ell_max"] = decimal(config.ell_max);
    j["precision_bits"] = decimal(static_cast<std::int64_t>(config.precision_bits));
    j["alpha"] = config.alpha ? Json(decimal(*config.alpha)) : Json();
    j["max_doublings"] = decimal(static_cast<std::int64_t>(config.max_doublings));
    j["enforce_tail_hypothesis"] = config.enforce_tail_hypothesis;
    j["decay"] = {{"window", decimal(config.decay.window)},
                  {"ell_max", decimal(config.decay.ell_max)},
                  {"threshold", config.decay.threshold}};
    j["psd"] = {{"points", numbers(config.psd.points)},
                {"window", decimal(config.psd.window)},
                {"x0", config.psd.x0 ? Json(decimal(*config.psd.x0)) : Json()}};
    j["analytic"] = {{"n_max", decimal(static_cast<std::int64_t>(config.analytic.n_max))},
                     {"norm_f", decimal(config.analytic.norm_f)}};
    j["interpolant"] = {{"rule", to_string(config.interpolant.rule)},
                        {"steps", decimal(static_cast<std::int64_t>(config.interpolant.steps))},
                        {"base_points", numbers(config.interpolant.base_points)},
                        {"ridge", decimal(config.interpolant.ridge)},
                        {"divergence_factor", decimal(config.interpolant.divergence_factor)}};
    return j;
}

RunOutcome run(const RunConfig& config) {
    config.validate();
    const Kernel k = kernel_from_id(config.kernel);
    const std::optional<CandidateFunction> f =
        config.function.empty() ? std::nullopt : std::optional(function_from_id(config.function, &k));
    const SequenceSpec seq = sequence_from_id(config.sequence);

    RunOutcome outcome;
    Json& report = outcome.report;
    report["schema_version"] = kReportSchema;
    report["config"] = config_to_json(config);
    report["errors"] = Json::object();
    std::optional<bool> witness_verified;

    for (const Task task : config.tasks) {
        const std::string name = to_string(task);
        try {
            switch (task) {
                case Task::Psd: report[name] = psd_task(config, k, *f, seq, outcome); break;
                case Task::Decay: report[name] = decay_task(config, k, seq); break;
                case Task::Witness: {
                    bool verified = false;
                    report[name] = witness_task(config, k, *f, seq, outcome, verified);
                    witness_verified = verified;
                    break;
                }
                case Task::Analytic: report[name] = analytic_task(config, k); break;
                case Task::Interpolant: report[name] = interpolant_task(config, k, *f, outcome); break;
            }
        } catch (const Error& e) {
            report["errors"][name] = e.what();
            outcome.task_error = true;
        }
    }

    std::string verdict = "inconclusive";
    if (witness_verified && *witness_verified) {
        verdict = "non-membership witnessed";
    } else if (witness_verified && outcome.certificates.empty() && !outcome.task_error &&
               config.function.starts_with("kernel_section:")) {
        const Json& failures = report["witness"]["failures"];
        const bool all_capped = std::all_of(failures.begin(), failures.end(), [](const Json& fail) {
            return fail["reason"].get<std::string>().starts_with("r not negative at cap");
        });
        bool psd_ok = true;
        if (report.contains("psd") && report["psd"].contains("schur_control")) {
            psd_ok = report["psd"]["schur_control"]["is_psd"].get<bool>();
        }
        if (all_capped && psd_ok) verdict = "positive-control passed";
    }
    report["verdict_summary"] = {{"verdict", verdict}, {"domain", domain_note(config.domain)}};
    if (witness_verified) {
        report["verdict_summary"]["scope"] = "refutes K - c^2 f f >= 0 for each c of the configured grid only";
    }
    return outcome;
}

void emit_report(const Json& report, const std::filesystem::path& path) { write_json_file(report, path); }

void emit_outputs(const RunOutcome& outcome, const RunConfig& config) {
    if (config.output.report) emit_report(outcome.report, *config.output.report);
    if (config.output.certificate_dir) {
        std::error_code ec;
        std::filesystem::create_directories(*config.output.certificate_dir, ec);
        if (ec) throw Error("cannot create '" + config.output.certificate_dir->string() + "': " + ec.message());
        for (std::size_t i = 0; i < outcome.certificates.size(); ++i) {
            save_certificate(outcome.certificates[i],
                             *config.output.certificate_dir / ("certificate_" + std::to_string(i) + ".json"));
        }
    }
    if (config.output.interpolant_csv && outcome.trace) {
        std::ofstream out(*config.output.interpolant_csv, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open '" + config.output.interpolant_csv->string() + "' for writing");
        write_trace_csv(*outcome.trace, out);
    }
    if (config.output.gram_csv && outcome.gram) {
        std::ofstream out(*config.output.gram_csv, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open '" + config.output.gram_csv->string() + "' for writing");
        write_gram_csv(*outcome.gram, out);
    }
}

void save_certificate(const WitnessCertificate& cert, const std::filesystem::path& path) {
    write_json_file(to_json(cert), path);
}

WitnessCertificate load_certificate(const std::filesystem::path& path) {
    return certificate_from_json(read_json_file(path));
}

CertificateCheck check_certificate(const WitnessCertificate& cert) {
    const Kernel k = resolve("kernel", [&] { return kernel_from_id(cert.kernel_id); });
    const CandidateFunction f = resolve("function", [&] { return function_from_id(cert.function_id, &k); });
    CertificateCheck check;
    check.verified = verify_certificate(cert, k, f);
    check.detail = check.verified ? "r = " + cert.r_value.to_string(12) + " < 0 at N = " + std::to_string(cert.N)
                                  : "recomputed form does not confirm the certificate";
    return check;
}

}  // namespace rkhs
