#include "rkhs/serialize.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "rkhs/error.hpp"
#include "rkhs/expression.hpp"

namespace rkhs {

namespace {

const Json& field(const Json& json, const char* name) {
    if (!json.is_object() || !json.contains(name)) throw ConfigError(std::string("missing field '") + name + "'");
    return json.at(name);
}

std::string read_string(const Json& json, const char* name) {
    const Json& v = field(json, name);
    if (!v.is_string()) throw ConfigError(std::string("field '") + name + "' must be a string");
    return v.get<std::string>();
}

Json decimals(std::span<const double> values) {
    Json out = Json::array();
    for (const double v : values) out.push_back(decimal(v));
    return out;
}

Json decimals(std::span<const BigFloat> values) {
    Json out = Json::array();
    for (const auto& v : values) out.push_back(decimal(v));
    return out;
}

}  // namespace

std::string decimal(double value) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, result.ptr);
}

std::string decimal(std::int64_t value) { return std::to_string(value); }

double read_double(const Json& value, std::string_view name) {
    try {
        if (value.is_number()) return value.get<double>();
        if (value.is_string()) return parse_real(value.get<std::string>());
    } catch (const ConfigError& e) {
        throw ConfigError("field '" + std::string(name) + "': " + e.what());
    }
    throw ConfigError("field '" + std::string(name) + "' must be a number or a decimal string");
}

std::int64_t read_integer(const Json& value, std::string_view name) {
    if (value.is_number_integer()) return value.get<std::int64_t>();
    if (value.is_string()) {
        const std::string text = value.get<std::string>();
        std::int64_t out = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
        if (ec == std::errc() && ptr == text.data() + text.size()) return out;
    }
    throw ConfigError("field '" + std::string(name) + "' must be an integer");
}

Json to_json(const WitnessCertificate& cert) {
    Json j;
    j["schema_version"] = kWitnessSchema;
    j["kernel_id"] = cert.kernel_id;
    j["function_id"] = cert.function_id;
    j["sequence_id"] = cert.sequence_id;
    j["c"] = decimal(cert.c);
    j["alpha"] = decimal(cert.alpha);
    j["alpha_provenance"] = to_string(cert.alpha_provenance);
    j["C_K"] = decimal(cert.C_K);
    j["N"] = decimal(cert.N);
    j["ell"] = decimal(cert.ell);
    j["doublings"] = decimal(cert.doublings);
    j["coefficients"] = decimals(cert.coefficients);
    j["points"] = decimals(cert.points);
    j["r_value"] = decimal(cert.r_value);
    j["truncation_bound"] = decimal(cert.truncation_bound);
    j["evaluation"] = to_string(cert.evaluation);
    j["band_limit"] = decimal(cert.band_limit);
    j["precision_bits"] = decimal(static_cast<std::int64_t>(cert.precision_bits));
    return j;
}

WitnessCertificate certificate_from_json(const Json& j) {
    if (read_string(j, "schema_version") != kWitnessSchema) {
        throw ConfigError("unsupported certificate schema '" + read_string(j, "schema_version") + "'");
    }
    WitnessCertificate cert;
    cert.kernel_id = read_string(j, "kernel_id");
    cert.function_id = read_string(j, "function_id");
    cert.sequence_id = read_string(j, "sequence_id");
    cert.c = read_double(field(j, "c"), "c");
    cert.alpha = read_double(field(j, "alpha"), "alpha");
    const std::string provenance = read_string(j, "alpha_provenance");
    if (provenance != "declared" && provenance != "empirical") throw ConfigError("bad alpha_provenance '" + provenance + "'");
    cert.alpha_provenance = provenance == "declared" ? AlphaProvenance::Declared : AlphaProvenance::Empirical;
    cert.C_K = read_double(field(j, "C_K"), "C_K");
    cert.N = read_integer(field(j, "N"), "N");
    cert.ell = read_integer(field(j, "ell"), "ell");
    cert.doublings = read_integer(field(j, "doublings"), "doublings");
    const std::int64_t bits = read_integer(field(j, "precision_bits"), "precision_bits");
    if (bits < 53 || bits > 1 << 16) throw ConfigError("precision_bits out of range");
    cert.precision_bits = static_cast<unsigned>(bits);
    for (const auto& v : field(j, "coefficients")) cert.coefficients.push_back(read_double(v, "coefficients"));
    for (const auto& v : field(j, "points")) cert.points.push_back(read_double(v, "points"));
    try {
        cert.r_value = BigFloat::from_string(read_string(j, "r_value"), cert.precision_bits);
        cert.truncation_bound = BigFloat::from_string(read_string(j, "truncation_bound"), cert.precision_bits);
    } catch (const PreconditionError& e) {
        throw ConfigError(e.what());
    }
    const std::string evaluation = read_string(j, "evaluation");
    if (evaluation != "dense" && evaluation != "banded") throw ConfigError("bad evaluation '" + evaluation + "'");
    cert.evaluation = evaluation == "dense" ? FormEvaluation::Dense : FormEvaluation::Banded;
    cert.band_limit = read_integer(field(j, "band_limit"), "band_limit");
    return cert;
}

Json to_json(const PsdVerdict& verdict) {
    Json j;
    j["is_psd"] = verdict.is_psd;
    j["min_pivot"] = decimal(verdict.min_pivot);
    j["tolerance"] = decimal(verdict.tolerance);
    j["unconfirmed_negative_pivot"] = verdict.unconfirmed_negative_pivot;
    j["witness"] = verdict.witness ? decimals(*verdict.witness) : Json();
    j["witness_value"] = verdict.witness_value ? Json(decimal(*verdict.witness_value)) : Json();
    return j;
}

Json to_json(const DecayReport& report) {
    Json j;
    j["window"] = decimal(report.window);
    Json ells = Json::array();
    for (const auto ell : report.ell_values) ells.push_back(decimal(ell));
    j["ell_values"] = ells;
    j["max_offdiag"] = decimals(report.max_offdiag);
    j["threshold"] = decimal(report.threshold);
    j["passed"] = report.passed;
    j["status"] = report.passed ? std::string("passed") : "failed: " + report.reason;
    j["evidence"] = to_string(report.evidence);
    if (report.sign_obstruction) {
        const auto& s = *report.sign_obstruction;
        Json triple = Json::array();
        for (const auto i : s.triple) triple.push_back(decimal(static_cast<std::int64_t>(i)));
        j["sign_obstruction"] = {{"triple", triple},
                                 {"agreeing",
                                  {decimal(static_cast<std::int64_t>(s.agreeing.first)),
                                   decimal(static_cast<std::int64_t>(s.agreeing.second))}}};
    } else {
        j["sign_obstruction"] = nullptr;
    }
    return j;
}

Json to_json(const DerivativeReport& report) {
    Json j;
    Json orders = Json::array();
    for (const auto n : report.orders) orders.push_back(decimal(static_cast<std::int64_t>(n)));
    j["orders"] = orders;
    j["dnn_values"] = decimals(report.dnn_values);
    j["fd_values"] = report.fd_values ? decimals(*report.fd_values) : Json();
    j["growth_constants"] = {{"C", decimal(report.growth_constants.C)}, {"R", decimal(report.growth_constants.R)}};
    j["norm_f"] = decimal(report.norm_f);
    j["exact_bounds"] = decimals(report.exact_bounds);
    j["bound_curve"] = decimals(report.bound_curve);
    j["dominated"] = report.dominated;
    j["all_dominated"] = report.all_dominated();
    return j;
}

Json to_json(const NormTrace& trace) {
    Json j;
    j["label"] = "diagnostic";
    j["rule"] = to_string(trace.rule);
    Json sets = Json::array();
    for (const auto& s : trace.point_sets) sets.push_back(decimals(s));
    j["point_sets"] = sets;
    j["norms"] = decimals(trace.norms);
    Json bits = Json::array();
    for (const auto b : trace.precision_bits) bits.push_back(decimal(static_cast<std::int64_t>(b)));
    j["precision_bits"] = bits;
    j["regularization"] = decimal(trace.regularization);
    j["divergence_factor"] = decimal(trace.divergence_factor);
    j["divergence_evidence"] = trace.divergence_evidence;
    j["truncated"] = trace.truncated ? Json(*trace.truncated) : Json();
    return j;
}

std::string canonical_dump(const Json& json) { return json.dump(2, ' ', false, Json::error_handler_t::strict) + "\n"; }

void write_json_file(const Json& json, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out << canonical_dump(json);
    out.flush();
    if (!out) throw Error("write to '" + path.string() + "' failed");
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        return Json::parse(buffer.str());
    } catch (const Json::parse_error& e) {
        throw ConfigError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

}  // namespace rkhs
