#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "rkhs/analytic.hpp"
#include "rkhs/interpolant.hpp"
#include "rkhs/quadform.hpp"
#include "rkhs/sequences.hpp"
#include "rkhs/witness.hpp"

namespace rkhs {

/// Objects keep their keys sorted, which makes dumps canonical.
using Json = nlohmann::json;

/// Numbers always travel as decimal strings.
std::string decimal(double value);
std::string decimal(std::int64_t value);
inline std::string decimal(const BigFloat& value) { return value.to_string(); }

/// Inverse of `decimal`; throws `ConfigError` naming `field` on malformed input.
double read_double(const Json& value, std::string_view field);
std::int64_t read_integer(const Json& value, std::string_view field);

Json to_json(const WitnessCertificate& cert);
/// Throws `ConfigError` on a wrong schema version or a missing or malformed field.
WitnessCertificate certificate_from_json(const Json& json);

Json to_json(const PsdVerdict& verdict);
Json to_json(const DecayReport& report);
Json to_json(const DerivativeReport& report);
Json to_json(const NormTrace& trace);

/// Sorted keys, two-space indent, trailing newline.
std::string canonical_dump(const Json& json);

/// Writes `canonical_dump(json)`; throws `Error` with the path on failure.
void write_json_file(const Json& json, const std::filesystem::path& path);
/// Throws `ConfigError` with the path when the file is missing or not JSON.
Json read_json_file(const std::filesystem::path& path);

}  // namespace rkhs
