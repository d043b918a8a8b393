#pragma once

#include "chaincalc/gradient.hpp"
#include "chaincalc/space.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace chaincalc {

// Insertion order is preserved so documents serialize in the order they are
// built; together with the library's round-trip float format this makes every
// emitted file a pure function of its inputs.
using Json = nlohmann::ordered_json;

// --- files -------------------------------------------------------------------

// Whole-file read; a path that cannot be opened is reported as MissingInput.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// 64-bit FNV-1a over the raw bytes, rendered "fnv1a:" + 16 hex digits.
std::string content_digest(const std::string& bytes);

// --- numbers with infinities ---------------------------------------------------

// JSON has no non-finite numbers; they travel as the strings "inf", "-inf",
// "nan" and decode back to the corresponding doubles.
Json encode_number(double v);
double decode_number(const Json& j, const std::string& what);

Json encode_vector(const std::vector<double>& v);

// --- documents -----------------------------------------------------------------

Json parse_json(const std::string& text, const std::string& what);

Json space_to_json(const PointCloudSpace& space);
// Strict: unknown keys are rejected, shapes must line up. Metric/mass defects
// are left to validate_space.
PointCloudSpace space_from_json(const Json& doc);

Json field_to_json(const ScalarField& field);
ScalarField field_from_json(const Json& doc);

// Point tokens of an explicit chain family, one list per chain; integers come
// back as decimal strings so labels and indexes resolve uniformly.
std::vector<std::vector<std::string>> chain_lists_from_json(const Json& doc);

// Read + parse + validate in one step.
PointCloudSpace load_space(const std::string& path);
ScalarField load_field(const std::string& path);

// --- run envelopes ---------------------------------------------------------------

struct InputRecord {
    std::string name;
    std::string path;
    std::string digest;
};

// {schema, command, parameters, inputs, result, runtime_ms}; everything except
// runtime_ms is reproducible byte for byte from the command line and the input
// bytes.
Json result_envelope(const std::string& command, const Json& parameters,
                     const std::vector<InputRecord>& inputs, const Json& result,
                     double runtime_ms);

Json error_envelope(const std::string& command, const std::string& code,
                    const std::string& message);

} // namespace chaincalc
