#include "chaincalc/io.hpp"

#include "chaincalc/errors.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

namespace chaincalc {

namespace {

void reject_unknown_keys(const Json& doc, std::initializer_list<const char*> allowed,
                         const std::string& what) {
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        bool known = false;
        for (const char* key : allowed)
            if (it.key() == key) {
                known = true;
                break;
            }
        if (!known) fail("ConfigParse", what + ": unknown key \"" + it.key() + "\"");
    }
}

void check_header(const Json& doc, const char* kind, const std::string& what) {
    if (!doc.is_object()) fail("ConfigParse", what + ": expected a JSON object");
    if (doc.contains("schema") &&
        (!doc["schema"].is_number_integer() || doc["schema"].get<int>() != 1))
        fail("ConfigParse", what + ": unsupported schema version");
    if (doc.contains("kind") && doc["kind"] != kind)
        fail("ConfigParse", what + ": expected kind \"" + kind + "\"");
}

} // namespace

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("MissingInput", "cannot open \"" + path + "\" for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) fail("MissingInput", "read error on \"" + path + "\"");
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail("MissingInput", "cannot open \"" + path + "\" for writing");
    out << content;
    out.flush();
    if (!out) fail("MissingInput", "write error on \"" + path + "\"");
}

std::string content_digest(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Json encode_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

double decode_number(const Json& j, const std::string& what) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const std::string& s = j.get_ref<const std::string&>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    fail("ConfigParse", what + ": expected a number or \"inf\"/\"-inf\"/\"nan\"");
}

Json encode_vector(const std::vector<double>& v) {
    Json arr = Json::array();
    for (double x : v) arr.push_back(encode_number(x));
    return arr;
}

Json parse_json(const std::string& text, const std::string& what) {
    Json doc = Json::parse(text, nullptr, false);
    if (doc.is_discarded()) fail("ConfigParse", what + ": not valid JSON");
    return doc;
}

Json space_to_json(const PointCloudSpace& space) {
    Json doc;
    doc["schema"] = 1;
    doc["kind"] = "space";
    doc["n"] = space.n;
    Json dist = Json::array();
    for (int i = 0; i < space.n; ++i) {
        Json row = Json::array();
        for (int j = 0; j < space.n; ++j) row.push_back(encode_number(space.d(i, j)));
        dist.push_back(std::move(row));
    }
    doc["dist"] = std::move(dist);
    doc["mass"] = encode_vector(space.mass);
    if (!space.labels.empty()) doc["labels"] = space.labels;
    if (!space.coords.empty()) {
        Json coords = Json::array();
        for (const auto& c : space.coords) coords.push_back(encode_vector(c));
        doc["coords"] = std::move(coords);
    }
    return doc;
}

PointCloudSpace space_from_json(const Json& doc) {
    const std::string what = "space document";
    check_header(doc, "space", what);
    reject_unknown_keys(doc, {"schema", "kind", "n", "dist", "mass", "labels", "coords"},
                        what);
    if (!doc.contains("dist") || !doc["dist"].is_array())
        fail("ConfigParse", what + ": missing \"dist\" matrix");
    if (!doc.contains("mass") || !doc["mass"].is_array())
        fail("ConfigParse", what + ": missing \"mass\" vector");

    const Json& dist = doc["dist"];
    const size_t n = dist.size();
    if (doc.contains("n") && (!doc["n"].is_number_integer() ||
                              doc["n"].get<long long>() != static_cast<long long>(n)))
        fail("ConfigParse", what + ": \"n\" disagrees with the distance matrix");

    PointCloudSpace space;
    space.n = static_cast<int>(n);
    space.dist.resize(n * n);
    for (size_t i = 0; i < n; ++i) {
        const Json& row = dist[i];
        if (!row.is_array() || row.size() != n)
            fail("ConfigParse", what + ": \"dist\" must be a square matrix");
        for (size_t j = 0; j < n; ++j)
            space.dist[i * n + j] = decode_number(row[j], what + ": dist entry");
    }

    const Json& mass = doc["mass"];
    if (mass.size() != n) fail("ConfigParse", what + ": \"mass\" length must equal n");
    space.mass.reserve(n);
    for (const Json& m : mass) space.mass.push_back(decode_number(m, what + ": mass entry"));

    if (doc.contains("labels")) {
        const Json& labels = doc["labels"];
        if (!labels.is_array() || labels.size() != n)
            fail("ConfigParse", what + ": \"labels\" length must equal n");
        for (const Json& l : labels) {
            if (!l.is_string()) fail("ConfigParse", what + ": labels must be strings");
            space.labels.push_back(l.get<std::string>());
        }
    }
    if (doc.contains("coords")) {
        const Json& coords = doc["coords"];
        if (!coords.is_array() || coords.size() != n)
            fail("ConfigParse", what + ": \"coords\" length must equal n");
        size_t dim = coords.empty() ? 0 : coords.front().size();
        for (const Json& c : coords) {
            if (!c.is_array() || c.size() != dim)
                fail("ConfigParse", what + ": coordinate rows must share one length");
            std::vector<double> row;
            row.reserve(dim);
            for (const Json& x : c) row.push_back(decode_number(x, what + ": coordinate"));
            space.coords.push_back(std::move(row));
        }
    }
    return space;
}

namespace {

const char* role_name(FieldRole role) {
    switch (role) {
        case FieldRole::function: return "function";
        case FieldRole::gradient: return "gradient";
        default: return "density";
    }
}

FieldRole role_from_name(const std::string& name, const std::string& what) {
    if (name == "function") return FieldRole::function;
    if (name == "gradient") return FieldRole::gradient;
    if (name == "density") return FieldRole::density;
    fail("ConfigParse", what + ": unknown role \"" + name + "\"");
}

} // namespace

Json field_to_json(const ScalarField& field) {
    Json doc;
    doc["schema"] = 1;
    doc["kind"] = "field";
    doc["role"] = role_name(field.role);
    doc["values"] = encode_vector(field.values);
    return doc;
}

ScalarField field_from_json(const Json& doc) {
    const std::string what = "field document";
    check_header(doc, "field", what);
    reject_unknown_keys(doc, {"schema", "kind", "role", "values"}, what);
    if (!doc.contains("role") || !doc["role"].is_string())
        fail("ConfigParse", what + ": missing \"role\"");
    if (!doc.contains("values") || !doc["values"].is_array())
        fail("ConfigParse", what + ": missing \"values\" array");
    std::vector<double> values;
    values.reserve(doc["values"].size());
    for (const Json& v : doc["values"]) values.push_back(decode_number(v, what + ": value"));
    return make_field(std::move(values), role_from_name(doc["role"], what));
}

std::vector<std::vector<std::string>> chain_lists_from_json(const Json& doc) {
    const std::string what = "chains document";
    check_header(doc, "chains", what);
    reject_unknown_keys(doc, {"schema", "kind", "chains"}, what);
    if (!doc.contains("chains") || !doc["chains"].is_array())
        fail("ConfigParse", what + ": missing \"chains\" array");
    std::vector<std::vector<std::string>> lists;
    for (const Json& entry : doc["chains"]) {
        if (!entry.is_array() || entry.size() < 2)
            fail("ConfigParse", what + ": each chain needs at least two points");
        std::vector<std::string> tokens;
        tokens.reserve(entry.size());
        for (const Json& point : entry) {
            if (point.is_number_integer())
                tokens.push_back(std::to_string(point.get<long long>()));
            else if (point.is_string())
                tokens.push_back(point.get<std::string>());
            else
                fail("ConfigParse", what + ": points are ids or labels");
        }
        lists.push_back(std::move(tokens));
    }
    return lists;
}

PointCloudSpace load_space(const std::string& path) {
    PointCloudSpace space =
        space_from_json(parse_json(read_text_file(path), "space file " + path));
    validate_space(space);
    return space;
}

ScalarField load_field(const std::string& path) {
    return field_from_json(parse_json(read_text_file(path), "field file " + path));
}

Json result_envelope(const std::string& command, const Json& parameters,
                     const std::vector<InputRecord>& inputs, const Json& result,
                     double runtime_ms) {
    Json doc;
    doc["schema"] = 1;
    doc["command"] = command;
    doc["parameters"] = parameters;
    Json ins = Json::array();
    for (const InputRecord& rec : inputs)
        ins.push_back({{"name", rec.name}, {"path", rec.path}, {"digest", rec.digest}});
    doc["inputs"] = std::move(ins);
    doc["result"] = result;
    doc["runtime_ms"] = runtime_ms;
    return doc;
}

Json error_envelope(const std::string& command, const std::string& code,
                    const std::string& message) {
    Json doc;
    doc["schema"] = 1;
    doc["command"] = command;
    doc["error"] = {{"code", code}, {"message", message}};
    return doc;
}

} // namespace chaincalc
