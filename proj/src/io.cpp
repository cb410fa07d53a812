#include "eszm/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace eszm {

using nlohmann::json;

static cplx json_complex(const json& v) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2) return {v[0].get<double>(), v[1].get<double>()};
    throw std::invalid_argument("complex value must be a number or a [re, im] pair");
}

static BetaMap json_betas(const json& obj) {
    BetaMap m;
    if (!obj.is_object()) throw std::invalid_argument("beta block must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) m[it.key()] = json_complex(it.value());
    return m;
}

BoundaryDocument parse_boundary_json(const json& doc) {
    BoundaryDocument d;
    d.series = doc.at("series").get<std::string>();
    d.n = doc.at("n").get<int>();
    d.params.betaMinus = json_betas(doc.at("beta_minus"));
    d.params.betaPlus = json_betas(doc.at("beta_plus"));
    validate_betas(parse_series(d.series), d.n, d.params.betaMinus);
    validate_betas(parse_series(d.series), d.n, d.params.betaPlus);
    return d;
}

BoundaryDocument load_boundary_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open boundary file " + path);
    return parse_boundary_json(json::parse(in));
}

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json boundary_to_json(const std::string& series, int n, const BoundaryParams& p) {
    json j;
    j["series"] = series;
    j["n"] = n;
    j["beta_minus"] = json::object();
    j["beta_plus"] = json::object();
    for (const auto& [k, v] : p.betaMinus) j["beta_minus"][k] = complex_to_json(v);
    for (const auto& [k, v] : p.betaPlus) j["beta_plus"][k] = complex_to_json(v);
    return j;
}

FieldsDocument parse_fields_json(const json& doc) {
    FieldsDocument f;
    auto read = [&](const char* key, Fields9& out) {
        if (!doc.contains(key)) return;
        const auto& a = doc.at(key);
        if (!a.is_array() || a.size() != 9) throw std::invalid_argument(std::string(key) + " must hold 9 reals");
        for (int i = 0; i < 9; ++i) out[i] = a[i].get<double>();
    };
    read("h_left", f.left);
    read("h_right", f.right);
    return f;
}

FieldsDocument load_fields_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open fields file " + path);
    return parse_fields_json(json::parse(in));
}

cplx parse_complex(const std::string& text) {
    std::stringstream ss(text);
    std::string re, im;
    std::getline(ss, re, ',');
    std::getline(ss, im);
    try {
        return {std::stod(re), im.empty() ? 0.0 : std::stod(im)};
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse complex number '" + text + "'");
    }
}

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

}  // namespace eszm
