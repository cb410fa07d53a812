#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "eszm/boundary_catalog.hpp"
#include "eszm/models_ed.hpp"

namespace eszm {

inline constexpr const char* kVersion = "0.3.0";

struct BoundaryDocument {
    std::string series;
    int n = 0;
    BoundaryParams params;
};

BoundaryDocument parse_boundary_json(const nlohmann::json& doc);
BoundaryDocument load_boundary_file(const std::string& path);
nlohmann::json boundary_to_json(const std::string& series, int n, const BoundaryParams& p);

struct FieldsDocument {
    Fields9 left{};
    Fields9 right{};
};

FieldsDocument parse_fields_json(const nlohmann::json& doc);
FieldsDocument load_fields_file(const std::string& path);

// "re,im" or "re"
cplx parse_complex(const std::string& text);
nlohmann::json complex_to_json(cplx z);

// 17 significant digits, scientific
std::string fmt17(double x);

}  // namespace eszm
