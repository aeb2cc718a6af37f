#pragma once

#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "reglab/linalg.hpp"
#include "reglab/numeric.hpp"
#include "reglab/settings.hpp"

namespace reglab {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "reglab 0.1.0";

// Complex numbers are serialized as decimal strings to keep reports
// byte-reproducible and free of float-formatting surprises.
inline std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline Json to_json(cplx z) {
    return Json{{"re", fmt_double(z.real())}, {"im", fmt_double(z.imag())}};
}

inline Json to_json(const CMatrix& m) {
    Json rows = Json::array();
    for (auto& r : m) {
        Json row = Json::array();
        for (auto& z : r) row.push_back(to_json(z));
        rows.push_back(row);
    }
    return rows;
}

inline Json settings_json(const EvalSettings& s) {
    return Json{{"tol", fmt_double(s.tol)},
                {"max_q_terms", s.max_q_terms},
                {"shell_radius", fmt_double(s.shell_radius)},
                {"route", route_name(s.route)}};
}

inline void apply_settings_json(const Json& j, EvalSettings& s) {
    if (j.contains("tol")) s.tol = j["tol"].is_string()
                                       ? std::stod(j["tol"].get<std::string>())
                                       : j["tol"].get<double>();
    if (j.contains("max_q_terms")) s.max_q_terms = j["max_q_terms"].get<int>();
    if (j.contains("shell_radius"))
        s.shell_radius = j["shell_radius"].is_string()
                             ? std::stod(j["shell_radius"].get<std::string>())
                             : j["shell_radius"].get<double>();
    if (j.contains("route")) {
        std::string r = j["route"].get<std::string>();
        if (r == "qseries") s.route = Route::QSeries;
        else if (r == "continued") s.route = Route::Continued;
        else if (r == "direct") s.route = Route::DirectSum;
        else s.route = Route::Auto;
    }
    s.validate();
}

inline void write_json_file(const Json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("write_json_file", "cannot open " + path);
    out << j.dump(2) << "\n";
}

} // namespace reglab
