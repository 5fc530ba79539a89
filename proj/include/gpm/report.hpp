#pragma once

// JSON and CSV renderings of library results. Every JSON document carries
// "schema": "gpm/1".

#include "gpm/grassmann.hpp"
#include "gpm/interpolation.hpp"
#include "gpm/io.hpp"
#include "gpm/metrics.hpp"
#include "gpm/snapshots.hpp"
#include "gpm/stability.hpp"
#include "gpm/synth.hpp"

#include <json.hpp>

#include <cmath>
#include <string>
#include <vector>

namespace gpm::report {

using json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "gpm/1";

/// Finite values as numbers; NaN as null; infinities as "inf" / "-inf".
inline json number(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return nullptr;
    return x > 0 ? "inf" : "-inf";
}

inline json document(const std::string& command) {
    json j;
    j["schema"] = kSchema;
    j["command"] = command;
    return j;
}

inline json to_json(const C1Record& c1) {
    json j;
    j["ok"] = c1.ok;
    j["reference_index"] = c1.reference_index;
    j["failing_indices"] = c1.failing_indices;
    json sv = json::array();
    for (double s : c1.min_singular_values) sv.push_back(number(s));
    j["min_singular_values"] = sv;
    return j;
}

inline json to_json(const C2Record& c2) {
    json j;
    j["ok"] = c2.ok;
    j["theta_max"] = number(c2.theta_max);
    return j;
}

inline json to_json(const DistanceTable& t) {
    json j;
    j["modes"] = t.modes;
    json rows = json::array();
    for (Eigen::Index i = 0; i < t.values.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < t.values.cols(); ++k) row.push_back(number(t.values(i, k)));
        rows.push_back(row);
    }
    j["values"] = rows;
    return j;
}

inline json to_json(const C3Record& c3) {
    json j;
    j["ok"] = c3.ok;
    j["epsilon"] = number(c3.epsilon);
    j["threshold"] = number(c3.threshold);
    j["delta_min"] = number(c3.delta_min);
    j["delta_max"] = number(c3.delta_max);
    j["distance_table"] = to_json(c3.table);
    return j;
}

inline json to_json(const StabilityReport& r) {
    json j;
    j["c1"] = to_json(r.c1);
    j["c2"] = r.c2 ? to_json(*r.c2) : json(nullptr);
    j["c3"] = r.c3 ? to_json(*r.c3) : json(nullptr);
    return j;
}

inline json to_json(const SweepResult& s) {
    json j;
    j["grid"] = {{"lo", number(s.lo)}, {"hi", number(s.hi)}, {"samples", s.count}, {"step", number(s.step())}};
    j["reference_index"] = s.reference_index;
    j["c1"] = to_json(s.c1);
    json intervals = json::array();
    for (const auto& [a, b] : s.unstable_intervals()) intervals.push_back({number(a), number(b)});
    j["unstable_intervals"] = intervals;
    j["all_stable"] = s.all_stable();
    return j;
}

inline std::string sweep_csv(const SweepResult& s) {
    std::string out = "lambda,theta_max,c2_ok,valid\n";
    for (const auto& x : s.samples) {
        out += io::format_double(x.param);
        out += ',';
        out += x.valid ? io::format_double(x.theta_max) : std::string("nan");
        out += x.c2_ok ? ",1" : ",0";
        out += x.valid ? ",1\n" : ",0\n";
    }
    return out;
}

inline std::string table_csv(const DistanceTable& t) {
    std::string out = "mode";
    for (auto m : t.modes) out += "," + std::to_string(m);
    out += '\n';
    for (Eigen::Index i = 0; i < t.values.rows(); ++i) {
        out += std::to_string(t.modes[static_cast<std::size_t>(i)]);
        for (Eigen::Index k = 0; k < t.values.cols(); ++k) out += "," + io::format_double(t.values(i, k));
        out += '\n';
    }
    return out;
}

inline std::string spectrum_csv(const std::vector<double>& s) {
    std::string out = "index,sigma\n";
    for (std::size_t i = 0; i < s.size(); ++i) out += std::to_string(i + 1) + "," + io::format_double(s[i]) + "\n";
    return out;
}

inline std::string l2_series_csv(const std::vector<double>& e) {
    std::string out = "t_index,e_L2\n";
    for (std::size_t i = 0; i < e.size(); ++i) out += std::to_string(i) + "," + io::format_double(e[i]) + "\n";
    return out;
}

inline json to_json(const FamilySpec& spec) {
    json j;
    j["n"] = spec.n;
    j["n_t"] = spec.n_t;
    j["mode_count"] = spec.mode_count;
    j["kind"] = std::string(to_string(spec.kind));
    j["rate"] = number(spec.rate);
    j["seed"] = spec.seed;
    json params = json::array();
    for (double p : spec.params) params.push_back(number(p));
    j["params"] = params;
    j["center"] = number(spec.center);
    j["curvature"] = number(spec.curvature);
    return j;
}

}  // namespace gpm::report
