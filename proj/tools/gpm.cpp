// gpm: command-line front end for the gpm library.
//
//   gpm synth        generate a synthetic snapshot family and its manifest
//   gpm pod          POD bases and singular spectra of snapshot files
//   gpm interpolate  interpolated subspace at a target parameter
//   gpm sweep-c2     theta_1 of the interpolated lift over a parameter grid
//   gpm check-c3     mode-inclusion defect across a list of mode counts
//   gpm distance     principal angles and distances between two subspaces
//   gpm metrics      relative L2 / Frobenius errors of a reconstruction
//
// Exit codes: 0 ok, 2 bad parameters, 3 unreadable or invalid data,
// 4 other numerical failure, 10 C1 failure, 11 C2 failure, 12 C3 failure.

#include <gpm/gpm.hpp>
#include <gpm/io.hpp>
#include <gpm/report.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using gpm::Matrix;
using gpm::report::json;

namespace {

enum ExitCode : int {
    kOk = 0,
    kParameter = 2,
    kData = 3,
    kNumerical = 4,
    kC1 = 10,
    kC2 = 11,
    kC3 = 12,
};

struct Global {
    std::string out = "gpm-out";
    std::uint64_t seed = 0;
    bool quiet = false;
    std::string report = "both";
    unsigned threads = 1;

    bool want_json() const { return report != "csv"; }
    bool want_csv() const { return report != "json"; }
    fs::path path(const std::string& name) const { return fs::path(out) / name; }
};

void say(const Global& g, const std::string& line) {
    if (!g.quiet) std::cout << line << '\n';
}

void warn(const Global& g, const std::string& line) {
    if (!g.quiet) std::cerr << "gpm: warning: " << line << '\n';
}

void write_json(const Global& g, const std::string& name, const json& j) {
    gpm::io::write_text(g.path(name), j.dump(2) + "\n");
}

std::string fmt(double x) { return gpm::io::format_double(x); }

// ---------------------------------------------------------------- inputs

struct InputOptions {
    std::string manifest;
    std::vector<std::string> files;
    std::vector<double> params;
};

void add_input_options(CLI::App* cmd, InputOptions& in) {
    cmd->add_option("--manifest", in.manifest, "manifest.json written by `gpm synth`");
    cmd->add_option("-i,--input", in.files, "snapshot (.gpm) or frame (.gpf) files, binary or CSV")
        ->delimiter(',');
    cmd->add_option("--params", in.params, "parameter value per input (overrides stored values)")
        ->delimiter(',');
}

struct Node {
    std::string name;
    double param = 0.0;
    gpm::io::MatrixFile file;
};

std::vector<Node> load_nodes(const InputOptions& in) {
    std::vector<fs::path> paths;
    std::vector<std::optional<double>> params;
    if (!in.manifest.empty()) {
        if (!in.files.empty()) throw gpm::ParameterError("give either --manifest or --input, not both");
        const fs::path mpath(in.manifest);
        json m;
        try {
            m = json::parse(gpm::io::detail::read_all(mpath));
        } catch (const json::exception& e) {
            throw gpm::DataError(mpath.string() + ": " + e.what());
        }
        if (!m.contains("snapshots") || !m["snapshots"].is_array()) {
            throw gpm::DataError(mpath.string() + ": no \"snapshots\" array");
        }
        for (const auto& entry : m["snapshots"]) {
            paths.push_back(mpath.parent_path() / entry.at("file").get<std::string>());
            params.emplace_back(entry.at("param").get<double>());
        }
    } else {
        if (in.files.empty()) throw gpm::ParameterError("no inputs: pass --manifest or --input");
        for (const auto& f : in.files) paths.emplace_back(f);
        params.resize(paths.size());
    }
    if (!in.params.empty()) {
        if (in.params.size() != paths.size()) {
            throw gpm::ParameterError("--params has " + std::to_string(in.params.size()) + " values for " +
                                      std::to_string(paths.size()) + " inputs");
        }
        for (std::size_t i = 0; i < paths.size(); ++i) params[i] = in.params[i];
    }

    std::vector<Node> nodes(paths.size());
    for (std::size_t i = 0; i < paths.size(); ++i) {
        Node& node = nodes[i];
        node.name = paths[i].filename().string();
        node.file = gpm::io::read_matrix_file(paths[i]);
        const auto param = params[i] ? params[i] : node.file.param;
        if (!param) {
            throw gpm::ParameterError(paths[i].string() + ": no parameter value stored; pass --params");
        }
        node.param = *param;
        if (!node.file.data.allFinite()) throw gpm::DataError(paths[i].string() + ": non-finite entries");
    }
    return nodes;
}

void require_modes(std::vector<Eigen::Index>& modes) {
    for (std::size_t i = 1; i < modes.size(); ++i) {
        if (modes[i] <= modes[i - 1]) {
            throw gpm::ParameterError("mode list must be strictly ascending");
        }
    }
}

// points[m][i]: subspace of node i at modes[m]. Snapshot inputs go through
// POD (one SVD per node for all modes); frame inputs keep their leading
// columns.
std::vector<std::vector<gpm::GrassmannPoint>> subspaces(const Global& g, const std::vector<Node>& nodes,
                                                        const std::vector<Eigen::Index>& modes) {
    std::vector<std::vector<std::optional<gpm::GrassmannPoint>>> slots(
        modes.size(), std::vector<std::optional<gpm::GrassmannPoint>>(nodes.size()));
    std::vector<std::vector<std::string>> warnings(nodes.size());
    gpm::parallel_for(nodes.size(), g.threads, [&](std::size_t i) {
        const Node& node = nodes[i];
        try {
            if (node.file.kind == gpm::io::MatrixKind::frame) {
                for (std::size_t m = 0; m < modes.size(); ++m) {
                    if (modes[m] > node.file.data.cols()) {
                        throw gpm::ParameterError("frame has p = " + std::to_string(node.file.data.cols()) +
                                                  " < requested mode " + std::to_string(modes[m]));
                    }
                    slots[m][i].emplace(node.file.data.leftCols(modes[m]));
                }
            } else {
                const gpm::SnapshotMatrix s(node.file.data, node.param);
                auto pods = gpm::compute_pods(s, modes);
                for (std::size_t m = 0; m < modes.size(); ++m) {
                    for (auto& w : pods[m].warnings) warnings[i].push_back(std::move(w));
                    slots[m][i].emplace(std::move(pods[m].basis));
                }
            }
        } catch (const gpm::ParameterError& e) {
            throw gpm::ParameterError(node.name + ": " + e.what());
        } catch (const gpm::DegenerateRankError& e) {
            throw gpm::DegenerateRankError(node.name + ": " + e.what(), e.rank());
        } catch (const gpm::DataError& e) {
            throw gpm::DataError(node.name + ": " + e.what());
        }
    });
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (const auto& w : warnings[i]) warn(g, nodes[i].name + ": " + w);
    }
    std::vector<std::vector<gpm::GrassmannPoint>> out(modes.size());
    for (std::size_t m = 0; m < modes.size(); ++m) {
        for (auto& s : slots[m]) out[m].push_back(std::move(*s));
    }
    return out;
}

Eigen::Index default_mode(const std::vector<Node>& nodes, std::optional<Eigen::Index> mode) {
    if (mode) return *mode;
    for (const auto& n : nodes) {
        if (n.file.kind != gpm::io::MatrixKind::frame) {
            throw gpm::ParameterError("--mode is required for snapshot inputs");
        }
    }
    return nodes.front().file.data.cols();
}

std::vector<double> node_params(const std::vector<Node>& nodes) {
    std::vector<double> p;
    for (const auto& n : nodes) p.push_back(n.param);
    return p;
}

json inputs_json(const std::vector<Node>& nodes) {
    json arr = json::array();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        arr.push_back({{"index", i},
                       {"name", nodes[i].name},
                       {"param", gpm::report::number(nodes[i].param)},
                       {"kind", nodes[i].file.kind == gpm::io::MatrixKind::frame ? "frame" : "snapshot"}});
    }
    return arr;
}

std::string index_name(const std::string& stem, std::size_t i, const std::string& ext) {
    std::string num = std::to_string(i);
    if (num.size() < 3) num.insert(0, 3 - num.size(), '0');
    return stem + "_" + num + ext;
}

// ---------------------------------------------------------------- synth

struct SynthOptions {
    std::string kind = "rotation";
    Eigen::Index n = 0;
    Eigen::Index n_t = 0;
    Eigen::Index mode_count = 1;
    double rate = 0.0;
    std::vector<double> params;
    double center = 0.0;
    double curvature = 0.0;
    bool csv_data = false;
};

int run_synth(const Global& g, const SynthOptions& o) {
    gpm::FamilySpec spec;
    spec.kind = gpm::family_kind_from_string(o.kind);
    spec.n = o.n;
    spec.n_t = o.n_t;
    spec.mode_count = o.mode_count;
    spec.rate = o.rate;
    spec.seed = g.seed;
    spec.params = o.params;
    spec.center = o.center;
    spec.curvature = o.curvature;
    const gpm::SynthFamily fam = gpm::generate_family(spec);

    json doc = gpm::report::document("synth");
    doc["rng"] = std::string(gpm::SplitMix64::kName);
    doc["spec"] = gpm::report::to_json(fam.spec);
    doc["singular_ladder"] = fam.singular_ladder;
    json crossings = json::array();
    for (double c : fam.crossing_points) crossings.push_back(gpm::report::number(c));
    doc["crossing_points"] = crossings;
    doc["warnings"] = fam.warnings;

    gpm::io::write_matrix_binary(g.path("directions.gpf"), fam.directions, 0.0, gpm::io::MatrixKind::frame);
    json truth = {{"directions_file", "directions.gpf"},
                  {"directions", "columns q_1..q_2P; mode k at node i spans cos(a_k) q_k + sin(a_k) partner_k"}};
    if (fam.spec.kind == gpm::FamilyKind::non_nested) {
        gpm::io::write_matrix_binary(g.path("coupled.gpm"), fam.coupled, 0.0, gpm::io::MatrixKind::snapshot);
        truth["partner_file"] = "coupled.gpm";
    } else {
        truth["partner_file"] = "directions.gpf columns P+1..2P";
    }
    doc["ground_truth"] = truth;

    json snaps = json::array();
    for (std::size_t i = 0; i < fam.snapshots.size(); ++i) {
        const std::string name = index_name("snapshot", i, ".gpm");
        gpm::io::write_snapshot(g.path(name), fam.snapshots[i]);
        json entry = {{"index", i}, {"param", gpm::report::number(fam.snapshots[i].param())}, {"file", name}};
        if (o.csv_data) {
            const std::string csv = index_name("snapshot", i, ".csv");
            gpm::io::write_matrix_csv(g.path(csv), fam.snapshots[i].data(), fam.snapshots[i].param(),
                                      gpm::io::MatrixKind::snapshot);
            entry["csv_file"] = csv;
        }
        json angles = json::array();
        for (double a : fam.angles[i]) angles.push_back(gpm::report::number(a));
        entry["angles"] = angles;
        snaps.push_back(entry);
    }
    doc["snapshots"] = snaps;
    write_json(g, "manifest.json", doc);
    for (const auto& w : fam.warnings) warn(g, w);
    say(g, "synth: " + std::to_string(fam.snapshots.size()) + " " + std::string(gpm::to_string(fam.spec.kind)) +
               " snapshots (" + std::to_string(spec.n) + "x" + std::to_string(spec.n_t) + ") -> " + g.out);
    return kOk;
}

// ---------------------------------------------------------------- pod

int run_pod(const Global& g, const InputOptions& in, Eigen::Index mode) {
    const std::vector<Node> nodes = load_nodes(in);
    std::vector<std::optional<gpm::PodResult>> results(nodes.size());
    gpm::parallel_for(nodes.size(), g.threads, [&](std::size_t i) {
        if (nodes[i].file.kind == gpm::io::MatrixKind::frame) {
            throw gpm::ParameterError(nodes[i].name + ": pod needs snapshot inputs, got a frame");
        }
        const gpm::SnapshotMatrix s(nodes[i].file.data, nodes[i].param);
        try {
            results[i].emplace(gpm::compute_pod(s, mode));
        } catch (const gpm::ParameterError& e) {
            throw gpm::ParameterError(nodes[i].name + ": " + e.what());
        } catch (const gpm::DegenerateRankError& e) {
            throw gpm::DegenerateRankError(nodes[i].name + ": " + e.what(), e.rank());
        }
    });

    json doc = gpm::report::document("pod");
    doc["mode"] = mode;
    json items = json::array();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const gpm::PodResult& r = *results[i];
        const std::string basis = index_name("basis", i, ".gpf");
        gpm::io::write_frame(g.path(basis), r.basis, nodes[i].param);
        json item = {{"index", i},
                     {"input", nodes[i].name},
                     {"param", gpm::report::number(nodes[i].param)},
                     {"n", r.basis.n()},
                     {"n_t", nodes[i].file.data.cols()},
                     {"basis_file", basis},
                     {"orthonormality_deviation", gpm::report::number(gpm::orthonormality_deviation(r.basis.frame()))},
                     {"uniqueness_flag", r.uniqueness_flag},
                     {"warnings", r.warnings}};
        if (g.want_csv()) {
            const std::string spec = index_name("spectrum", i, ".csv");
            gpm::io::write_text(g.path(spec), gpm::report::spectrum_csv(r.singular_values));
            item["spectrum_file"] = spec;
        }
        json sv = json::array();
        for (double s : r.singular_values) sv.push_back(gpm::report::number(s));
        item["singular_values"] = sv;
        items.push_back(item);
        for (const auto& w : r.warnings) warn(g, nodes[i].name + ": " + w);
    }
    doc["results"] = items;
    if (g.want_json()) write_json(g, "pod.json", doc);
    say(g, "pod: " + std::to_string(nodes.size()) + " bases at p = " + std::to_string(mode) + " -> " + g.out);
    return kOk;
}

// ---------------------------------------------------------------- interpolate

struct InterpolateOptions {
    InputOptions in;
    std::optional<Eigen::Index> mode;
    std::optional<std::size_t> reference;
    double target = 0.0;
};

int run_interpolate(const Global& g, const InterpolateOptions& o) {
    const std::vector<Node> nodes = load_nodes(o.in);
    const Eigen::Index p = default_mode(nodes, o.mode);
    auto points = std::move(subspaces(g, nodes, {p}).front());
    const gpm::TrainingSet ts(node_params(nodes), std::move(points), o.reference);
    const gpm::InterpolationResult r = gpm::interpolate(ts, o.target);

    gpm::StabilityReport stab;
    stab.c1 = r.c1;
    if (r.c1_ok) stab.c2 = gpm::C2Record{r.c2_ok, r.theta_max};

    json doc = gpm::report::document("interpolate");
    doc["target"] = gpm::report::number(o.target);
    doc["reference_index"] = r.reference_index;
    doc["reference_param"] = gpm::report::number(ts.params()[r.reference_index]);
    doc["extrapolated"] = r.extrapolated;
    doc["n"] = ts.n();
    doc["p"] = ts.p();
    doc["dimension"] = gpm::grassmann_dimension(ts.p(), ts.n());
    doc["theta_max"] = gpm::report::number(r.theta_max);
    json weights = json::array();
    for (double w : gpm::lagrange_weights(ts.params(), o.target)) weights.push_back(gpm::report::number(w));
    doc["weights"] = weights;
    if (r.velocity) {
        const gpm::InjectivityStatus inj = gpm::in_injectivity_domain(*r.velocity);
        doc["injectivity"] = {{"cut_locus_ok", inj.cut_locus_ok},
                              {"radius_ok", inj.radius_ok},
                              {"theta1", gpm::report::number(inj.theta1)},
                              {"norm", gpm::report::number(inj.norm)}};
    } else {
        doc["injectivity"] = nullptr;
    }
    doc["stability"] = gpm::report::to_json(stab);
    doc["inputs"] = inputs_json(nodes);
    doc["frame_file"] = r.frame ? json("interpolated.gpf") : json(nullptr);

    if (r.frame) gpm::io::write_frame(g.path("interpolated.gpf"), *r.frame, o.target);
    if (r.extrapolated) warn(g, "target " + fmt(o.target) + " lies outside the training range");
    if (g.want_json()) write_json(g, "interpolate.json", doc);
    if (g.want_csv()) {
        std::string csv = "key,value\n";
        csv += "target," + fmt(o.target) + "\n";
        csv += "reference_index," + std::to_string(r.reference_index) + "\n";
        csv += "n," + std::to_string(ts.n()) + "\np," + std::to_string(ts.p()) + "\n";
        csv += "dimension," + std::to_string(gpm::grassmann_dimension(ts.p(), ts.n())) + "\n";
        csv += "theta_max," + (r.c1_ok ? fmt(r.theta_max) : std::string("nan")) + "\n";
        csv += std::string("c1_ok,") + (r.c1_ok ? "1" : "0") + "\n";
        csv += std::string("c2_ok,") + (r.c2_ok ? "1" : "0") + "\n";
        csv += std::string("extrapolated,") + (r.extrapolated ? "1" : "0") + "\n";
        gpm::io::write_text(g.path("interpolate.csv"), csv);
    }

    if (!r.c1_ok) {
        std::string bad;
        for (auto i : r.c1.failing_indices) bad += (bad.empty() ? "" : ",") + std::to_string(i);
        std::cerr << "gpm: C1 failed: overlap with reference " << r.reference_index
                  << " is singular for node(s) " << bad << '\n';
        return kC1;
    }
    if (!r.c2_ok) {
        std::cerr << "gpm: C2 failed: theta_max = " << fmt(r.theta_max) << " >= pi/2\n";
        return kC2;
    }
    say(g, "interpolate: target " + fmt(o.target) + ", p = " + std::to_string(ts.p()) + ", dim G(p,n) = " +
               std::to_string(gpm::grassmann_dimension(ts.p(), ts.n())) + ", theta_max = " + fmt(r.theta_max));
    return kOk;
}

// ---------------------------------------------------------------- sweep-c2

struct SweepOptions {
    InputOptions in;
    std::optional<Eigen::Index> mode;
    std::optional<std::size_t> reference;
    std::optional<double> lo;
    std::optional<double> hi;
    std::size_t samples = 401;
};

int run_sweep(const Global& g, const SweepOptions& o) {
    const std::vector<Node> nodes = load_nodes(o.in);
    const Eigen::Index p = default_mode(nodes, o.mode);
    auto points = std::move(subspaces(g, nodes, {p}).front());
    const std::vector<double> params = node_params(nodes);
    const gpm::TrainingSet ts(params, std::move(points), o.reference);
    const double lo = o.lo.value_or(*std::min_element(params.begin(), params.end()));
    const double hi = o.hi.value_or(*std::max_element(params.begin(), params.end()));
    const gpm::SweepResult sweep = gpm::c2_sweep(ts, lo, hi, o.samples, g.threads);

    if (g.want_csv()) gpm::io::write_text(g.path("sweep_c2.csv"), gpm::report::sweep_csv(sweep));
    if (g.want_json()) {
        json doc = gpm::report::document("sweep-c2");
        doc["n"] = ts.n();
        doc["p"] = ts.p();
        const json body = gpm::report::to_json(sweep);
        for (auto it = body.begin(); it != body.end(); ++it) doc[it.key()] = it.value();
        doc["inputs"] = inputs_json(nodes);
        write_json(g, "sweep_c2.json", doc);
    }

    if (!sweep.c1.ok) {
        std::cerr << "gpm: C1 failed against reference " << sweep.reference_index << "; all " << o.samples
                  << " samples invalid\n";
        return kC1;
    }
    const auto intervals = sweep.unstable_intervals();
    std::string text;
    for (const auto& [a, b] : intervals) text += " [" + fmt(a) + ", " + fmt(b) + "]";
    say(g, "sweep-c2: " + std::to_string(o.samples) + " samples over [" + fmt(lo) + ", " + fmt(hi) +
               "], step " + fmt(sweep.step()) + (intervals.empty() ? ", all stable" : ", unstable:" + text));
    return intervals.empty() ? kOk : kC2;
}

// ---------------------------------------------------------------- check-c3

struct C3Options {
    InputOptions in;
    std::vector<Eigen::Index> modes;
    std::optional<std::size_t> reference;
    std::optional<double> target;
    double threshold = gpm::kDefaultC3Threshold;
    std::string table;
    std::optional<double> epsilon;
};

gpm::DistanceTable read_table_csv(const fs::path& path) {
    const std::string text = gpm::io::detail::read_all(path);
    gpm::DistanceTable t;
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    auto split = [](std::string_view line) {
        std::vector<std::string_view> cells;
        std::size_t c = 0;
        while (true) {
            const std::size_t comma = line.find(',', c);
            cells.push_back(line.substr(c, comma == std::string_view::npos ? line.npos : comma - c));
            if (comma == std::string_view::npos) break;
            c = comma + 1;
        }
        return cells;
    };
    bool header = true;
    while (pos < text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string_view line(text.data() + pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;
        const auto cells = split(line);
        const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
        try {
            if (header) {
                for (std::size_t k = 1; k < cells.size(); ++k) {
                    t.modes.push_back(static_cast<Eigen::Index>(gpm::io::parse_double(cells[k])));
                }
                header = false;
                continue;
            }
            if (cells.size() != t.modes.size() + 1) {
                throw gpm::DataError("expected " + std::to_string(t.modes.size() + 1) + " cells, found " +
                                     std::to_string(cells.size()));
            }
            std::vector<double> row;
            for (std::size_t k = 1; k < cells.size(); ++k) row.push_back(gpm::io::parse_double(cells[k]));
            rows.push_back(std::move(row));
        } catch (const gpm::DataError& e) {
            throw gpm::DataError(where + e.what());
        }
    }
    if (rows.size() != t.modes.size()) {
        throw gpm::DataError(path.string() + ": table is not square (" + std::to_string(rows.size()) + " rows, " +
                             std::to_string(t.modes.size()) + " modes)");
    }
    const auto k = static_cast<Eigen::Index>(rows.size());
    t.values.resize(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) t.values(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    return t;
}

int run_check_c3(const Global& g, C3Options o) {
    json doc = gpm::report::document("check-c3");
    gpm::C3Record rec;
    std::optional<gpm::C1Record> c1;
    std::optional<gpm::C2Record> worst_c2;
    json per_mode = json::array();

    if (o.epsilon) {
        rec = gpm::check_c3_epsilon(*o.epsilon, o.threshold);
        doc["source"] = "epsilon";
    } else if (!o.table.empty()) {
        const gpm::DistanceTable t = read_table_csv(o.table);
        if (t.modes.size() < 2) throw gpm::ParameterError("check-c3 needs at least 2 modes, table has " +
                                                          std::to_string(t.modes.size()));
        rec = gpm::check_c3(t, o.threshold);
        doc["source"] = "table";
    } else {
        if (o.modes.size() < 2) {
            throw gpm::ParameterError("check-c3 needs at least 2 modes in --modes, got " +
                                      std::to_string(o.modes.size()));
        }
        require_modes(o.modes);
        if (!o.target) throw gpm::ParameterError("check-c3 needs --target");
        const std::vector<Node> nodes = load_nodes(o.in);
        auto by_mode = subspaces(g, nodes, o.modes);
        const std::vector<double> params = node_params(nodes);
        std::vector<std::pair<Eigen::Index, gpm::GrassmannPoint>> interpolants;
        for (std::size_t m = 0; m < o.modes.size(); ++m) {
            const gpm::TrainingSet ts(params, std::move(by_mode[m]), o.reference);
            const gpm::InterpolationResult r = gpm::interpolate(ts, *o.target);
            per_mode.push_back({{"mode", o.modes[m]},
                                {"reference_index", r.reference_index},
                                {"c1_ok", r.c1_ok},
                                {"c2_ok", r.c2_ok},
                                {"theta_max", gpm::report::number(r.theta_max)}});
            if (!r.c1_ok) {
                if (!c1 || c1->ok) c1 = r.c1;
                continue;
            }
            if (!worst_c2 || r.theta_max > worst_c2->theta_max) worst_c2 = gpm::C2Record{r.c2_ok, r.theta_max};
            if (!r.c2_ok) continue;
            interpolants.emplace_back(o.modes[m], *r.frame);
            if (!c1) c1 = r.c1;
        }
        doc["source"] = "interpolation";
        doc["target"] = gpm::report::number(*o.target);
        doc["per_mode"] = per_mode;
        doc["inputs"] = inputs_json(nodes);
        const bool gates_ok = per_mode.size() == interpolants.size();
        if (gates_ok) {
            rec = gpm::check_c3(gpm::c3_distance_table(interpolants, g.threads), o.threshold);
        }
        if (!gates_ok) {
            gpm::StabilityReport stab;
            stab.c1 = c1.value_or(gpm::C1Record{});
            stab.c2 = worst_c2;
            doc["stability"] = gpm::report::to_json(stab);
            if (g.want_json()) write_json(g, "check_c3.json", doc);
            if (!stab.c1.ok) {
                std::cerr << "gpm: C1 failed for at least one mode; C3 not evaluated\n";
                return kC1;
            }
            std::cerr << "gpm: C2 failed for at least one mode; C3 not evaluated\n";
            return kC2;
        }
    }

    gpm::StabilityReport stab;
    if (c1) stab.c1 = *c1;
    stab.c2 = worst_c2;
    stab.c3 = rec;
    doc["stability"] = gpm::report::to_json(stab);
    if (!o.epsilon && g.want_csv()) gpm::io::write_text(g.path("c3_table.csv"), gpm::report::table_csv(rec.table));
    if (g.want_json()) write_json(g, "check_c3.json", doc);
    if (!rec.ok) {
        std::cerr << "gpm: C3 failed: epsilon = " << fmt(rec.epsilon) << " >= T_V = " << fmt(rec.threshold) << '\n';
        return kC3;
    }
    say(g, "check-c3: epsilon = " + fmt(rec.epsilon) + " < T_V = " + fmt(rec.threshold));
    return kOk;
}

// ---------------------------------------------------------------- distance

struct DistanceOptions {
    std::string a;
    std::string b;
    std::optional<Eigen::Index> mode;
};

gpm::GrassmannPoint load_subspace(const std::string& path, std::optional<Eigen::Index> mode) {
    gpm::io::MatrixFile f = gpm::io::read_matrix_file(path);
    if (f.kind == gpm::io::MatrixKind::frame) {
        if (mode && *mode > f.data.cols()) {
            throw gpm::ParameterError(path + ": frame has p = " + std::to_string(f.data.cols()) + " < mode " +
                                      std::to_string(*mode));
        }
        return gpm::GrassmannPoint(mode ? Matrix(f.data.leftCols(*mode)) : f.data);
    }
    if (!mode) throw gpm::ParameterError(path + ": --mode is required for snapshot inputs");
    return gpm::compute_pod(gpm::SnapshotMatrix(std::move(f.data), f.param.value_or(0.0)), *mode).basis;
}

int run_distance(const Global& g, const DistanceOptions& o) {
    const gpm::GrassmannPoint a = load_subspace(o.a, o.mode);
    const gpm::GrassmannPoint b = load_subspace(o.b, o.mode);
    const gpm::PrincipalAngles pa = gpm::principal_angles(a, b);
    const bool same_p = a.p() == b.p();

    json doc = gpm::report::document("distance");
    doc["n"] = a.n();
    doc["p_a"] = a.p();
    doc["p_b"] = b.p();
    json angles = json::array();
    for (double t : pa.angles) angles.push_back(gpm::report::number(t));
    doc["principal_angles"] = angles;
    doc["theta_max"] = gpm::report::number(pa.largest());
    doc["geometric_distance"] = gpm::report::number(gpm::geometric_distance(a, b));
    doc["riemannian_distance"] = same_p ? gpm::report::number(gpm::riemannian_distance(a, b)) : json(nullptr);
    doc["included"] = gpm::is_included(a, b);
    doc["diameter"] = same_p ? gpm::report::number(gpm::diameter(a.p(), a.n())) : json(nullptr);
    if (g.want_json()) write_json(g, "distance.json", doc);
    if (g.want_csv()) {
        std::string csv = "index,theta\n";
        for (std::size_t i = 0; i < pa.angles.size(); ++i) csv += std::to_string(i + 1) + "," + fmt(pa.angles[i]) + "\n";
        gpm::io::write_text(g.path("distance.csv"), csv);
    }
    say(g, "distance: geometric " + fmt(gpm::geometric_distance(a, b)) +
               (same_p ? ", riemannian " + fmt(gpm::riemannian_distance(a, b)) : std::string()));
    return kOk;
}

// ---------------------------------------------------------------- metrics

struct MetricsOptions {
    std::string reference;
    std::string approx;
    std::string basis;
};

int run_metrics(const Global& g, const MetricsOptions& o) {
    if (o.approx.empty() == o.basis.empty()) {
        throw gpm::ParameterError("metrics needs exactly one of --approx or --basis");
    }
    const gpm::SnapshotMatrix ref = gpm::io::read_snapshot(o.reference);
    Matrix approx;
    if (!o.approx.empty()) {
        approx = gpm::io::read_matrix_file(o.approx).data;
    } else {
        approx = gpm::reduced_model(ref, gpm::io::read_frame(o.basis));
    }
    const gpm::ErrorSeries e = gpm::error_series(approx, ref.data());

    if (g.want_csv()) gpm::io::write_text(g.path("metrics_l2.csv"), gpm::report::l2_series_csv(e.per_snapshot));
    if (g.want_json()) {
        json doc = gpm::report::document("metrics");
        doc["reference"] = fs::path(o.reference).filename().string();
        doc["approx"] = o.approx.empty() ? json(nullptr) : json(fs::path(o.approx).filename().string());
        doc["basis"] = o.basis.empty() ? json(nullptr) : json(fs::path(o.basis).filename().string());
        doc["frobenius"] = gpm::report::number(e.frobenius);
        double worst = 0.0;
        double sum = 0.0;
        json series = json::array();
        for (double x : e.per_snapshot) {
            worst = std::max(worst, x);
            sum += x;
            series.push_back(gpm::report::number(x));
        }
        doc["l2_max"] = gpm::report::number(worst);
        doc["l2_mean"] = gpm::report::number(sum / static_cast<double>(e.per_snapshot.size()));
        doc["l2_series"] = series;
        write_json(g, "metrics.json", doc);
    }
    say(g, "metrics: e_F = " + fmt(e.frobenius));
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"POD-basis interpolation on Grassmann manifolds"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "read options from an INI/TOML file");

    Global g;
    app.add_option("--out", g.out, "output directory")->capture_default_str();
    app.add_option("--seed", g.seed, "random seed (synth)")->capture_default_str();
    app.add_flag("-q,--quiet", g.quiet, "suppress progress and warnings");
    app.add_option("--report", g.report, "report formats to write")
        ->check(CLI::IsMember({"json", "csv", "both"}))
        ->capture_default_str();

    SynthOptions synth;
    auto* c_synth = app.add_subcommand("synth", "generate a synthetic snapshot family");
    c_synth->add_option("--kind", synth.kind, "rotation | crossing | nested | non_nested")->capture_default_str();
    c_synth->add_option("-n,--n", synth.n, "spatial dimension")->required();
    c_synth->add_option("--nt", synth.n_t, "time steps per snapshot")->required();
    c_synth->add_option("--mode-count", synth.mode_count, "designed modes P")->capture_default_str();
    c_synth->add_option("--rate", synth.rate, "rotation rate (rad per unit parameter)")->capture_default_str();
    c_synth->add_option("--params", synth.params, "parameter values")->delimiter(',')->required();
    c_synth->add_option("--center", synth.center, "parameter of zero rotation")->capture_default_str();
    c_synth->add_option("--curvature", synth.curvature, "quadratic angle term (crossing)")->capture_default_str();
    c_synth->add_flag("--csv-data", synth.csv_data, "also write snapshots as CSV");

    InputOptions pod_in;
    Eigen::Index pod_mode = 0;
    auto* c_pod = app.add_subcommand("pod", "POD bases and spectra");
    add_input_options(c_pod, pod_in);
    c_pod->add_option("-p,--mode", pod_mode, "POD mode count")->required();

    InterpolateOptions interp;
    auto* c_interp = app.add_subcommand("interpolate", "interpolated subspace at a target parameter");
    add_input_options(c_interp, interp.in);
    c_interp->add_option("-p,--mode", interp.mode, "mode count (default: frame width)");
    c_interp->add_option("--reference", interp.reference, "reference node index (default: nearest)");
    c_interp->add_option("-t,--target", interp.target, "target parameter")->required();

    SweepOptions sweep;
    auto* c_sweep = app.add_subcommand("sweep-c2", "theta_1 over a parameter grid");
    add_input_options(c_sweep, sweep.in);
    c_sweep->add_option("-p,--mode", sweep.mode, "mode count (default: frame width)");
    c_sweep->add_option("--reference", sweep.reference, "reference node index (default: nearest midpoint)");
    c_sweep->add_option("--lo", sweep.lo, "grid start (default: smallest node)");
    c_sweep->add_option("--hi", sweep.hi, "grid end (default: largest node)");
    c_sweep->add_option("--samples", sweep.samples, "grid points")->capture_default_str();

    C3Options c3;
    auto* c_c3 = app.add_subcommand("check-c3", "mode-inclusion defect");
    add_input_options(c_c3, c3.in);
    c_c3->add_option("--modes", c3.modes, "ascending mode counts")->delimiter(',');
    c_c3->add_option("--reference", c3.reference, "reference node index (default: nearest)");
    c_c3->add_option("-t,--target", c3.target, "target parameter");
    c_c3->add_option("--threshold", c3.threshold, "T_V")->capture_default_str();
    c_c3->add_option("--table", c3.table, "evaluate a precomputed distance table CSV");
    c_c3->add_option("--epsilon", c3.epsilon, "evaluate a known epsilon");

    DistanceOptions dist;
    auto* c_dist = app.add_subcommand("distance", "principal angles and distances");
    c_dist->add_option("-a", dist.a, "first subspace file")->required();
    c_dist->add_option("-b", dist.b, "second subspace file")->required();
    c_dist->add_option("-p,--mode", dist.mode, "mode count for snapshot inputs");

    MetricsOptions met;
    auto* c_met = app.add_subcommand("metrics", "reconstruction errors");
    c_met->add_option("--reference", met.reference, "reference snapshot file")->required();
    c_met->add_option("--approx", met.approx, "approximate snapshot file");
    c_met->add_option("--basis", met.basis, "basis frame; approx = Phi Phi^T S");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kParameter;
    }
    g.threads = gpm::thread_count_from_env();

    try {
        fs::create_directories(g.out);
        if (*c_synth) return run_synth(g, synth);
        if (*c_pod) return run_pod(g, pod_in, pod_mode);
        if (*c_interp) return run_interpolate(g, interp);
        if (*c_sweep) return run_sweep(g, sweep);
        if (*c_c3) return run_check_c3(g, c3);
        if (*c_dist) return run_distance(g, dist);
        if (*c_met) return run_metrics(g, met);
    } catch (const gpm::ParameterError& e) {
        std::cerr << "gpm: parameter error: " << e.what() << '\n';
        return kParameter;
    } catch (const gpm::DegenerateRankError& e) {
        std::cerr << "gpm: parameter error: " << e.what() << '\n';
        return kParameter;
    } catch (const gpm::DataError& e) {
        std::cerr << "gpm: data error: " << e.what() << '\n';
        return kData;
    } catch (const gpm::LogDomainError& e) {
        std::cerr << "gpm: C1 failed: " << e.what() << '\n';
        return kC1;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "gpm: I/O error: " << e.what() << '\n';
        return kData;
    } catch (const gpm::Error& e) {
        std::cerr << "gpm: error: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::exception& e) {
        std::cerr << "gpm: error: " << e.what() << '\n';
        return kNumerical;
    }
    return kParameter;
}
