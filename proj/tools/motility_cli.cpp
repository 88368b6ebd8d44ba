// Command-line front-end for the motility library: compute velocity
// nonlinearity tables, scan for traveling waves, run curve simulations, and
// sweep the actin relaxation time.  Every invocation that starts a run writes
// exactly one manifest.json next to its outputs.
//
// Exit codes: 0 success, 2 usage error, 3 numerical failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "motility/csv.hpp"
#include "motility/errors.hpp"
#include "motility/geometry.hpp"
#include "motility/nonlinearity.hpp"
#include "motility/potential.hpp"
#include "motility/simulator.hpp"
#include "motility/travelwave.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace motility;

namespace {

constexpr const char* kToolName = "motility";
constexpr const char* kToolVersion = "1.0.0";

// ---------------------------------------------------------------------------
// manifest plumbing

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct Manifest {
    std::string command;
    std::vector<std::string> argv;
    std::string created = utc_now();
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    fs::path dir;
    json config = json::object();
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    json extra = json::object();

    void add_output(const fs::path& p) { outputs.push_back(p.filename().string()); }

    void write(int exit_status) const {
        const double dur =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        json j;
        j["tool"] = kToolName;
        j["version"] = kToolVersion;
        j["command"] = command;
        j["argv"] = argv;
        j["created_utc"] = created;
        j["duration_seconds"] = dur;
        j["exit_status"] = exit_status;
        j["config"] = config;
        j["inputs"] = inputs;
        j["outputs"] = outputs;
        j["extra"] = extra;
        std::ofstream out(dir / "manifest.json");
        out << j.dump(2) << '\n';
    }
};

// Output directory: relative paths live under $MOTILITY_OUTPUT_ROOT when set.
fs::path resolve_out_dir(const std::string& out) {
    fs::path p = out;
    if (p.is_relative()) {
        if (const char* root = std::getenv("MOTILITY_OUTPUT_ROOT")) {
            if (*root) p = fs::path(root) / p;
        }
    }
    fs::create_directories(p);
    return p;
}

// ---------------------------------------------------------------------------
// JSON config defaults (CLI flags override).  A manifest written by this tool
// is accepted too: its "config" object is used.

json load_config_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw CLI::ValidationError("--config", std::string("parse failure: ") + e.what());
    }
    if (j.is_object() && j.contains("tool") && j.contains("config")) return j["config"];
    if (!j.is_object()) throw CLI::ValidationError("--config", "top level must be an object");
    return j;
}

// Pull --config out of argv before CLI11 sees it, so its values become the
// defaults the remaining flags override.
json extract_config(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--config" && i + 1 < argc) return load_config_json(argv[i + 1]);
        if (a.rfind("--config=", 0) == 0) return load_config_json(a.substr(9));
    }
    return json::object();
}

template <class T>
void jget(const json& j, const char* key, T& slot) {
    if (j.contains(key)) slot = j.at(key).get<T>();
}

void jget_pair(const json& j, const char* key, std::vector<double>& slot) {
    if (j.contains(key)) {
        slot = j.at(key).get<std::vector<double>>();
    }
}

// ---------------------------------------------------------------------------
// shared option blocks

struct PhiSourceOpts {
    std::string well;            // "allen-cahn" or "asym150"
    double asym_a = -1.0;        // --asym <a>, enabled when >= 0
    bool toy = false;
    std::string table;           // --phi-table path
    double response_scale = 1.0; // applied to --phi-table values
    double beta = 100.0;
    double v_max = 10.0;
    double dv = 0.01;
    double half_width = 20.0;
    int intervals = 2000;
};

void add_phi_source_options(CLI::App* cmd, PhiSourceOpts& o, bool allow_table) {
    cmd->add_option("--well", o.well, "named potential well: allen-cahn or asym150");
    cmd->add_option("--asym", o.asym_a, "asymmetric well with strength a");
    cmd->add_flag("--toy", o.toy, "closed-form nonlinearity -beta (1 - tanh V) exp(-V^2)");
    if (allow_table) {
        cmd->add_option("--phi-table", o.table, "CSV table (v, phi, phi_prime) to interpolate");
        cmd->add_option("--response-scale", o.response_scale,
                        "velocity-response scale for --phi-table (profile-backed tables "
                        "record theirs in the phi manifest)");
    }
    cmd->add_option("--beta", o.beta, "forcing strength");
    cmd->add_option("--v-max", o.v_max, "half-range of the velocity table");
    cmd->add_option("--dv", o.dv, "velocity table spacing");
    cmd->add_option("--half-width", o.half_width, "profile half-width L");
    cmd->add_option("--intervals", o.intervals, "profile grid intervals M (even)");
}

void phi_defaults_from_json(const json& j, PhiSourceOpts& o) {
    jget(j, "well", o.well);
    jget(j, "asym", o.asym_a);
    jget(j, "toy", o.toy);
    jget(j, "phi_table", o.table);
    jget(j, "response_scale", o.response_scale);
    jget(j, "beta", o.beta);
    jget(j, "v_max", o.v_max);
    jget(j, "dv", o.dv);
    jget(j, "half_width", o.half_width);
    jget(j, "intervals", o.intervals);
}

int phi_source_count(const PhiSourceOpts& o) {
    return (!o.well.empty() ? 1 : 0) + (o.asym_a >= 0.0 ? 1 : 0) + (o.toy ? 1 : 0) +
           (!o.table.empty() ? 1 : 0);
}

PotentialWell make_well(const PhiSourceOpts& o) {
    if (o.asym_a >= 0.0) return PotentialWell::asymmetric(o.asym_a);
    if (o.well == "allen-cahn") return PotentialWell::allen_cahn();
    if (o.well == "asym150") return PotentialWell::asymmetric(150.0);
    throw std::invalid_argument("unknown well '" + o.well +
                                "' (expected allen-cahn or asym150)");
}

struct PhiBundle {
    PhiFunction phi = PhiFunction::toy(0.0, 1.0, 0.25);
    std::optional<StandingWaveProfile> profile;
};

PhiBundle build_phi(const PhiSourceOpts& o) {
    PhiBundle b;
    if (!o.table.empty()) {
        b.phi = PhiFunction::from_csv(o.table, o.response_scale);
        return b;
    }
    if (o.toy) {
        b.phi = PhiFunction::toy(o.beta, o.v_max, o.dv);
        return b;
    }
    b.profile = solve_standing_wave(make_well(o), o.half_width, o.intervals);
    b.phi = PhiFunction::bvp_backed(*b.profile, o.beta, o.v_max, o.dv);
    return b;
}

json phi_config_json(const PhiSourceOpts& o) {
    json j;
    if (!o.well.empty()) j["well"] = o.well;
    if (o.asym_a >= 0.0) j["asym"] = o.asym_a;
    j["toy"] = o.toy;
    if (!o.table.empty()) {
        j["phi_table"] = o.table;
        j["response_scale"] = o.response_scale;
    }
    j["beta"] = o.beta;
    j["v_max"] = o.v_max;
    j["dv"] = o.dv;
    j["half_width"] = o.half_width;
    j["intervals"] = o.intervals;
    return j;
}

struct SimOpts {
    SimConfig cfg;
    std::string well = "asym150";
    double asym_a = -1.0;
    double circle = -1.0;
    std::vector<double> ellipse;     // rx ry
    std::string curve_file;
    std::string tw_profile;
    double tw_speed = std::nan("");  // set => init actin at this wave speed
};

void add_sim_options(CLI::App* cmd, SimOpts& o) {
    cmd->add_option("--well", o.well, "potential well for the actin kernel");
    cmd->add_option("--asym", o.asym_a, "asymmetric well with strength a");
    cmd->add_option("--circle", o.circle, "initial curve: circle of this radius");
    cmd->add_option("--ellipse", o.ellipse, "initial curve: ellipse semi-axes rx ry")
        ->expected(2);
    cmd->add_option("--curve", o.curve_file, "initial curve: CSV file with x,y columns");
    cmd->add_option("--tw-profile", o.tw_profile,
                    "initial curve: traveling-wave profile CSV from the tw command");
    cmd->add_option("--tw-speed", o.tw_speed,
                    "wave speed used to seed the actin columns (required with --tw-profile)");
    cmd->add_option("--epsilon", o.cfg.epsilon, "actin relaxation time");
    cmd->add_option("--beta", o.cfg.beta, "actin forcing strength");
    cmd->add_option("--nodes", o.cfg.nodes, "curve nodes N");
    cmd->add_option("--intervals", o.cfg.intervals, "actin grid intervals M (even)");
    cmd->add_option("--half-width", o.cfg.half_width, "actin grid half-width L");
    cmd->add_option("--dt", o.cfg.dt, "time step");
    cmd->add_option("--t-end", o.cfg.t_end, "final time");
    cmd->add_option("--area-tol", o.cfg.area_tol, "relative area tolerance per step");
    cmd->add_option("--max-area-iters", o.cfg.max_area_iters, "area correction iteration cap");
    cmd->add_option("--area-relax", o.cfg.area_relax, "area correction damping in (0,1]");
    cmd->add_option("--resample-every", o.cfg.resample_every,
                    "steps between equal-arclength resamples (0 = never)");
    cmd->add_option("--output-every", o.cfg.output_every, "steps between diagnostics rows");
    cmd->add_option("--snapshot-every", o.cfg.snapshot_every,
                    "steps between curve snapshots (0 = endpoints only)");
    cmd->add_option("--trace-node", o.cfg.trace_node, "node index for the velocity trace");
    cmd->add_flag("--per-node", o.cfg.per_node_diagnostics, "record per-node diagnostics");
    cmd->add_option("--jump-threshold", o.cfg.jump_threshold,
                    "velocity jump flag threshold for traces");
}

void sim_defaults_from_json(const json& j, SimOpts& o) {
    jget(j, "well", o.well);
    jget(j, "asym", o.asym_a);
    jget(j, "circle", o.circle);
    jget_pair(j, "ellipse", o.ellipse);
    jget(j, "curve", o.curve_file);
    jget(j, "tw_profile", o.tw_profile);
    jget(j, "tw_speed", o.tw_speed);
    jget(j, "epsilon", o.cfg.epsilon);
    jget(j, "beta", o.cfg.beta);
    jget(j, "nodes", o.cfg.nodes);
    jget(j, "intervals", o.cfg.intervals);
    jget(j, "half_width", o.cfg.half_width);
    jget(j, "dt", o.cfg.dt);
    jget(j, "t_end", o.cfg.t_end);
    jget(j, "area_tol", o.cfg.area_tol);
    jget(j, "max_area_iters", o.cfg.max_area_iters);
    jget(j, "area_relax", o.cfg.area_relax);
    jget(j, "resample_every", o.cfg.resample_every);
    jget(j, "output_every", o.cfg.output_every);
    jget(j, "snapshot_every", o.cfg.snapshot_every);
    jget(j, "trace_node", o.cfg.trace_node);
    jget(j, "per_node_diagnostics", o.cfg.per_node_diagnostics);
    jget(j, "jump_threshold", o.cfg.jump_threshold);
}

json sim_config_json(const SimOpts& o) {
    json j;
    j["well"] = o.asym_a >= 0.0 ? ("asym(" + format_double(o.asym_a) + ")") : o.well;
    if (o.circle > 0.0) j["circle"] = o.circle;
    if (o.ellipse.size() == 2) j["ellipse"] = o.ellipse;
    if (!o.curve_file.empty()) j["curve"] = o.curve_file;
    if (!o.tw_profile.empty()) j["tw_profile"] = o.tw_profile;
    if (!std::isnan(o.tw_speed)) j["tw_speed"] = o.tw_speed;
    j["epsilon"] = o.cfg.epsilon;
    j["beta"] = o.cfg.beta;
    j["nodes"] = o.cfg.nodes;
    j["intervals"] = o.cfg.intervals;
    j["half_width"] = o.cfg.half_width;
    j["dt"] = o.cfg.dt;
    j["t_end"] = o.cfg.t_end;
    j["area_tol"] = o.cfg.area_tol;
    j["max_area_iters"] = o.cfg.max_area_iters;
    j["area_relax"] = o.cfg.area_relax;
    j["resample_every"] = o.cfg.resample_every;
    j["output_every"] = o.cfg.output_every;
    j["snapshot_every"] = o.cfg.snapshot_every;
    j["trace_node"] = o.cfg.trace_node;
    j["per_node_diagnostics"] = o.cfg.per_node_diagnostics;
    j["jump_threshold"] = o.cfg.jump_threshold;
    return j;
}

PotentialWell make_sim_well(const SimOpts& o) {
    if (o.asym_a >= 0.0) return PotentialWell::asymmetric(o.asym_a);
    if (o.well == "allen-cahn") return PotentialWell::allen_cahn();
    if (o.well == "asym150") return PotentialWell::asymmetric(150.0);
    throw std::invalid_argument("unknown well '" + o.well +
                                "' (expected allen-cahn or asym150)");
}

DiscreteCurve make_initial_curve(const SimOpts& o, std::vector<std::string>& inputs) {
    const int sources = (o.circle > 0.0 ? 1 : 0) + (o.ellipse.size() == 2 ? 1 : 0) +
                        (!o.curve_file.empty() ? 1 : 0) + (!o.tw_profile.empty() ? 1 : 0);
    if (sources != 1) {
        throw std::invalid_argument(
            "exactly one of --circle, --ellipse, --curve, --tw-profile is required");
    }
    if (o.circle > 0.0) return DiscreteCurve::circle(o.circle, o.cfg.nodes);
    if (o.ellipse.size() == 2) {
        return DiscreteCurve::ellipse(o.ellipse[0], o.ellipse[1], o.cfg.nodes);
    }
    const std::string& path = o.curve_file.empty() ? o.tw_profile : o.curve_file;
    if (!o.tw_profile.empty() && std::isnan(o.tw_speed)) {
        throw std::invalid_argument("--tw-profile requires --tw-speed (see the tw roots list)");
    }
    inputs.push_back(fs::absolute(path).string());
    return DiscreteCurve(read_curve_csv(path));
}

// ---------------------------------------------------------------------------
// phi subcommand

struct PhiCmd {
    PhiSourceOpts src;
    std::string out = "phi_out";
    bool beta_crit = false;
    double beta_hi = 1000.0;
    double bracket_tol = 1e-3;
};

int run_phi(const PhiCmd& c, const std::vector<std::string>& argv) {
    if (phi_source_count(c.src) != 1) {
        std::cerr << "phi: exactly one of --well, --asym, --toy is required\n";
        return 2;
    }
    if (!c.src.table.empty()) {
        std::cerr << "phi: --phi-table is only an input for tw, not a source here\n";
        return 2;
    }

    Manifest man;
    man.command = "phi";
    man.argv = argv;
    man.dir = resolve_out_dir(c.out);
    man.config = phi_config_json(c.src);
    man.config["beta_crit"] = c.beta_crit;
    man.config["beta_hi"] = c.beta_hi;

    int status = 0;
    try {
        const PhiBundle b = build_phi(c.src);
        const fs::path phi_path = man.dir / "phi.csv";
        b.phi.write_csv(phi_path);
        man.add_output(phi_path);
        if (b.profile) {
            const fs::path prof_path = man.dir / "profile.csv";
            write_profile_csv(*b.profile, prof_path);
            man.add_output(prof_path);
            man.extra["c0"] = b.profile->c0;
        }
        man.extra["response_scale"] = b.phi.response_scale();
        man.extra["phi_at_zero"] = b.phi.value(0.0);
        man.extra["sup_abs"] = b.phi.sup_abs();
        man.extra["max_abs_derivative"] = b.phi.max_abs_derivative(c.src.v_max);
        std::cout << "phi table: " << phi_path.string() << " ("
                  << b.phi.table().v.size() << " rows)\n";

        if (c.beta_crit) {
            double bc;
            if (c.src.toy) {
                bc = estimate_beta_crit_toy(c.src.v_max, c.beta_hi, c.bracket_tol);
            } else {
                bc = estimate_beta_crit_bvp(*b.profile, c.src.v_max, c.beta_hi, c.bracket_tol);
            }
            man.extra["beta_crit"] = bc;
            std::cout << "beta_crit estimate: " << format_double(bc) << "\n";
        }
    } catch (const NumericsError& e) {
        std::cerr << "phi: numerical failure: " << e.what() << "\n";
        man.extra["error"] = e.what();
        status = 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "phi: " << e.what() << "\n";
        man.extra["error"] = e.what();
        status = 2;
    }
    man.write(status);
    return status;
}

// ---------------------------------------------------------------------------
// tw subcommand

struct TwCmd {
    PhiSourceOpts src;
    std::string out = "tw_out";
    std::vector<double> v_range{0.1, 3.0};
    std::vector<double> l_range{0.0, 12.0};
    int nv = 41;
    int nl = 41;
    int profile_points = 256;
};

int run_tw(const TwCmd& c, const std::vector<std::string>& argv) {
    if (phi_source_count(c.src) != 1) {
        std::cerr << "tw: exactly one of --well, --asym, --toy, --phi-table is required\n";
        return 2;
    }
    if (c.v_range.size() != 2 || !(c.v_range[0] < c.v_range[1])) {
        std::cerr << "tw: --v-range needs lo < hi\n";
        return 2;
    }
    if (c.l_range.size() != 2 || !(c.l_range[0] < c.l_range[1])) {
        std::cerr << "tw: --l-range needs lo < hi\n";
        return 2;
    }
    if (c.nv < 8 || c.nl < 8) {
        std::cerr << "tw: grid needs --nv >= 8 and --nl >= 8\n";
        return 2;
    }

    Manifest man;
    man.command = "tw";
    man.argv = argv;
    man.dir = resolve_out_dir(c.out);
    man.config = phi_config_json(c.src);
    man.config["v_range"] = c.v_range;
    man.config["l_range"] = c.l_range;
    man.config["nv"] = c.nv;
    man.config["nl"] = c.nl;
    man.config["profile_points"] = c.profile_points;
    if (!c.src.table.empty()) man.inputs.push_back(fs::absolute(c.src.table).string());

    int status = 0;
    try {
        const PhiBundle b = build_phi(c.src);
        const TwSearchResult res =
            find_traveling_waves(b.phi, c.v_range[0], c.v_range[1], c.nv, c.l_range[0],
                                 c.l_range[1], c.nl, c.profile_points);

        const std::string land_hdr[] = {"v", "lambda", "i2"};
        std::vector<std::vector<double>> land_rows;
        land_rows.reserve(res.landscape.size());
        for (const auto& p : res.landscape) land_rows.push_back({p.v, p.lambda, p.i2});
        const fs::path land_path = man.dir / "landscape.csv";
        write_csv(land_path, land_hdr, land_rows);
        man.add_output(land_path);

        const std::string root_hdr[] = {"index",  "v",           "lambda", "closure_residual",
                                        "closure_gap", "length", "area"};
        std::vector<std::vector<double>> root_rows;
        json roots_json = json::array();
        for (std::size_t k = 0; k < res.roots.size(); ++k) {
            const TravelingWaveProfile& r = res.roots[k];
            const double len = polygon_length(r.points);
            const double area = std::abs(shoelace_signed(r.points));
            root_rows.push_back({static_cast<double>(k), r.velocity, r.lambda,
                                 r.closure_residual, r.closure_gap, len, area});
            const fs::path prof_path = man.dir / ("profile_" + std::to_string(k) + ".csv");
            write_curve_csv(r.points, prof_path);
            man.add_output(prof_path);
            roots_json.push_back({{"index", k},
                                  {"v", r.velocity},
                                  {"lambda", r.lambda},
                                  {"closure_residual", r.closure_residual},
                                  {"closure_gap", r.closure_gap},
                                  {"length", len},
                                  {"area", area},
                                  {"profile", prof_path.filename().string()}});
            std::cout << "root " << k << ": V = " << format_double(r.velocity)
                      << ", lambda = " << format_double(r.lambda)
                      << ", closure residual = " << format_double(r.closure_residual) << "\n";
        }
        const fs::path roots_path = man.dir / "roots.csv";
        write_csv(roots_path, root_hdr, root_rows);
        man.add_output(roots_path);
        man.extra["roots"] = roots_json;
        man.extra["root_count"] = res.roots.size();
        man.extra["bisection_tol"] = 1e-8;
        man.extra["response_scale"] = b.phi.response_scale();
        std::cout << "roots found: " << res.roots.size() << "\n";
    } catch (const NumericsError& e) {
        std::cerr << "tw: numerical failure: " << e.what() << "\n";
        man.extra["error"] = e.what();
        status = 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "tw: " << e.what() << "\n";
        man.extra["error"] = e.what();
        status = 2;
    }
    man.write(status);
    return status;
}

// ---------------------------------------------------------------------------
// simulate subcommand (the body is shared with sweep)

struct SimOutcome {
    int status = 0;
    std::string error;
    std::vector<DiagnosticsRecord> records;
    double diameter = 0.0;
    RegimeReport report;
};

SimOutcome simulate_into(const SimOpts& o, const fs::path& dir, Manifest& man) {
    SimOutcome out;
    StandingWaveProfile profile =
        solve_standing_wave(make_sim_well(o), o.cfg.half_width, o.cfg.intervals);
    DiscreteCurve start = make_initial_curve(o, man.inputs);
    std::optional<double> tw_speed;
    if (!std::isnan(o.tw_speed)) tw_speed = o.tw_speed;

    SimulationState state = init_state(start, profile, o.cfg, tw_speed);
    out.diameter = state.curve.diameter();
    Simulator sim(profile, o.cfg);
    man.extra["warnings"] = o.cfg.validate();

    const fs::path diag_path = dir / "diag.csv";
    std::ofstream diag(diag_path);
    diag << "t,q,area,lambda,cx,cy,iters,trace_v,trace_phi,self_int\n";
    man.add_output(diag_path);

    RunCallbacks cb;
    cb.on_record = [&](const DiagnosticsRecord& r) {
        diag << format_double(r.t) << ',' << format_double(r.q) << ','
             << format_double(r.area) << ',' << format_double(r.lambda) << ','
             << format_double(r.centroid.x) << ',' << format_double(r.centroid.y) << ','
             << r.area_iters << ',' << format_double(r.trace_v) << ','
             << format_double(r.trace_phi) << ',' << (r.self_intersecting ? 1 : 0) << '\n';
        diag.flush();
    };
    cb.on_snapshot = [&](long step, const SimulationState& st) {
        const fs::path snap = dir / ("curve_" + std::to_string(step) + ".csv");
        write_curve_csv(st.curve.points(), snap);
        man.add_output(snap);
    };

    try {
        out.records = run(sim, state, cb);
    } catch (const NumericsError& e) {
        out.status = 3;
        out.error = e.what();
        diag.flush();
        const fs::path dump = dir / "curve_abort.csv";
        write_curve_csv(state.curve.points(), dump);
        man.add_output(dump);
        man.extra["error"] = out.error;
        man.extra["abort_t"] = state.t;
        return out;
    }

    // Velocity trace of the tracked node, with jump flags between records.
    const fs::path trace_path = dir / ("trace_" + std::to_string(o.cfg.trace_node) + ".csv");
    {
        std::ofstream tr(trace_path);
        tr << "t,v,v_minus_phi,jump\n";
        double prev_v = 0.0;
        bool first = true;
        for (const auto& r : out.records) {
            const bool jump = !first && std::abs(r.trace_v - prev_v) > o.cfg.jump_threshold;
            tr << format_double(r.t) << ',' << format_double(r.trace_v) << ','
               << format_double(r.trace_v - r.trace_phi) << ',' << (jump ? 1 : 0) << '\n';
            prev_v = r.trace_v;
            first = false;
        }
    }
    man.add_output(trace_path);

    out.report = classify_regime(out.records, out.diameter);
    man.extra["regime"] = regime_name(out.report.regime);
    man.extra["net_displacement"] = out.report.net_displacement;
    man.extra["displacement_diameters"] = out.report.displacement_diameters;
    man.extra["q_mean"] = out.report.q_mean;
    man.extra["q_band"] = out.report.q_band;
    man.extra["q_amplitude"] = out.report.q_amplitude;
    man.extra["q_period"] = out.report.q_period;
    man.extra["autocorr_peak"] = out.report.autocorr_peak;
    man.extra["diameter"] = out.diameter;
    return out;
}

struct SimulateCmd {
    SimOpts opts;
    std::string out = "sim_out";
};

int run_simulate(const SimulateCmd& c, const std::vector<std::string>& argv) {
    Manifest man;
    man.command = "simulate";
    man.argv = argv;
    man.dir = resolve_out_dir(c.out);
    man.config = sim_config_json(c.opts);

    int status = 0;
    try {
        const SimOutcome out = simulate_into(c.opts, man.dir, man);
        status = out.status;
        if (status == 0) {
            std::cout << "regime: " << regime_name(out.report.regime)
                      << " (displacement " << format_double(out.report.displacement_diameters)
                      << " diameters, Q period " << format_double(out.report.q_period)
                      << ", Q amplitude " << format_double(out.report.q_amplitude) << ")\n";
        } else {
            std::cerr << "simulate: numerical failure: " << out.error << "\n";
        }
    } catch (const NumericsError& e) {
        std::cerr << "simulate: numerical failure: " << e.what() << "\n";
        man.extra["error"] = e.what();
        status = 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "simulate: " << e.what() << "\n";
        man.extra["error"] = e.what();
        status = 2;
    }
    man.write(status);
    return status;
}

// ---------------------------------------------------------------------------
// sweep subcommand

struct SweepCmd {
    SimOpts opts;
    std::string out = "sweep_out";
    std::vector<double> epsilons;
    int jobs = 1;
};

int run_sweep(const SweepCmd& c, const std::vector<std::string>& argv) {
    if (c.epsilons.empty()) {
        std::cerr << "sweep: --epsilons needs at least one value\n";
        return 2;
    }
    if (c.jobs < 1) {
        std::cerr << "sweep: --jobs must be >= 1\n";
        return 2;
    }

    Manifest man;
    man.command = "sweep";
    man.argv = argv;
    man.dir = resolve_out_dir(c.out);
    man.config = sim_config_json(c.opts);
    man.config["epsilons"] = c.epsilons;
    man.config["jobs"] = c.jobs;

    struct RunSlot {
        double eps = 0.0;
        fs::path dir;
        Manifest man;
        SimOutcome outcome;
    };
    std::vector<RunSlot> slots(c.epsilons.size());
    for (std::size_t k = 0; k < c.epsilons.size(); ++k) {
        slots[k].eps = c.epsilons[k];
        slots[k].dir = man.dir / ("eps_" + format_double(c.epsilons[k]));
        fs::create_directories(slots[k].dir);
    }

    const auto run_one = [&](RunSlot& slot) {
        SimOpts o = c.opts;
        o.cfg.epsilon = slot.eps;
        slot.man.command = "simulate";
        slot.man.argv = argv;
        slot.man.dir = slot.dir;
        slot.man.config = sim_config_json(o);
        try {
            slot.outcome = simulate_into(o, slot.dir, slot.man);
        } catch (const NumericsError& e) {
            slot.outcome.status = 3;
            slot.outcome.error = e.what();
            slot.man.extra["error"] = e.what();
        } catch (const std::invalid_argument& e) {
            slot.outcome.status = 2;
            slot.outcome.error = e.what();
            slot.man.extra["error"] = e.what();
        }
        slot.man.write(slot.outcome.status);
    };

    // Fixed-width worker pool over the runs; each owns its output directory.
    std::size_t next = 0;
    while (next < slots.size()) {
        const std::size_t batch = std::min<std::size_t>(c.jobs, slots.size() - next);
        std::vector<std::future<void>> futs;
        futs.reserve(batch);
        for (std::size_t b = 0; b < batch; ++b) {
            RunSlot& slot = slots[next + b];
            futs.push_back(std::async(std::launch::async, [&run_one, &slot] { run_one(slot); }));
        }
        for (auto& f : futs) f.get();
        next += batch;
    }

    // Combined Q(t) across the runs that succeeded (they share the cadence).
    std::vector<const RunSlot*> ok;
    for (const auto& s : slots) {
        if (s.outcome.status == 0 && !s.outcome.records.empty()) ok.push_back(&s);
    }
    if (!ok.empty()) {
        std::size_t n_rows = ok.front()->outcome.records.size();
        for (const auto* s : ok) n_rows = std::min(n_rows, s->outcome.records.size());
        std::vector<std::string> hdr{"t"};
        for (const auto* s : ok) hdr.push_back("q_eps_" + format_double(s->eps));
        std::vector<std::vector<double>> rows;
        rows.reserve(n_rows);
        for (std::size_t i = 0; i < n_rows; ++i) {
            std::vector<double> row{ok.front()->outcome.records[i].t};
            for (const auto* s : ok) row.push_back(s->outcome.records[i].q);
            rows.push_back(std::move(row));
        }
        const fs::path comb = man.dir / "q_combined.csv";
        write_csv(comb, hdr, rows);
        man.add_output(comb);
    }

    // Summary table; regime is a word, so this one is written by hand.
    const fs::path summary_path = man.dir / "summary.csv";
    {
        std::ofstream sum(summary_path);
        sum << "epsilon,regime,q_period,q_amplitude,net_displacement,"
               "displacement_diameters,exit_status\n";
        for (const auto& s : slots) {
            const RegimeReport& r = s.outcome.report;
            sum << format_double(s.eps) << ','
                << (s.outcome.status == 0 ? regime_name(r.regime) : "failed") << ','
                << format_double(r.q_period) << ',' << format_double(r.q_amplitude) << ','
                << format_double(r.net_displacement) << ','
                << format_double(r.displacement_diameters) << ',' << s.outcome.status << '\n';
        }
    }
    man.add_output(summary_path);

    json runs = json::array();
    int failures = 0;
    for (const auto& s : slots) {
        json r;
        r["epsilon"] = s.eps;
        r["dir"] = s.dir.filename().string();
        r["exit_status"] = s.outcome.status;
        if (s.outcome.status == 0) {
            r["regime"] = regime_name(s.outcome.report.regime);
            r["q_period"] = s.outcome.report.q_period;
            r["q_amplitude"] = s.outcome.report.q_amplitude;
            r["displacement_diameters"] = s.outcome.report.displacement_diameters;
        } else {
            r["error"] = s.outcome.error;
            ++failures;
        }
        runs.push_back(r);
        std::cout << "eps " << format_double(s.eps) << ": "
                  << (s.outcome.status == 0 ? regime_name(s.outcome.report.regime) : "failed")
                  << "\n";
    }
    man.extra["runs"] = runs;

    const int status = (failures == static_cast<int>(slots.size())) ? 3 : 0;
    man.write(status);
    return status;
}

}  // namespace

// ---------------------------------------------------------------------------

int main(int argc, char** argv) {
    CLI::App app{"curve motility pipeline: velocity nonlinearity tables, traveling-wave "
                 "search, and regularized curve evolution"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    json cfg_json;
    try {
        cfg_json = extract_config(argc, argv);
    } catch (const CLI::Error& e) {
        return app.exit(e) ? 2 : 2;
    }

    // The file is read by extract_config above (position independent); these
    // registrations only let the flag appear before or after the subcommand.
    std::string config_path;
    const auto add_config_opt = [&config_path](CLI::App* a) {
        a->add_option("--config", config_path,
                      "JSON file with option defaults (flags given here override it; a "
                      "manifest.json from an earlier run is accepted)");
    };
    add_config_opt(&app);

    PhiCmd phi_cmd;
    phi_defaults_from_json(cfg_json, phi_cmd.src);
    jget(cfg_json, "out", phi_cmd.out);
    jget(cfg_json, "beta_hi", phi_cmd.beta_hi);
    CLI::App* phi_app = app.add_subcommand("phi", "compute a velocity nonlinearity table");
    add_phi_source_options(phi_app, phi_cmd.src, /*allow_table=*/false);
    phi_app->add_option("--out", phi_cmd.out, "output directory");
    add_config_opt(phi_app);
    phi_app->add_flag("--beta-crit", phi_cmd.beta_crit,
                      "also bisect for the critical forcing strength");
    phi_app->add_option("--beta-hi", phi_cmd.beta_hi, "upper bracket for --beta-crit");
    phi_app->add_option("--bracket-tol", phi_cmd.bracket_tol, "bisection bracket width");

    TwCmd tw_cmd;
    phi_defaults_from_json(cfg_json, tw_cmd.src);
    jget(cfg_json, "out", tw_cmd.out);
    jget_pair(cfg_json, "v_range", tw_cmd.v_range);
    jget_pair(cfg_json, "l_range", tw_cmd.l_range);
    jget(cfg_json, "nv", tw_cmd.nv);
    jget(cfg_json, "nl", tw_cmd.nl);
    jget(cfg_json, "profile_points", tw_cmd.profile_points);
    CLI::App* tw_app = app.add_subcommand("tw", "scan for traveling-wave profiles");
    add_phi_source_options(tw_app, tw_cmd.src, /*allow_table=*/true);
    tw_app->add_option("--out", tw_cmd.out, "output directory");
    add_config_opt(tw_app);
    tw_app->add_option("--v-range", tw_cmd.v_range, "wave speed range lo hi")->expected(2);
    tw_app->add_option("--l-range", tw_cmd.l_range, "multiplier range lo hi")->expected(2);
    tw_app->add_option("--nv", tw_cmd.nv, "speed grid points");
    tw_app->add_option("--nl", tw_cmd.nl, "multiplier grid points");
    tw_app->add_option("--profile-points", tw_cmd.profile_points,
                       "points per assembled profile");

    SimulateCmd sim_cmd;
    sim_defaults_from_json(cfg_json, sim_cmd.opts);
    jget(cfg_json, "out", sim_cmd.out);
    CLI::App* sim_app = app.add_subcommand("simulate", "run the curve evolution");
    add_sim_options(sim_app, sim_cmd.opts);
    sim_app->add_option("--out", sim_cmd.out, "output directory");
    add_config_opt(sim_app);

    SweepCmd sweep_cmd;
    sim_defaults_from_json(cfg_json, sweep_cmd.opts);
    jget(cfg_json, "out", sweep_cmd.out);
    jget_pair(cfg_json, "epsilons", sweep_cmd.epsilons);
    jget(cfg_json, "jobs", sweep_cmd.jobs);
    CLI::App* sweep_app =
        app.add_subcommand("sweep", "run one simulation per relaxation time");
    add_sim_options(sweep_app, sweep_cmd.opts);
    sweep_app->add_option("--out", sweep_cmd.out, "output directory");
    add_config_opt(sweep_app);
    sweep_app->add_option("--epsilons", sweep_cmd.epsilons,
                          "relaxation times, e.g. --epsilons 0.002 0.01");
    sweep_app->add_option("--jobs", sweep_cmd.jobs, "concurrent runs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    const std::vector<std::string> args(argv, argv + argc);
    try {
        if (phi_app->parsed()) return run_phi(phi_cmd, args);
        if (tw_app->parsed()) return run_tw(tw_cmd, args);
        if (sim_app->parsed()) return run_simulate(sim_cmd, args);
        if (sweep_app->parsed()) return run_sweep(sweep_cmd, args);
    } catch (const NumericsError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
