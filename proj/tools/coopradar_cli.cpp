// Command-line front end: loads a scenario config, runs one of the
// pipeline stages, and writes CSV/JSON outputs plus a run manifest.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "coopradar/registration.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace coopradar;

namespace {

constexpr const char* kVersion = "0.1.0";

struct RunOptions {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    std::string format = "csv";
    bool json_errors = false;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

void expect_keys(const json& j, const std::string& where,
                 std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* a) { return key == a; }) == allowed.end())
            throw ValidationError("unknown config key '" + key + "' in " + where);
    }
}

double get_or(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw ValidationError(std::string(key) + " must be a number");
    return j[key].get<double>();
}

/// Config schema (JSON, angles in degrees, powers in dBm, distances in m):
///   rsus: [{x, y, height_h}, ...]
///   csa:  {center_x, center_y, width, height, tilt_deg}
///   target: {x, y}                       (defaults to the CSA center)
///   array: {layers, per_layer, spacing, wavelength}
///   link:  {pt_gt_dbm, g_p_db, rho, unit_radius}
///   noise: {p_n_dbm, p_i_dbm}
///   beams: [{phi_deg, theta_deg, delta_phi_deg, delta_theta_deg}, ...]
///   roc / sweep / register / beampattern option blocks
struct Config {
    Scenario scenario;
    json raw;
};

Config load_config(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config parse error: ") + e.what());
    }
    expect_keys(j, "top level",
                {"rsus", "csa", "target", "array", "link", "noise", "beams", "roc", "sweep",
                 "register", "beampattern"});

    Config cfg;
    cfg.raw = j;
    Scenario& sc = cfg.scenario;

    const json csa = j.value("csa", json::object());
    expect_keys(csa, "csa", {"center_x", "center_y", "width", "height", "tilt_deg"});
    sc.csa.center = {get_or(csa, "center_x", 0.0), get_or(csa, "center_y", 100.0), 0.0};
    sc.csa.width = get_or(csa, "width", 20.0);
    sc.csa.height = get_or(csa, "height", 20.0);
    sc.csa.tilt_theta_t = deg2rad(get_or(csa, "tilt_deg", 0.0));

    sc.rsus.clear();
    if (j.contains("rsus")) {
        if (!j["rsus"].is_array()) throw ValidationError("rsus must be an array");
        for (const json& r : j["rsus"]) {
            expect_keys(r, "rsus[]", {"x", "y", "height_h"});
            const double h = get_or(r, "height_h", 10.0);
            if (!(h > 0.0)) throw ValidationError("height_h must be positive");
            sc.rsus.push_back({{get_or(r, "x", 0.0), get_or(r, "y", 0.0), h}, h});
        }
    } else {
        for (double x : {-150.0, -50.0, 50.0, 150.0}) sc.rsus.push_back({{x, 0.0, 10.0}, 10.0});
    }

    const json tgt = j.value("target", json::object());
    expect_keys(tgt, "target", {"x", "y"});
    sc.target = {get_or(tgt, "x", sc.csa.center.x), get_or(tgt, "y", sc.csa.center.y), 0.0};

    const json arr = j.value("array", json::object());
    expect_keys(arr, "array", {"layers", "per_layer", "spacing", "wavelength"});
    const double wl = get_or(arr, "wavelength", 0.0125);
    sc.array = ArrayGeometry(static_cast<int>(get_or(arr, "layers", 33)),
                             static_cast<int>(get_or(arr, "per_layer", 32)),
                             get_or(arr, "spacing", wl / 2.0), wl);

    const json link = j.value("link", json::object());
    expect_keys(link, "link", {"pt_gt_dbm", "g_p_db", "rho", "unit_radius"});
    sc.link.pt_gt = dbm_to_watts(get_or(link, "pt_gt_dbm", 20.0));
    sc.link.g_p = db_to_linear(get_or(link, "g_p_db", 54.2));
    sc.link.wavelength = wl;
    sc.link.echo_prob = get_or(link, "rho", 0.1);
    sc.link.unit_radius = get_or(link, "unit_radius", 4.0);

    const json noise = j.value("noise", json::object());
    expect_keys(noise, "noise", {"p_n_dbm", "p_i_dbm"});
    sc.noise = NoiseClutterParams::from_powers(dbm_to_watts(get_or(noise, "p_n_dbm", -94.0)),
                                               dbm_to_watts(get_or(noise, "p_i_dbm", -110.0)));

    validate(sc);
    return cfg;
}

void write_manifest(const RunOptions& opt, const std::string& command,
                    const std::string& config_text) {
    json m;
    std::ostringstream hash;
    hash << std::hex << std::setfill('0') << std::setw(16) << fnv1a(config_text);
    m["config_hash"] = hash.str();
    m["seed"] = opt.seed;
    m["version"] = kVersion;
    m["command"] = command;
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::ostringstream ts;
    ts << std::put_time(std::gmtime(&t), "%FT%TZ");
    m["started_at"] = ts.str();
    std::ofstream(fs::path(opt.out_dir) / "manifest.json") << m.dump(2) << "\n";
}

std::ofstream open_out(const RunOptions& opt, const std::string& name) {
    fs::create_directories(opt.out_dir);
    std::ofstream out(fs::path(opt.out_dir) / name);
    if (!out) throw ValidationError("cannot write output file: " + name);
    out << std::setprecision(12);
    return out;
}

void write_roc_csv(std::ofstream& out, const RocCurve& curve) {
    out << "threshold,p_f,p_d,method\n";
    for (const RocPoint& p : curve.points)
        out << p.threshold << "," << p.p_f << "," << p.p_d << "," << to_string(curve.method)
            << "\n";
}

BeamSpec beam_from_json(const json& b) {
    expect_keys(b, "beams[]", {"phi_deg", "theta_deg", "delta_phi_deg", "delta_theta_deg"});
    return BeamSpec{deg2rad(get_or(b, "theta_deg", 45.0)), deg2rad(get_or(b, "phi_deg", 60.0)),
                    deg2rad(get_or(b, "delta_theta_deg", 6.0)),
                    deg2rad(get_or(b, "delta_phi_deg", 12.0))};
}

int cmd_beampattern(const Config& cfg, const RunOptions& opt) {
    json beams = cfg.raw.value("beams", json::array());
    if (beams.empty()) beams.push_back(json::object());
    const json bp = cfg.raw.value("beampattern", json::object());
    expect_keys(bp, "beampattern", {"step_deg", "span_factor"});
    const double step = deg2rad(get_or(bp, "step_deg", 0.25));
    const double span = get_or(bp, "span_factor", 4.0);

    const CovarianceMatrix cov = CovarianceMatrix::identity(cfg.scenario.array.size());
    json summary = json::array();
    for (std::size_t i = 0; i < beams.size(); ++i) {
        const BeamSpec beam = beam_from_json(beams[i]);
        const Eigen::VectorXcd w = baba(beam, cfg.scenario.array, cov);
        const BeamPattern pat =
            beampattern(w, cfg.scenario.array, PatternGrid::around(beam, span, step));
        const BeamwidthError eb = beamwidth_error(pat, beam);

        auto out = open_out(opt, "pattern_" + std::to_string(i) + ".csv");
        out << "phi_deg,theta_deg,gain_db\n";
        const auto dirs = pat.grid.directions();
        for (std::size_t k = 0; k < dirs.size(); ++k)
            out << rad2deg(dirs[k].phi) << "," << rad2deg(dirs[k].theta) << ","
                << pat.gain_db(static_cast<Eigen::Index>(k)) << "\n";

        summary.push_back({{"beam", i},
                           {"e_b", eb.e_b},
                           {"error_area_deg2", eb.error_area},
                           {"beam_area_deg2", eb.beam_area}});
    }
    open_out(opt, "e_b_summary.json") << summary.dump(2) << "\n";
    return 0;
}

int cmd_register(const Config& cfg, const RunOptions& opt) {
    const json reg = cfg.raw.value("register", json::object());
    expect_keys(reg, "register", {"r_s", "cell", "mode"});
    std::vector<double> radii{4.0, 5.0};
    if (reg.contains("r_s")) radii = reg["r_s"].get<std::vector<double>>();
    const double cell = get_or(reg, "cell", 0.1);
    const std::string mode_s = reg.value("mode", "ideal");
    if (mode_s != "ideal" && mode_s != "realized")
        throw ValidationError("register.mode must be 'ideal' or 'realized'");
    const FootprintMode mode =
        mode_s == "ideal" ? FootprintMode::IdealEllipse : FootprintMode::RealizedPattern;

    json pdfc_rows = json::array();
    for (double r_s : radii) {
        const BeamPlan plan = plan_absra_radius(cfg.scenario, r_s);

        json plan_j;
        plan_j["reference"] = plan.reference;
        plan_j["entries"] = json::array();
        for (const BeamPlanEntry& e : plan.entries)
            plan_j["entries"].push_back({{"range_m", e.range},
                                         {"phi_deg", rad2deg(e.beam.phi_r)},
                                         {"theta_deg", rad2deg(e.beam.theta_r)},
                                         {"delta_phi_deg", rad2deg(e.beam.delta_phi)},
                                         {"delta_theta_deg", rad2deg(e.beam.delta_theta)}});
        std::ostringstream tag;
        tag << "r" << r_s;
        open_out(opt, "plan_" + tag.str() + ".json") << plan_j.dump(2) << "\n";

        const OverlapResult ov = unit_overlap(plan_units(cfg.scenario, plan), cell);
        json ov_j{{"areas", ov.areas}, {"common_area", ov.common_area}, {"p_dfc", ov.p_dfc}};
        open_out(opt, "overlap_" + tag.str() + ".json") << ov_j.dump(2) << "\n";

        const PowerMap map = power_map(cfg.scenario, plan, mode, cell);
        auto out = open_out(opt, "power_" + tag.str() + ".csv");
        out << "x_m,y_m,power_linear\n";
        for (int iy = 0; iy < map.ny; ++iy)
            for (int ix = 0; ix < map.nx; ++ix)
                out << map.x_min + (ix + 0.5) * map.cell << ","
                    << map.y_min + (iy + 0.5) * map.cell << "," << map.at(ix, iy) << "\n";

        pdfc_rows.push_back(
            {{"r_s", r_s}, {"p_dfc", p_dfc_realized(cfg.scenario, plan, mode, cell)}});
    }
    open_out(opt, "p_dfc_vs_r_s.json") << pdfc_rows.dump(2) << "\n";
    return 0;
}

int cmd_roc(const Config& cfg, const RunOptions& opt) {
    const json roc = cfg.raw.value("roc", json::object());
    expect_keys(roc, "roc", {"r_s", "trials", "n_thresholds"});
    const double r_s = get_or(roc, "r_s", 4.0);
    const auto trials = static_cast<std::int64_t>(get_or(roc, "trials", 1e6));
    const int n_eta = static_cast<int>(get_or(roc, "n_thresholds", 200));

    const BeamPlan plan = plan_absra_radius(cfg.scenario, r_s);
    FusionSignal fused;
    for (const BeamPlanEntry& e : plan.entries) {
        LinkBudget link = cfg.scenario.link;
        link.range = e.range;
        link.g_r = receive_gain(rad2deg(e.beam.delta_theta), rad2deg(e.beam.delta_phi));
        link.unit_radius = r_s;
        fused.amplitudes.push_back(echo_amplitude(link));
    }
    FusionSignal single{{fused.amplitudes.front()}, 1.0};

    std::vector<double> pf_grid;
    for (int i = 1; i <= 99; ++i) pf_grid.push_back(i / 100.0);

    for (const auto& [tag, sig] : {std::pair<const char*, const FusionSignal&>{"single", single},
                                   {"fused", fused}}) {
        const std::vector<double> eta = default_thresholds(sig, cfg.scenario.noise, n_eta);
        auto write = [&](const RocCurve& c, const std::string& name) {
            auto out = open_out(opt, "roc_" + std::string(tag) + "_" + name + ".csv");
            write_roc_csv(out, c);
        };
        write(roc_numeric(sig, cfg.scenario.noise, eta), "numeric");
        write(roc_case1(sig, cfg.scenario.noise, pf_grid), "case1");
        write(roc_case2(sig, cfg.scenario.noise, pf_grid), "case2");
        write(roc_monte_carlo(sig, cfg.scenario.noise, eta, trials, opt.seed), "monte_carlo");
    }
    return 0;
}

int cmd_sweep(const Config& cfg, const RunOptions& opt) {
    const json sw = cfg.raw.value("sweep", json::object());
    expect_keys(sw, "sweep", {"p_f", "rho", "r_s_min", "r_s_max", "r_s_step"});
    const double p_f = get_or(sw, "p_f", 0.1);
    const double rho = get_or(sw, "rho", 0.05);
    const double lo = get_or(sw, "r_s_min", 1.0);
    const double hi = get_or(sw, "r_s_max", 7.0);
    const double step = get_or(sw, "r_s_step", 0.1);
    if (!(step > 0.0 && hi >= lo)) throw ValidationError("invalid r_s sweep bounds");

    std::vector<double> grid;
    for (double r = lo; r <= hi + 1e-9; r += step) grid.push_back(r);
    const RadiusSweep sweep = pd_vs_unit_radius(cfg.scenario, p_f, rho, grid);

    auto out = open_out(opt, "p_d_vs_r_s.csv");
    out << "r_s_m,p_d\n";
    for (const RadiusSweepPoint& p : sweep.points) out << p.r_s << "," << p.p_d << "\n";
    json note{{"argmax_r_s", sweep.argmax_r_s}, {"p_f", p_f}, {"rho", rho}};
    open_out(opt, "sweep_summary.json") << note.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cooperative roadside radar sensing toolkit"};
    app.require_subcommand(1);

    RunOptions opt;
    std::string command;
    for (const char* name : {"beampattern", "register", "roc", "sweep"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", opt.config_path, "scenario config file")->required();
        sub->add_option("--out", opt.out_dir, "output directory");
        sub->add_option("--seed", opt.seed, "random seed");
        sub->add_option("--format", opt.format, "csv|json")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_flag("--json-errors", opt.json_errors, "emit errors as JSON on stderr");
        sub->callback([&command, name] { command = name; });
    }

    CLI11_PARSE(app, argc, argv);

    const auto fail = [&](int code, const char* kind, const std::string& what) {
        if (opt.json_errors)
            std::cerr << json{{"error", kind}, {"message", what}}.dump() << "\n";
        else
            std::cerr << "error (" << kind << "): " << what << "\n";
        return code;
    };

    try {
        const std::string config_text = read_file(opt.config_path);
        const Config cfg = load_config(opt.config_path);
        fs::create_directories(opt.out_dir);
        write_manifest(opt, command, config_text);
        if (command == "beampattern") return cmd_beampattern(cfg, opt);
        if (command == "register") return cmd_register(cfg, opt);
        if (command == "roc") return cmd_roc(cfg, opt);
        return cmd_sweep(cfg, opt);
    } catch (const NumericError& e) {
        return fail(3, "numeric", e.what());
    } catch (const ValidationError& e) {
        return fail(2, "validation", e.what());
    } catch (const std::exception& e) {
        return fail(2, "validation", e.what());
    }
}
