#include "spmid/cli.hpp"

#include <cmath>
#include <iostream>
#include <sstream>
#include <utility>

#include "CLI11.hpp"
#include "json.hpp"
#include "spmid/constants.hpp"
#include "spmid/errors.hpp"
#include "spmid/io.hpp"
#include "spmid/timedomain.hpp"

namespace spmid::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Outputs = std::vector<std::pair<fs::path, std::string>>;

double number(const json& j, const char* key, const std::string& source) {
    const auto& v = j.at(key);
    if (!v.is_number()) throw ConfigError(source + ": '" + key + "' must be a number");
    return v.get<double>();
}

std::size_t count(const json& j, const char* key, const std::string& source) {
    const auto& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ConfigError(source + ": '" + key + "' must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

fs::path path_in(const json& j, const char* key, const fs::path& base, const std::string& source) {
    const auto& v = j.at(key);
    if (!v.is_string()) throw ConfigError(source + ": '" + key + "' must be a string");
    fs::path p = v.get<std::string>();
    return p.is_relative() ? base / p : p;
}

LogAxis axis_from(const json& j, const std::string& source) {
    LogAxis a;
    if (j.contains("min")) a.min = number(j, "min", source);
    if (j.contains("max")) a.max = number(j, "max", source);
    if (j.contains("count")) a.count = count(j, "count", source);
    return a;
}

RctMode rct_mode_from(const std::string& s) {
    if (s == "fixed") return RctMode::Fixed;
    if (s == "co-estimate") return RctMode::CoEstimate;
    throw ConfigError("R_ct mode must be 'fixed' or 'co-estimate', got '" + s + "'");
}

std::string dod_tag(double dod) { return io::format_number(dod); }

void require_file(const fs::path& p, const char* what) {
    if (p.empty()) throw ConfigError(std::string("no ") + what + " configured");
    if (!fs::is_regular_file(p)) {
        throw ConfigError(std::string(what) + " '" + p.string() + "' does not exist");
    }
}

void check_dods(const std::vector<double>& dods) {
    for (double d : dods) {
        if (!(d >= 0.0 && d <= 1.0)) {
            throw ConfigError("depth of discharge " + io::format_number(d) + " is outside [0, 1]");
        }
    }
}

// All outputs are computed first; nothing is written unless every file can be.
std::vector<fs::path> commit(const RunConfig& cfg, const Outputs& outputs) {
    if (!cfg.force) {
        for (const auto& [path, body] : outputs) {
            if (fs::exists(path)) {
                throw UsageError("refusing to overwrite '" + path.string() + "' (use --force)");
            }
        }
    }
    std::vector<fs::path> written;
    for (const auto& [path, body] : outputs) {
        io::write_text_file(path, body);
        written.push_back(path);
    }
    return written;
}

struct ModelSource {
    io::ParamsFile params;
    std::optional<GroupedParams> groups;
    double temperature = kDefaultTemperature;

    double tau_plus() const {
        return groups ? groups->tau_d_plus : params.identifiable->tau_d_plus;
    }
    double tau_minus() const {
        return groups ? groups->tau_d_minus : params.identifiable->tau_d_minus;
    }

    // From the physical set the resistance follows the stoichiometry at each
    // DoD; the identifiable triple carries one value for all DoDs.
    double r_ct(double dod, double total_capacity) const {
        if (groups) {
            const ThetaVector th = theta_from_groups(*groups);
            const OperatingPoint op =
                operating_point_at_dod(params.x0_plus_at_dod0.value_or(0.5),
                                       params.x0_minus_at_dod0.value_or(0.5), *groups,
                                       total_capacity, dod);
            return charge_transfer_resistance(th[2], th[5], op, temperature);
        }
        return params.identifiable->r_ct0;
    }
};

ModelSource load_model(const RunConfig& cfg) {
    require_file(cfg.params_file, "parameter file");
    ModelSource m;
    m.params = io::read_params_json(cfg.params_file);
    if (m.params.physical) {
        m.groups = group_from_physical(*m.params.physical);
        m.temperature = m.params.physical->temperature;
    } else if (!m.params.identifiable) {
        throw ConfigError(cfg.params_file.string() + ": no parameters found");
    }
    return m;
}

io::OcvPair load_ocv(const RunConfig& cfg) {
    require_file(cfg.ocv_file, "OCV file");
    return io::read_ocv_csv(cfg.ocv_file);
}

std::vector<EisSpectrum> load_spectra(const RunConfig& cfg) {
    if (cfg.eis_files.empty()) throw UsageError("no EIS files configured");
    for (const auto& p : cfg.eis_files) require_file(p, "EIS file");
    if (!cfg.dods.empty() && cfg.dods.size() != cfg.eis_files.size()) {
        throw ConfigError("'dods' must list one value per EIS file");
    }
    check_dods(cfg.dods);
    std::vector<EisSpectrum> out;
    for (std::size_t k = 0; k < cfg.eis_files.size(); ++k) {
        EisSpectrum s = io::read_eis_csv(cfg.eis_files[k]);
        if (!cfg.dods.empty()) s.dod = cfg.dods[k];
        out.push_back(std::move(s));
    }
    return out;
}

FitDataset build_dataset(const RunConfig& cfg, RctMode mode) {
    const auto spectra = load_spectra(cfg);
    const auto ocv = load_ocv(cfg);
    std::optional<ModelSource> model;
    if (mode == RctMode::Fixed && cfg.rct_ohm_per_dod.empty()) {
        if (cfg.params_file.empty()) {
            throw ConfigError("fixed R_ct needs 'rct_ohm_per_dod' or a parameter file");
        }
        model = load_model(cfg);
    }
    if (mode == RctMode::Fixed && !cfg.rct_ohm_per_dod.empty() &&
        cfg.rct_ohm_per_dod.size() != spectra.size()) {
        throw ConfigError("'rct_ohm_per_dod' must list one value per EIS file");
    }
    FitDataset ds;
    for (std::size_t k = 0; k < spectra.size(); ++k) {
        FitEntry e;
        e.spectrum = spectra[k];
        e.slopes = slopes_at_dod(ocv.plus, ocv.minus, spectra[k].dod);
        if (mode == RctMode::Fixed) {
            e.r_ct_fixed = model ? model->r_ct(spectra[k].dod, ocv.plus.total_capacity())
                                 : cfg.rct_ohm_per_dod[k];
        }
        ds.entries.push_back(std::move(e));
    }
    validate(ds);
    return ds;
}

std::string residuals_csv(const FitEntry& e, const IdentifiableParams& p) {
    std::string out = "# dod=" + io::format_number(e.spectrum.dod) + "\n";
    out += "freq_hz,z_real_ohm,z_imag_ohm,model_real_ohm,model_imag_ohm,res_real_ohm,res_imag_ohm\n";
    for (const auto& pt : e.spectrum.points) {
        const cplx zm = model_impedance(pt.omega, p, e.slopes);
        const cplx r = pt.z - zm;
        const double vals[] = {pt.omega / (2.0 * kPi), pt.z.real(), pt.z.imag(), zm.real(),
                               zm.imag(), r.real(), r.imag()};
        for (std::size_t c = 0; c < std::size(vals); ++c) {
            if (c) out += ',';
            out += io::format_number(vals[c]);
        }
        out += '\n';
    }
    return out;
}

}  // namespace

RunConfig parse_config(const std::string& json_text, const fs::path& base_dir,
                       const std::string& source) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(source + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError(source + ": top level must be an object");
    if (!j.contains("schema_version") || j["schema_version"] != 1) {
        throw ConfigError(source + ": schema_version must be 1");
    }

    RunConfig c;
    try {
        if (j.contains("params_file")) c.params_file = path_in(j, "params_file", base_dir, source);
        if (j.contains("ocv_file")) c.ocv_file = path_in(j, "ocv_file", base_dir, source);
        if (j.contains("profile_file")) c.profile_file = path_in(j, "profile_file", base_dir, source);
        if (j.contains("output_dir")) c.output_dir = path_in(j, "output_dir", base_dir, source);
        if (j.contains("eis_files")) {
            for (const auto& v : j["eis_files"]) {
                fs::path p = v.get<std::string>();
                c.eis_files.push_back(p.is_relative() ? base_dir / p : p);
            }
        }
        if (j.contains("dods")) c.dods = j["dods"].get<std::vector<double>>();
        if (j.contains("frequency")) {
            const auto& f = j["frequency"];
            if (f.contains("f_min_hz")) c.f_min_hz = number(f, "f_min_hz", source);
            if (f.contains("f_max_hz")) c.f_max_hz = number(f, "f_max_hz", source);
            if (f.contains("points_per_decade")) {
                c.points_per_decade = static_cast<int>(count(f, "points_per_decade", source));
            }
        }
        if (j.contains("r_extra_ohm")) c.r_extra_ohm = number(j, "r_extra_ohm", source);
        if (j.contains("rct_ohm_per_dod")) {
            c.rct_ohm_per_dod = j["rct_ohm_per_dod"].get<std::vector<double>>();
        }
        if (j.contains("optimizer")) {
            const auto& o = j["optimizer"];
            auto& f = c.fit;
            if (o.contains("rct_mode")) f.rct_mode = rct_mode_from(o["rct_mode"].get<std::string>());
            if (o.contains("tau_min")) f.tau_min = number(o, "tau_min", source);
            if (o.contains("tau_max")) f.tau_max = number(o, "tau_max", source);
            if (o.contains("starts_per_axis")) f.starts_per_axis = count(o, "starts_per_axis", source);
            if (o.contains("xtol")) f.xtol = number(o, "xtol", source);
            if (o.contains("ftol")) f.ftol = number(o, "ftol", source);
            if (o.contains("max_iterations")) f.max_iterations = count(o, "max_iterations", source);
            if (o.contains("jitter")) f.jitter = number(o, "jitter", source);
            if (o.contains("seed")) c.seed = o["seed"].get<std::uint64_t>();
        }
        if (j.contains("landscape")) {
            const auto& l = j["landscape"];
            if (l.contains("tau_plus")) c.landscape.tau_plus = axis_from(l["tau_plus"], source);
            if (l.contains("tau_minus")) c.landscape.tau_minus = axis_from(l["tau_minus"], source);
            if (l.contains("floor")) c.landscape.floor = number(l, "floor", source);
        }
        if (j.contains("r0")) {
            const auto& r = j["r0"];
            if (r.contains("threshold")) c.r0.r2_threshold = number(r, "threshold", source);
            if (r.contains("min_points")) c.r0.min_points = count(r, "min_points", source);
            if (r.contains("hf_cutoff_hz")) c.r0.hf_cutoff_hz = number(r, "hf_cutoff_hz", source);
        }
        if (j.contains("time")) {
            const auto& t = j["time"];
            if (t.contains("dt_s")) c.time_dt_s = number(t, "dt_s", source);
            if (t.contains("n_points")) c.time_n_points = static_cast<int>(count(t, "n_points", source));
            if (t.contains("slope_scale_plus")) {
                c.time_slope_scale_plus = number(t, "slope_scale_plus", source);
            }
            if (t.contains("dod")) c.time_dod = number(t, "dod", source);
            if (t.contains("r0_ohm")) c.time_r0_ohm = number(t, "r0_ohm", source);
            if (t.contains("states")) c.time_states = t["states"].get<bool>();
        }
    } catch (const json::exception& e) {
        throw ConfigError(source + ": " + e.what());
    }
    check_dods(c.dods);
    return c;
}

RunConfig load_config(const fs::path& path) {
    if (!fs::is_regular_file(path)) throw ConfigError("config file '" + path.string() + "' does not exist");
    return parse_config(io::read_text_file(path), path.parent_path(), path.string());
}

std::vector<fs::path> cmd_simulate_eis(const RunConfig& cfg) {
    if (cfg.dods.empty()) throw UsageError("no depths of discharge requested");
    check_dods(cfg.dods);
    const ModelSource model = load_model(cfg);
    const auto ocv = load_ocv(cfg);
    const auto grid = FrequencyGrid::log_spaced_hz(cfg.f_min_hz, cfg.f_max_hz, cfg.points_per_decade);

    Outputs outputs;
    for (double dod : cfg.dods) {
        const OcvSlopes slopes = slopes_at_dod(ocv.plus, ocv.minus, dod);
        const IdentifiableParams p{model.tau_plus(), model.tau_minus(),
                                   model.r_ct(dod, ocv.plus.total_capacity())};
        EisSpectrum s = simulate_eis(p, slopes, grid, cfg.r_extra_ohm);
        s.dod = dod;
        outputs.emplace_back(cfg.output_dir / ("eis_dod" + dod_tag(dod) + ".csv"), io::to_eis_csv(s));
    }
    return commit(cfg, outputs);
}

std::vector<fs::path> cmd_r0(const RunConfig& cfg) {
    const auto spectra = load_spectra(cfg);
    std::string table = "dod,r0_ohm,r_squared,points_used\n";
    std::string trace = "dod,iteration,points,r_squared,r0_ohm,dropped_freq_hz\n";
    for (const auto& s : spectra) {
        const R0Estimate e = estimate_r0(s, cfg.r0);
        table += io::format_number(s.dod) + ',' + io::format_number(e.r0) + ',' +
                 io::format_number(e.r_squared) + ',' + std::to_string(e.points_used) + '\n';
        for (std::size_t k = 0; k < e.trace.size(); ++k) {
            const auto& it = e.trace[k];
            trace += io::format_number(s.dod) + ',' + std::to_string(k) + ',' +
                     std::to_string(it.points) + ',' + io::format_number(it.r_squared) + ',' +
                     io::format_number(it.r0) + ',' +
                     io::format_number(it.dropped_omega / (2.0 * kPi)) + '\n';
        }
    }
    Outputs outputs{{cfg.output_dir / "r0_table.csv", table}};
    if (cfg.trace) outputs.emplace_back(cfg.output_dir / "r0_trace.csv", trace);
    return commit(cfg, outputs);
}

std::vector<fs::path> cmd_fit(const RunConfig& cfg) {
    FitOptions opts = cfg.fit;
    opts.seed = cfg.seed;
    opts.threads = cfg.threads;
    const FitDataset ds = build_dataset(cfg, opts.rct_mode);
    const FitResult r = fit(ds, opts);

    Outputs outputs{{cfg.output_dir / "fit_result.json", io::to_json(r).dump(2) + "\n"}};
    for (std::size_t k = 0; k < ds.entries.size(); ++k) {
        const auto& e = ds.entries[k];
        const IdentifiableParams p{r.tau_d_plus, r.tau_d_minus, r.r_ct_per_dod[k]};
        outputs.emplace_back(cfg.output_dir / ("residuals_dod" + dod_tag(e.spectrum.dod) + ".csv"),
                             residuals_csv(e, p));
    }
    return commit(cfg, outputs);
}

std::vector<fs::path> cmd_landscape(const RunConfig& cfg) {
    LandscapeOptions opts = cfg.landscape;
    opts.rct_mode = cfg.fit.rct_mode;
    opts.threads = cfg.threads;
    const FitDataset ds = build_dataset(cfg, opts.rct_mode);
    const LandscapeGrid grid = landscape(ds, opts);
    return commit(cfg, {{cfg.output_dir / "landscape.csv", io::to_landscape_csv(grid)}});
}

std::vector<fs::path> cmd_simulate_time(const RunConfig& cfg) {
    if (!(cfg.time_dod >= 0.0 && cfg.time_dod <= 1.0)) {
        throw ConfigError("time.dod must lie in [0, 1]");
    }
    require_file(cfg.profile_file, "current profile");
    const ModelSource model = load_model(cfg);
    const auto ocv = load_ocv(cfg);
    const CurrentProfile profile = io::read_profile_csv(cfg.profile_file);

    const OcvSlopes slopes = slopes_at_dod(ocv.plus, ocv.minus, cfg.time_dod);
    const double r0 = cfg.time_r0_ohm.value_or(
        model.r_ct(cfg.time_dod, ocv.plus.total_capacity()) + cfg.r_extra_ohm);
    CollocationModel m(model.tau_plus(), model.tau_minus(), cfg.time_n_points);
    const TimeSeries ts = simulate(m, slopes, r0, profile, cfg.time_dt_s, cfg.time_slope_scale_plus);
    return commit(cfg, {{cfg.output_dir / "time_series.csv", io::to_time_series_csv(ts, cfg.time_states)}});
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Single-particle-model impedance toolkit", "spmid"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    bool force = false;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--out", out_dir, "Output directory (overrides the config)");
    app.add_flag("--force", force, "Overwrite existing output files");
    app.add_option("--seed", seed, "Seed for jittered multi-start");
    app.add_option("--threads", threads, "Worker threads")->check(CLI::Range(1u, 256u));

    auto* sim_eis = app.add_subcommand("simulate-eis", "Synthetic spectra at each configured DoD");
    auto* r0 = app.add_subcommand("r0", "Series resistance by constrained regression");
    bool trace = false;
    r0->add_flag("--trace", trace, "Also write the per-iteration regression trace");
    auto* fit_cmd = app.add_subcommand("fit", "Estimate the diffusion time constants");
    std::string rct;
    fit_cmd->add_option("--rct", rct, "R_ct handling")->check(CLI::IsMember({"fixed", "co-estimate"}));
    auto* land = app.add_subcommand("landscape", "Loss landscape over a log grid");
    land->add_option("--rct", rct, "R_ct handling")->check(CLI::IsMember({"fixed", "co-estimate"}));
    auto* sim_time = app.add_subcommand("simulate-time", "Time-domain voltage response");
    bool states = false;
    sim_time->add_flag("--states", states, "Include surface stoichiometry columns");
    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        cfg.force = force;
        if (seed) cfg.seed = *seed;
        if (threads) cfg.threads = *threads;
        if (trace) cfg.trace = true;
        if (states) cfg.time_states = true;
        if (!rct.empty()) cfg.fit.rct_mode = rct_mode_from(rct);

        std::vector<fs::path> written;
        if (*sim_eis) written = cmd_simulate_eis(cfg);
        else if (*r0) written = cmd_r0(cfg);
        else if (*fit_cmd) written = cmd_fit(cfg);
        else if (*land) written = cmd_landscape(cfg);
        else if (*sim_time) written = cmd_simulate_time(cfg);
        for (const auto& p : written) out << p.string() << '\n';
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        switch (e.kind()) {
            case ErrorKind::Validation: return kExitValidation;
            case ErrorKind::NonConvergence: return kExitNonConvergence;
            case ErrorKind::Io: return kExitIo;
        }
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace spmid::cli
