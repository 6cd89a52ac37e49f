#pragma once

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qpmkit/qpmkit.hpp"

// qpmctl: command-line front end. Wavelengths are nm, temperatures degC,
// rates Hz unless a flag name says otherwise.

namespace qpmctl {

using nlohmann::json;

enum ExitCode : int { kOk = 0, kDomainError = 1, kUsageError = 2 };

enum class Format { Csv, Json };

// Shortest decimal that round-trips to the same double.
inline std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// Writes to a sibling temporary file and renames it over the target.
inline void write_atomically(const std::filesystem::path& target, const std::string& content) {
    auto tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
}

struct GlobalOptions {
    std::string config = std::string(qpmkit::kBuiltinProfile);
    std::string format = "csv";
    std::string out;
    std::uint64_t seed = 42;
    bool paper_defaults = false;
    bool verbose = false;
};

struct Emitter {
    const GlobalOptions& opts;
    std::ostream& stdout_;

    Format format() const { return opts.format == "json" ? Format::Json : Format::Csv; }

    void emit(const std::string& content) const {
        if (opts.out.empty()) {
            stdout_ << content;
        } else {
            write_atomically(opts.out, content);
        }
    }
    void emit(const json& j) const { emit(j.dump(2) + "\n"); }
};

namespace detail {

inline qpmkit::ProcessKind parse_kind(const std::string& s) {
    if (s == "type0" || s == "0") return qpmkit::ProcessKind::Type0;
    if (s == "type2" || s == "typeII" || s == "2") return qpmkit::ProcessKind::Type2;
    throw CLI::ValidationError("--process", "expected type0 or type2, got '" + s + "'");
}

inline const std::vector<std::string> kProcessNames{"type0", "type2"};

struct ProcessFlags {
    std::string kind = "type0";
    std::optional<int> order;
    std::optional<double> kwg;
    std::optional<double> d_eff;

    void add_to(CLI::App* cmd, const std::string& suffix = "") {
        cmd->add_option("--process" + suffix, kind, "SPDC type")
            ->check(CLI::IsMember(kProcessNames));
        cmd->add_option("--order" + suffix, order, "QPM order (odd, >= 1)");
        cmd->add_option("--kwg" + suffix, kwg, "waveguide mismatch k_wg, rad/um");
    }

    qpmkit::ProcessSpec build(bool defaults) const {
        const auto k = parse_kind(kind);
        int m = 1;
        double kw = 0.0;
        double d = k == qpmkit::ProcessKind::Type0 ? qpmkit::kD33PmPerV : qpmkit::kD24PmPerV;
        if (defaults) {
            m = k == qpmkit::ProcessKind::Type0 ? 3 : 1;
            kw = qpmkit::presets::kFittedKwg;
        }
        if (order) m = *order;
        if (kwg) kw = *kwg;
        if (d_eff) d = *d_eff;
        return {k, m, kw, d};
    }
};

struct SetupFlags {
    std::optional<double> pump_nm;
    std::optional<double> period_um;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--pump-nm", pump_nm, "pump wavelength, nm");
        cmd->add_option("--period-um", period_um, "poling period at 25 degC, um");
    }

    double pump(bool defaults) const {
        if (pump_nm) return *pump_nm;
        if (defaults) return qpmkit::presets::kPumpNm;
        throw CLI::RequiredError("--pump-nm (or --paper-defaults)");
    }

    qpmkit::GratingSpec grating(bool defaults) const {
        auto g = qpmkit::presets::rktp_grating();
        if (period_um) {
            g.poling_period_um = *period_um;
        } else if (!defaults) {
            throw CLI::RequiredError("--period-um (or --paper-defaults)");
        }
        return g;
    }
};

inline json point_json(const qpmkit::TuningPoint& p) {
    return {{"temperature_c", p.temperature_c},
            {"signal_nm", p.signal_nm},
            {"idler_nm", p.idler_nm},
            {"residual", p.residual}};
}

inline json constants_json(const qpmkit::EquationConstants& c) {
    return {{"type0_pump", c.type0_pump},
            {"type0_pair_sum", c.type0_pair_sum},
            {"type2_pump", c.type2_pump},
            {"type2_pair_sum", c.type2_pair_sum},
            {"grating", c.grating}};
}

inline json solution_json(const qpmkit::QpmSolution& s) {
    return {{"m_x", s.m_x},
            {"m_y", s.m_y},
            {"k_wg", s.k_wg},
            {"residual_split", s.residual_split},
            {"score", s.score}};
}

inline qpmkit::LossBudget read_budget(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw qpmkit::DomainError("cannot open budget file '" + path + "'");
    json j;
    try {
        in >> j;
        qpmkit::LossBudget b;
        b.pump_coupling = j.at("pump_coupling").get<double>();
        b.fiber_coupling = j.at("fiber_coupling").get<double>();
        b.detector_efficiency = j.at("detector_efficiency").get<double>();
        b.filter_transmission = j.at("filter_transmission").get<double>();
        b.n_filters = j.at("n_filters").get<int>();
        qpmkit::validate(b);
        return b;
    } catch (const json::exception& e) {
        throw qpmkit::DomainError("malformed budget file '" + path + "': " + e.what());
    }
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        cell.erase(0, cell.find_first_not_of(" \t\r"));
        cell.erase(cell.find_last_not_of(" \t\r") + 1);
        cells.push_back(cell);
    }
    return cells;
}

// Reads a headed CSV and returns the requested numeric columns per row.
inline std::vector<std::vector<double>> read_columns(const std::string& path,
                                                     const std::vector<std::string>& columns) {
    std::ifstream in(path);
    if (!in) throw qpmkit::DomainError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw qpmkit::DomainError("'" + path + "' is empty");
    const auto header = split_csv_line(line);
    std::vector<std::size_t> idx;
    for (const auto& c : columns) {
        const auto it = std::find(header.begin(), header.end(), c);
        if (it == header.end()) throw qpmkit::DomainError("'" + path + "' lacks column " + c);
        idx.push_back(static_cast<std::size_t>(it - header.begin()));
    }
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split_csv_line(line);
        std::vector<double> row;
        for (std::size_t i : idx) {
            if (i >= cells.size()) throw qpmkit::DomainError("short row in '" + path + "'");
            try {
                row.push_back(std::stod(cells[i]));
            } catch (const std::exception&) {
                throw qpmkit::DomainError("non-numeric cell '" + cells[i] + "' in '" + path + "'");
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace detail

// Parses argv-style arguments (without the program name), runs the selected
// subcommand and returns the process exit status.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    CLI::App app{"qpmctl: quasi-phase-matched SPDC modelling and pair-rate analysis", "qpmctl"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--config", g.config, "crystal profile: built-in name or JSON path");
    app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", g.out, "write output to this file (atomically) instead of stdout");
    app.add_option("--seed", g.seed, "RNG seed for simulate");
    app.add_flag("--paper-defaults", g.paper_defaults,
                 "preload period 9.96 um, pump 405 nm, k_wg -0.056, orders (3,1), 66 degC "
                 "crossing and the measured loss budget");
    app.add_flag("-v,--verbose", g.verbose, "diagnostics on stderr");

    // index
    auto* index = app.add_subcommand("index", "refractive index n(axis, lambda, T)");
    std::string axis_name = "z";
    double lambda_nm = 0.0;
    double index_t = 25.0;
    index->add_option("--axis", axis_name)->check(CLI::IsMember({"y", "z"}));
    index->add_option("--lambda-nm", lambda_nm, "wavelength, nm")->required();
    index->add_option("--t", index_t, "temperature, degC");

    // tuning-curve
    auto* tuning = app.add_subcommand("tuning-curve", "phase-matched signal/idler versus temperature");
    detail::ProcessFlags tuning_proc;
    detail::SetupFlags tuning_setup;
    double t_min = 20.0, t_max = 80.0, t_step = 0.5;
    std::optional<double> sig_lo, sig_hi;
    tuning_proc.add_to(tuning);
    tuning_setup.add_to(tuning);
    tuning->add_option("--t-min", t_min);
    tuning->add_option("--t-max", t_max);
    tuning->add_option("--step", t_step);
    tuning->add_option("--signal-min-nm", sig_lo, "signal search bracket lower edge");
    tuning->add_option("--signal-max-nm", sig_hi, "signal search bracket upper edge");

    // degeneracy
    auto* degeneracy = app.add_subcommand("degeneracy", "temperature of degenerate phase matching");
    detail::ProcessFlags deg_proc;
    detail::SetupFlags deg_setup;
    double deg_t_min = 20.0, deg_t_max = 80.0;
    deg_proc.add_to(degeneracy);
    deg_setup.add_to(degeneracy);
    degeneracy->add_option("--t-min", deg_t_min);
    degeneracy->add_option("--t-max", deg_t_max);

    // intersect
    auto* intersect = app.add_subcommand("intersect", "temperature where two tuning curves cross");
    detail::ProcessFlags proc_a, proc_b;
    proc_a.kind = "type0";
    proc_b.kind = "type2";
    detail::SetupFlags int_setup;
    double int_t_min = 20.0, int_t_max = 80.0;
    proc_a.add_to(intersect, "-a");
    proc_b.add_to(intersect, "-b");
    int_setup.add_to(intersect);
    intersect->add_option("--t-min", int_t_min);
    intersect->add_option("--t-max", int_t_max);

    // infer-qpm
    auto* infer = app.add_subcommand("infer-qpm", "QPM orders and k_wg from a type-0/type-II crossing");
    detail::SetupFlags infer_setup;
    std::optional<double> obs_t, obs_signal, obs_idler;
    int max_order = qpmkit::kDefaultMaxOrder;
    bool infer_json = false;
    infer_setup.add_to(infer);
    infer->add_option("--t", obs_t, "crossing temperature, degC");
    infer->add_option("--signal-nm", obs_signal);
    infer->add_option("--idler-nm", obs_idler);
    infer->add_option("--max-order", max_order);
    infer->add_flag("--json", infer_json);

    // pairstats
    auto* pairstats = app.add_subcommand("pairstats", "coincidence slope, CAR and loss-corrected pair rate");
    std::string points_path, budget_path, splitter_name = "fifty-fifty";
    std::optional<double> slope_mhz;
    double window_ns = 2.0;
    std::optional<double> bandwidth_nm;
    double center_nm = 810.0;
    bool stats_json = false;
    pairstats->add_option("--points", points_path, "CSV: power_mw, coincidences_hz, accidentals_hz");
    pairstats->add_option("--slope-mhz-per-mw", slope_mhz, "use a known coincidence slope instead of --points");
    pairstats->add_option("--budget", budget_path, "loss budget JSON");
    pairstats->add_option("--window-ns", window_ns, "coincidence window, ns");
    pairstats->add_option("--splitter", splitter_name)->check(CLI::IsMember({"fifty-fifty", "none"}));
    pairstats->add_option("--bandwidth-nm", bandwidth_nm, "also report spectral density over this bandwidth");
    pairstats->add_option("--center-nm", center_nm);
    pairstats->add_flag("--json", stats_json);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo coincidence histogram");
    qpmkit::SimConfig sim;
    sim.pair_rate_hz = 1e6;
    sim.efficiency_a = sim.efficiency_b = 0.65;
    sim.dark_rate_a_hz = sim.dark_rate_b_hz = 500.0;
    double jitter_ps = 350.0, bin_ps = 100.0, span_ns = 50.0, sim_window_ns = 2.0;
    std::string sim_splitter = "fifty-fifty", sweep_path;
    double rate_per_mw = 1e5;
    simulate->add_option("--pair-rate", sim.pair_rate_hz, "pair emission rate, Hz");
    simulate->add_option("--eff-a", sim.efficiency_a);
    simulate->add_option("--eff-b", sim.efficiency_b);
    simulate->add_option("--dark-a", sim.dark_rate_a_hz, "Hz");
    simulate->add_option("--dark-b", sim.dark_rate_b_hz, "Hz");
    simulate->add_option("--jitter-ps", jitter_ps, "Gaussian timing jitter per detection, ps");
    simulate->add_option("--duration", sim.duration_s, "s");
    simulate->add_option("--splitter", sim_splitter)->check(CLI::IsMember({"fifty-fifty", "deterministic"}));
    simulate->add_option("--bin-ps", bin_ps);
    simulate->add_option("--span-ns", span_ns);
    simulate->add_option("--window-ns", sim_window_ns);
    simulate->add_option("--sweep", sweep_path, "CSV with power_mw column: emit CAR versus pump power");
    simulate->add_option("--pair-rate-per-mw", rate_per_mw, "pair rate per mW of pump for --sweep, Hz/mW");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        if (args.empty()) throw CLI::CallForHelp();
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        err << app.help();
        return args.empty() ? kUsageError : kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kUsageError;
    }

    const bool defaults = g.paper_defaults;
    const Emitter emitter{g, out};

    try {
        const auto disp = qpmkit::load_crystal(g.config);
        if (g.verbose) err << "crystal profile: " << disp.name << "\n";

        if (index->parsed()) {
            const auto axis = axis_name == "y" ? qpmkit::Axis::Y : qpmkit::Axis::Z;
            const double um = qpmkit::units::nm_to_um(lambda_nm);
            const double n0 = qpmkit::sellmeier_index(disp, axis, um);
            const double dn = qpmkit::temperature_correction(disp, axis, um, index_t);
            const double n = qpmkit::refractive_index(disp, axis, um, index_t);
            if (emitter.format() == Format::Json) {
                emitter.emit(json{{"axis", axis_name},
                                  {"lambda_nm", lambda_nm},
                                  {"temperature_c", index_t},
                                  {"sellmeier", n0},
                                  {"correction", dn},
                                  {"index", n}});
            } else {
                emitter.emit("axis,lambda_nm,temperature_c,sellmeier,correction,index\n" + axis_name + "," +
                             num(lambda_nm) + "," + num(index_t) + "," + num(n0) + "," + num(dn) + "," +
                             num(n) + "\n");
            }
        } else if (tuning->parsed()) {
            const auto proc = tuning_proc.build(defaults);
            const double pump = tuning_setup.pump(defaults);
            const auto grating = tuning_setup.grating(defaults);
            std::optional<qpmkit::WavelengthInterval> bracket;
            if (sig_lo || sig_hi) {
                const auto full = qpmkit::signal_search_range(disp, pump);
                bracket = qpmkit::WavelengthInterval{sig_lo.value_or(full.lo_nm), sig_hi.value_or(full.hi_nm)};
            }
            const auto curve =
                qpmkit::tuning_curve(disp, grating, proc, pump, {t_min, t_max}, t_step, bracket);
            if (emitter.format() == Format::Json) {
                json rows = json::array();
                for (const auto& s : curve.samples) {
                    rows.push_back(s.point ? detail::point_json(*s.point)
                                           : json{{"temperature_c", s.temperature_c}, {"signal_nm", nullptr},
                                                  {"idler_nm", nullptr}, {"residual", nullptr}});
                }
                emitter.emit(json{{"process", std::string(qpmkit::to_string(proc.kind()))},
                                  {"qpm_order", proc.qpm_order()},
                                  {"k_wg", proc.k_wg()},
                                  {"pump_nm", pump},
                                  {"points", rows}});
            } else {
                std::string csv = "temperature_c,signal_nm,idler_nm,residual\n";
                for (const auto& s : curve.samples) {
                    csv += num(s.temperature_c);
                    csv += s.point ? "," + num(s.point->signal_nm) + "," + num(s.point->idler_nm) + "," +
                                         num(s.point->residual)
                                   : std::string(",,,");
                    csv += "\n";
                }
                emitter.emit(csv);
            }
        } else if (degeneracy->parsed()) {
            const auto proc = deg_proc.build(defaults);
            const double pump = deg_setup.pump(defaults);
            const auto t = qpmkit::degeneracy_temperature(disp, deg_setup.grating(defaults), proc, pump,
                                                          {deg_t_min, deg_t_max});
            if (emitter.format() == Format::Json) {
                emitter.emit(json{{"found", t.has_value()},
                                  {"temperature_c", t ? json(*t) : json(nullptr)},
                                  {"degenerate_nm", 2.0 * pump}});
            } else {
                emitter.emit("found,temperature_c,degenerate_nm\n" + std::string(t ? "true," : "false,") +
                             (t ? num(*t) : "") + "," + num(2.0 * pump) + "\n");
            }
        } else if (intersect->parsed()) {
            const double pump = int_setup.pump(defaults);
            const auto x = qpmkit::find_intersection(disp, int_setup.grating(defaults),
                                                     proc_a.build(defaults), proc_b.build(defaults), pump,
                                                     {int_t_min, int_t_max});
            if (emitter.format() == Format::Json) {
                json j{{"found", x.has_value()}};
                if (x) {
                    j["temperature_c"] = x->temperature_c;
                    j["signal_nm"] = x->point_a.signal_nm;
                    j["idler_nm"] = x->point_a.idler_nm;
                    j["signal_b_nm"] = x->point_b.signal_nm;
                    j["all_temperatures"] = x->all_temperatures;
                }
                emitter.emit(j);
            } else {
                std::string csv = "found,temperature_c,signal_nm,idler_nm,signal_b_nm,all_temperatures\n";
                csv += x ? "true," + num(x->temperature_c) + "," + num(x->point_a.signal_nm) + "," +
                               num(x->point_a.idler_nm) + "," + num(x->point_b.signal_nm) + "," +
                               (x->all_temperatures ? "true" : "false")
                         : std::string("false,,,,,");
                emitter.emit(csv + "\n");
            }
        } else if (infer->parsed()) {
            qpmkit::IntersectionObservation obs;
            if (defaults) obs = qpmkit::presets::crossing_66c();
            obs.pump_nm = infer_setup.pump(defaults);
            if (obs_t) obs.temperature_c = *obs_t;
            if (obs_signal) obs.signal_nm = *obs_signal;
            if (obs_idler) obs.idler_nm = *obs_idler;
            if (!defaults && (!obs_t || !obs_signal || !obs_idler)) {
                throw CLI::RequiredError("--t, --signal-nm and --idler-nm (or --paper-defaults)");
            }
            const auto c = qpmkit::equation_constants(disp, infer_setup.grating(defaults), obs);
            const auto r = qpmkit::infer_orders(c, max_order);
            json tied = json::array();
            for (const auto& s : r.tied) tied.push_back(detail::solution_json(s));
            json j{{"m_x", r.best.m_x},
                   {"m_y", r.best.m_y},
                   {"k_wg", r.best.k_wg},
                   {"residual_split", r.best.residual_split},
                   {"order_gap", r.order_gap},
                   {"accepted", r.accepted},
                   {"tied", tied},
                   {"constants", detail::constants_json(c)}};
            if (infer_json || emitter.format() == Format::Json) {
                emitter.emit(j);
            } else {
                emitter.emit("m_x,m_y,k_wg,residual_split,order_gap,accepted\n" + std::to_string(r.best.m_x) + "," +
                             std::to_string(r.best.m_y) + "," + num(r.best.k_wg) + "," +
                             num(r.best.residual_split) + "," + num(r.order_gap) + "," +
                             (r.accepted ? "true" : "false") + "\n");
            }
            if (!r.accepted) {
                err << "no odd order pair within score threshold; best candidate reported\n";
                return kDomainError;
            }
        } else if (pairstats->parsed()) {
            qpmkit::LossBudget budget;
            if (!budget_path.empty()) {
                budget = detail::read_budget(budget_path);
            } else if (defaults) {
                budget = qpmkit::presets::coincidence_setup_budget();
            } else {
                throw CLI::RequiredError("--budget (or --paper-defaults)");
            }
            const bool fifty = splitter_name == "fifty-fifty";
            json j;
            if (!points_path.empty()) {
                const auto rows =
                    detail::read_columns(points_path, {"power_mw", "coincidences_hz", "accidentals_hz"});
                std::vector<qpmkit::CoincidencePoint> pts;
                for (const auto& r : rows) pts.push_back({r[0], r[1], r[2], qpmkit::units::ns_to_s(window_ns)});
                const auto s = qpmkit::analyze_sweep(pts, budget, fifty);
                j = json{{"slope", s.fit.slope},
                         {"stderr", s.fit.slope_stderr},
                         {"r_squared", s.fit.r_squared},
                         {"effective_rate", s.effective_rate},
                         {"intrinsic_rate", s.intrinsic_rate},
                         {"car_series", s.car_series},
                         {"underflow", s.underflow}};
            } else if (slope_mhz) {
                const double slope = qpmkit::units::mhz_to_hz(*slope_mhz);
                const double eff = fifty ? qpmkit::splitter_correction(slope) : slope;
                j = json{{"slope", slope},
                         {"stderr", nullptr},
                         {"r_squared", nullptr},
                         {"effective_rate", eff},
                         {"intrinsic_rate", qpmkit::loss_corrected_rate(eff, budget)},
                         {"car_series", json::array()}};
            } else {
                throw CLI::RequiredError("--points or --slope-mhz-per-mw");
            }
            j["rate_unit"] = "Hz/mW";
            j["window_ns"] = window_ns;
            j["pair_detection_efficiency"] = qpmkit::pair_detection_efficiency(budget);
            if (bandwidth_nm) {
                const auto sd =
                    qpmkit::spectral_density(j["intrinsic_rate"].get<double>(), *bandwidth_nm, center_nm);
                j["spectral_density"] = {{"per_nm", sd.per_nm},
                                         {"bandwidth_thz", sd.bandwidth_thz},
                                         {"per_thz", sd.per_thz}};
            }
            if (stats_json || emitter.format() == Format::Json) {
                emitter.emit(j);
            } else {
                std::string csv = "slope,stderr,r_squared,effective_rate,intrinsic_rate\n";
                auto cell = [](const json& v) { return v.is_null() ? std::string() : num(v.get<double>()); };
                csv += cell(j["slope"]) + "," + cell(j["stderr"]) + "," + cell(j["r_squared"]) + "," +
                       cell(j["effective_rate"]) + "," + cell(j["intrinsic_rate"]) + "\n";
                emitter.emit(csv);
            }
        } else if (simulate->parsed()) {
            sim.seed = g.seed;
            sim.jitter_sigma_s = qpmkit::units::ps_to_s(jitter_ps);
            sim.splitter = sim_splitter == "deterministic" ? qpmkit::Splitter::Deterministic
                                                           : qpmkit::Splitter::FiftyFifty;
            const double bin_s = qpmkit::units::ps_to_s(bin_ps);
            const double span_s = qpmkit::units::ns_to_s(span_ns);
            const double window_s = qpmkit::units::ns_to_s(sim_window_ns);
            if (!sweep_path.empty()) {
                const auto rows = detail::read_columns(sweep_path, {"power_mw"});
                std::vector<double> rates;
                for (const auto& r : rows) rates.push_back(r[0] * rate_per_mw);
                const auto sweep = qpmkit::car_sweep(sim, rates, bin_s, span_s, window_s);
                if (emitter.format() == Format::Json) {
                    json arr = json::array();
                    for (std::size_t i = 0; i < sweep.size(); ++i) {
                        const auto& a = sweep[i].analysis;
                        arr.push_back({{"power_mw", rows[i][0]},
                                       {"pair_rate_hz", sweep[i].pair_rate_hz},
                                       {"measured_hz", a.measured_hz},
                                       {"accidentals_hz", a.accidentals_hz},
                                       {"true_hz", a.true_hz},
                                       {"car", a.car}});
                    }
                    emitter.emit(arr);
                } else {
                    std::string csv = "power_mw,pair_rate_hz,measured_hz,accidentals_hz,true_hz,car\n";
                    for (std::size_t i = 0; i < sweep.size(); ++i) {
                        const auto& a = sweep[i].analysis;
                        csv += num(rows[i][0]) + "," + num(sweep[i].pair_rate_hz) + "," + num(a.measured_hz) +
                               "," + num(a.accidentals_hz) + "," + num(a.true_hz) + "," + num(a.car) + "\n";
                    }
                    emitter.emit(csv);
                }
            } else {
                const auto streams = qpmkit::simulate(sim);
                const auto h = qpmkit::build_histogram(streams.a, streams.b, bin_s, span_s, sim.duration_s);
                const auto a = qpmkit::analyze_histogram(h, window_s);
                if (g.verbose) {
                    err << "emitted pairs " << streams.emitted_pairs << ", measured " << a.measured_hz
                        << " Hz, accidentals " << a.accidentals_hz << " Hz, CAR " << a.car << "\n";
                }
                if (emitter.format() == Format::Json) {
                    json centers = json::array(), counts = json::array();
                    for (std::size_t i = 0; i < h.bins.size(); ++i) {
                        centers.push_back(h.bin_center_s(i) * 1e9);
                        counts.push_back(h.bins[i]);
                    }
                    emitter.emit(json{{"measured_hz", a.measured_hz},
                                      {"accidentals_hz", a.accidentals_hz},
                                      {"true_hz", a.true_hz},
                                      {"car", a.car},
                                      {"recovered_pair_rate_hz", qpmkit::recovered_pair_rate(a, sim)},
                                      {"bin_center_ns", centers},
                                      {"counts", counts}});
                } else {
                    std::string csv = "bin_center_ns,counts\n";
                    for (std::size_t i = 0; i < h.bins.size(); ++i) {
                        csv += num(h.bin_center_s(i) * 1e9) + "," + std::to_string(h.bins[i]) + "\n";
                    }
                    emitter.emit(csv);
                }
            }
        }
    } catch (const CLI::Error& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kDomainError;
    }
    return kOk;
}

}  // namespace qpmctl
