// Copyright 2026 The hfreadout Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "hfreadout/atlas.hpp"
#include "hfreadout/dispersive.hpp"
#include "hfreadout/errors.hpp"
#include "hfreadout/purcell.hpp"
#include "hfreadout/qnd.hpp"
#include "hfreadout/transmon.hpp"
#include "output.hpp"

namespace hfro::app {

namespace {

namespace fs = std::filesystem;
using N = std::string;

N num(double v) { return format_number(v); }

TransmonParams transmon_params(const TransmonBlock &t) { return {t.e_c_hz, t.e_j_hz, t.n_g, t.n_cut}; }

// Minimal JSON writer so machine outputs keep the fixed number format.
class JsonText {
  public:
    void open() { begin('{'); }
    void close() { end('}'); }
    void key(const std::string &k) {
        comma();
        indent();
        out_ += Json(k).dump() + ": ";
        pending_value_ = true;
    }
    void value(double v) { raw(std::isfinite(v) ? num(v) : "null"); }
    void value(std::uint64_t v) { raw(std::to_string(v)); }
    void value(int v) { raw(std::to_string(v)); }
    void value(const std::string &s) { raw(Json(s).dump()); }
    void value(bool b) { raw(b ? "true" : "false"); }
    void object(const std::string &k) {
        key(k);
        begin('{');
    }
    std::string str() const { return out_ + "\n"; }

  private:
    void raw(const std::string &s) {
        if (!pending_value_) {
            comma();
            indent();
        }
        out_ += s;
        pending_value_ = false;
        first_ = false;
    }
    void begin(char c) {
        if (!pending_value_ && depth_ > 0) {
            comma();
            indent();
        }
        out_ += c;
        pending_value_ = false;
        ++depth_;
        first_ = true;
    }
    void end(char c) {
        --depth_;
        if (!first_) {
            out_ += '\n';
            out_ += std::string(2 * depth_, ' ');
        }
        out_ += c;
        first_ = false;
    }
    void comma() {
        if (!first_) out_ += ',';
    }
    void indent() {
        out_ += '\n';
        out_ += std::string(2 * depth_, ' ');
        first_ = false;
    }

    std::string out_;
    int depth_ = 0;
    bool first_ = true;
    bool pending_value_ = false;
};

void run_spectrum(const SpectrumConfig &c, OutputSet &out, const RunConfig &rc) {
    const TransmonParams params = transmon_params(c.transmon);
    const Spectrum s = diagonalize(params, c.levels);
    std::string csv = csv_row({"level", "energy_hz", "transition_from_0_hz", "abs_n_0j", "abs_n_1j"});
    for (int j = 0; j < c.levels; ++j) {
        csv += csv_row({std::to_string(j), num(s.energy(j)), num(s.transition(j, 0)),
                        num(j == 0 ? 0.0 : charge_matrix_element(s, 0, j)),
                        num(j == 1 ? 0.0 : charge_matrix_element(s, 1, j))});
    }
    out.write("spectrum.csv", csv);
    out.write_manifest(rc, Json{{"omega_q_hz", s.qubit_frequency()}});
}

void run_chi(const ChiConfig &c, OutputSet &out, const RunConfig &rc, int workers) {
    const TransmonParams params = transmon_params(c.transmon);
    const Spectrum s = diagonalize(params);
    const double omega_q = s.qubit_frequency();
    const double g = c.g_hz ? *c.g_hz : coupling_from_eta(*c.eta, linear_circuit_frequency(params), c.omega_r_bare_hz);
    const ReadoutCoupling coupling(g, c.omega_r_bare_hz);
    const ShiftMethod method = parse_shift_method(c.method);
    N chi_0, chi_1;
    double chi = 0.0;
    switch (method) {
        case ShiftMethod::full_sum: {
            const int m_max = c.m_max ? *c.m_max : default_sum_cutoff(s);
            if (m_max > s.levels()) throw InvalidParameter("m_max exceeds the validated level count");
            const ShiftReport r = shift_full(s, coupling, 2, m_max);
            chi_0 = num(r.chi_n[0]);
            chi_1 = num(r.chi_n[1]);
            chi = r.chi;
            break;
        }
        case ShiftMethod::high_freq:
            chi = chi_high_freq(s, coupling);
            break;
        case ShiftMethod::rwa:
            chi = chi_rwa(s, coupling);
            break;
    }
    std::string csv = csv_row({"method", "omega_r_bare_hz", "g_hz", "omega_q_hz", "chi_0_hz", "chi_1_hz", "chi_hz",
                               "chi0_high_freq_hz"});
    csv += csv_row({c.method, num(c.omega_r_bare_hz), num(g), num(omega_q), chi_0, chi_1, num(chi),
                    num(chi0_high_freq(s, coupling))});
    out.write("chi.csv", csv);

    Json summary{{"perturbative", coupling.perturbative()}, {"high_frequency_regime", high_frequency_regime(s, coupling)}};
    if (c.ratio_scan) {
        const RatioScanBlock &b = *c.ratio_scan;
        RatioScanOptions opt;
        opt.n_g_list = b.n_g_list;
        opt.visibility = b.visibility;
        opt.workers = workers;
        const std::vector<double> omegas = linspace(b.omega_min_hz, b.omega_max_hz, b.points);
        const auto rows = resonance_ratio_scan(params, *c.eta, omegas, opt);
        std::string scan = csv_row({"n_g", "omega_r_bare_hz", "chi_full_hz", "chi_rwa_hz", "ratio", "flags", "resonant_level"});
        std::size_t flagged = 0;
        for (const RatioPoint &p : rows) {
            if (p.flags != kScanOk) ++flagged;
            scan += csv_row({num(p.n_g), num(p.omega_r_bare), num(p.chi_full), num(p.chi_rwa), num(p.ratio),
                             std::to_string(p.flags), std::to_string(p.resonant_level)});
        }
        out.write("ratio_scan.csv", scan);
        summary["ratio_scan_flagged"] = flagged;
    }
    out.write_manifest(rc, summary);
}

CircuitParams circuit_params(const CircuitBlock &b) {
    CircuitParams c;
    c.l_q = b.l_q_h;
    c.c_q = b.c_q_f;
    c.c_c = b.c_c_f;
    c.l_res = b.l_res_h;
    c.c_res = b.c_res_f;
    c.topology = parse_line_coupling(b.topology);
    c.l_tr = b.l_tr_h;
    c.c_tr = b.c_tr_f;
    c.z0 = b.z0_ohm;
    return c;
}

void run_purcell(const PurcellConfig &c, OutputSet &out, const RunConfig &rc) {
    CircuitParams circuit;
    if (c.circuit) {
        circuit = circuit_params(*c.circuit);
    } else {
        const TargetsBlock &t = *c.targets;
        CircuitTargets targets;
        targets.omega_q = t.omega_q_hz;
        targets.omega_r = t.omega_r_hz;
        targets.eta = t.eta;
        targets.kappa = t.kappa_hz;
        targets.z0 = t.z0_ohm;
        targets.topology = parse_line_coupling(t.topology);
        circuit = synthesize_circuit(targets);
    }
    const PurcellReport r = purcell_rate(circuit);
    std::string csv = csv_row({"topology", "omega_q_hz", "omega_r_hz", "eta", "kappa_hz", "kappa_q_hz", "t1_s",
                               "kappa_q_rwa_hz", "t1_rwa_s", "l_q_h", "c_q_f", "c_c_f", "l_res_h", "c_res_f",
                               "l_tr_h", "c_tr_f", "z0_ohm"});
    csv += csv_row({to_string(r.topology), num(r.omega_q), num(r.omega_r), num(r.eta), num(r.kappa), num(r.kappa_q),
                    num(r.t1_purcell()), num(r.kappa_q_rwa), num(r.t1_purcell_rwa()), num(circuit.l_q),
                    num(circuit.c_q), num(circuit.c_c), num(circuit.l_res), num(circuit.c_res), num(circuit.l_tr),
                    num(circuit.c_tr), num(circuit.z0)});
    out.write("purcell.csv", csv);
    if (c.admittance) {
        const std::vector<double> grid = linspace(c.admittance->f_min_hz, c.admittance->f_max_hz, c.admittance->points);
        std::string adm = csv_row({"f_hz", "re_y_s", "re_y_rwa_s"});
        for (const AdmittancePoint &p : admittance_spectrum(circuit, grid)) {
            adm += csv_row({num(p.omega), num(p.re_y), num(p.re_y_rwa)});
        }
        out.write("admittance.csv", adm);
    }
    out.write_manifest(rc);
}

const char *map_status_name(std::uint8_t s) {
    switch (s) {
        case kMapOk: return "ok";
        case kMapLost: return "lost";
        default: return "failed";
    }
}

const char *fit_status_name(std::uint8_t s) {
    switch (s) {
        case kCellIncluded: return "included";
        case kCellBelowThreshold: return "below";
        case kCellCollision: return "collision";
        default: return "failed";
    }
}

void run_atlas(const AtlasConfig &c, OutputSet &out, const RunConfig &rc, int workers, std::ostream &log) {
    const TransmonParams params = transmon_params(c.transmon);
    const Spectrum s = diagonalize(params, std::max(c.levels, default_level_count(params)));
    GridSpec spec;
    spec.omega_min = c.grid.omega_min;
    spec.omega_max = c.grid.omega_max;
    spec.n_omega = c.grid.n_omega;
    spec.power_min = c.grid.power_min;
    spec.power_max = c.grid.power_max;
    spec.n_power = c.grid.n_power;
    spec.kind = parse_power_kind(c.grid.power_kind);
    GridOptions gopt;
    gopt.propagator.tol = c.tolerance;
    gopt.workers = workers;
    const DriveGrid grid = compute_transmon_grid(s, spec, c.levels, gopt);

    TrackOptions topt;
    topt.levels = c.track.levels;
    topt.threshold = c.track.threshold;
    topt.windows = c.track.windows;
    const TrackResult tracked = track_states(grid, topt);

    std::vector<HybridizationMap> maps;
    std::vector<std::string> header{"omega_norm", "power_norm", "omega_hz", "zeta_hz"};
    Json levels = Json::array();
    Json states = Json::array();
    for (const StarkTrackedState &state : tracked.states) {
        maps.push_back(hybridization_map(grid, state));
        const HybridizationMap &map = maps.back();
        const std::string l = std::to_string(state.level);
        header.insert(header.end(), {"theta_c" + l, "dominant_c" + l, "map_status_c" + l, "fit_status_c" + l});
        levels.push_back(Json{{"level", state.level},
                              {"theta_above_0_25", map.count_above(0.25)},
                              {"lost", map.lost_count()},
                              {"fit_residual", std::stod(num(state.fit_residual))}});
        Json re = Json::array();
        Json im = Json::array();
        for (Eigen::Index r = 0; r < state.coefficients.rows(); ++r) {
            Json rr = Json::array();
            Json ri = Json::array();
            for (Eigen::Index k = 0; k < state.coefficients.cols(); ++k) {
                rr.push_back(std::stod(num(state.coefficients(r, k).real())));
                ri.push_back(std::stod(num(state.coefficients(r, k).imag())));
            }
            re.push_back(rr);
            im.push_back(ri);
        }
        states.push_back(Json{{"level", state.level},
                              {"dimension", state.dimension},
                              {"poly_order", kPolyOrder},
                              {"zeta_scale_hz", std::stod(num(state.scaling.zeta_scale))},
                              {"omega_q_hz", std::stod(num(state.scaling.omega_q))},
                              {"omega_center", std::stod(num(state.scaling.omega_center))},
                              {"omega_half_width", std::stod(num(state.scaling.omega_half_width))},
                              {"window_boundaries", state.window_boundaries},
                              {"fit_residual", std::stod(num(state.fit_residual))},
                              {"coefficients_re", re},
                              {"coefficients_im", im}});
    }
    std::string csv = csv_row(header);
    for (std::size_t p = 0; p < grid.n_power(); ++p) {
        for (std::size_t w = 0; w < grid.n_omega(); ++w) {
            const std::size_t idx = p * grid.n_omega() + w;
            const FloquetCell &cell = grid.cells[idx];
            std::vector<std::string> row{num(grid.omegas[w] / grid.omega_q), num(grid.powers[p]), num(cell.omega),
                                         num(cell.zeta)};
            for (std::size_t m = 0; m < maps.size(); ++m) {
                row.insert(row.end(), {num(maps[m].theta[idx]), std::to_string(maps[m].dominant[idx]),
                                       map_status_name(maps[m].status[idx]),
                                       fit_status_name(tracked.states[m].status[idx])});
            }
            csv += csv_row(row);
        }
    }
    out.write("atlas_theta.csv", csv);
    out.write("atlas_states.json", Json{{"states", states}}.dump(2) + "\n");

    Json summary{{"omega_q_hz", std::stod(num(grid.omega_q))}, {"levels", levels},
                 {"collisions", tracked.collisions.size()}};

    if (c.transition) {
        const TransitionBlock &b = *c.transition;
        TransitionOptions opt;
        opt.levels = c.levels;
        opt.propagator.tol = std::min(c.tolerance, 1e-9);
        const double omega_q = s.qubit_frequency();
        const double e_fi = std::abs(s.transition(b.final_level, b.initial));
        std::string tcsv = csv_row({"initial", "final", "power", "zeta_hz", "omega_star_hz", "omega_gap_hz",
                                    "omega_fit_hz", "low_power_hz", "gap_ratio", "ill_defined", "reason"});
        for (double p : b.powers) {
            const double zeta = grid_zeta(spec.kind, p, e_fi, omega_q);
            const TransitionAmplitude a = extract_transition_amplitude(s, b.initial, b.final_level, zeta,
                                                                       b.omega_min * omega_q, b.omega_max * omega_q, opt);
            tcsv += csv_row({std::to_string(b.initial), std::to_string(b.final_level), num(p), num(zeta),
                             num(a.omega_star), num(a.omega_gap), num(a.omega_fit), num(a.low_power),
                             num(a.ill_defined ? std::nan("") : a.omega_gap / a.low_power), a.ill_defined ? "1" : "0",
                             a.reason});
        }
        out.write("transitions.csv", tcsv);
    }

    std::size_t failed = 0;
    const FloquetCell *first = nullptr;
    for (const FloquetCell &cell : grid.cells) {
        if (cell.failed) {
            if (!first) first = &cell;
            ++failed;
        }
    }
    summary["failed_cells"] = failed;
    out.write_manifest(rc, summary);
    if (first) {
        log << fmt::format("{} cells failed\n", failed);
        throw NumericalError(fmt::format("atlas cell at omega = {} Hz, zeta = {} Hz: {}", num(first->omega),
                                         num(first->zeta), first->reason));
    }
}

std::vector<ShotRecord> read_records_json(std::istream &in) {
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::parse_error &e) {
        throw InvalidParameter(std::string("invalid JSON records: ") + e.what());
    }
    if (!j.is_array()) throw InvalidParameter("JSON records must be an array");
    std::vector<ShotRecord> out;
    out.reserve(j.size());
    auto leak = [](const Json &v) {
        const std::string s = v.is_string() ? v.get<std::string>() : v.dump();
        return s == "c" ? 0 : parse_state_label(s);
    };
    for (std::size_t i = 0; i < j.size(); ++i) {
        const Json &e = j[i];
        try {
            ShotRecord r;
            r.prepared = e.at("prepared").get<int>();
            r.pre_leak = leak(e.at("pre_leak"));
            r.post_leak = leak(e.at("post_leak"));
            for (const Json &o : e.at("outcomes")) r.outcomes.push_back(static_cast<std::uint8_t>(o.get<int>()));
            out.push_back(std::move(r));
        } catch (const nlohmann::json::exception &ex) {
            throw InvalidParameter(fmt::format("record {}: {}", i, ex.what()));
        }
    }
    return out;
}

void tally_json(JsonText &t, const ErrorTally &tally) {
    t.key("sequence_length"); t.value(tally.sequence_length);
    t.key("records"); t.value(tally.records);
    t.key("discarded"); t.value(tally.discarded);
    t.key("leaked_sequences"); t.value(tally.leaked_sequences);
    t.key("clean_sequences"); t.value(tally.clean_sequences);
    t.key("assignment_events"); t.value(tally.assignment_events);
    t.key("transition_events"); t.value(tally.transition_events);
    auto rate = [&](const char *name, double v, double sigma) {
        t.object(name);
        t.key("value"); t.value(v);
        t.key("sigma"); t.value(sigma);
        t.key("ci95_low"); t.value(std::max(0.0, v - 1.96 * sigma));
        t.key("ci95_high"); t.value(std::min(1.0, v + 1.96 * sigma));
        t.close();
    };
    rate("eps_assign", tally.eps_assign, tally.sigma_assign);
    rate("eps_trans_bitflip", tally.eps_trans_bitflip, tally.sigma_trans_bitflip);
    rate("eps_trans_leakage", tally.eps_trans_leakage, tally.sigma_trans_leakage);
    t.key("eps_trans"); t.value(tally.eps_trans());
    t.key("q"); t.value(tally.q());
}

void run_qnd(const QndConfig &c, OutputSet &out, const RunConfig &rc, const RunContext &ctx) {
    std::string tally_text, metrics_text;
    if (c.table) {
        ConditionalTable table;
        for (int k = 0; k < kStateCount; ++k) {
            for (int i = 0; i < kStateCount; ++i) {
                for (int j = 0; j < 2; ++j) table.at(i, j, k) = c.table->rows[k][i][j];
            }
        }
        const QndDecomposition d = qnd_fidelity(table);
        JsonText t;
        t.open();
        t.key("q"); t.value(d.q);
        t.key("eps_assign"); t.value(d.eps_assign);
        t.key("eps_trans"); t.value(d.eps_trans);
        t.key("eps_trans_bitflip"); t.value(d.eps_trans_bitflip);
        t.key("eps_trans_leakage"); t.value(d.eps_trans_leakage);
        t.key("readout_fidelity"); t.value(readout_fidelity(table));
        t.key("repeatability"); t.value(repeatability(compose_repeat(table)));
        t.close();
        metrics_text = t.str();
    }
    if (c.records) {
        fs::path path(*c.records);
        if (path.is_relative()) path = fs::path(ctx.base_dir) / path;
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot open records file " + path.string());
        const std::vector<ShotRecord> records = c.format == "json" ? read_records_json(in) : read_records_csv(in);
        if (in.bad()) throw IoError("cannot read records file " + path.string());
        const ErrorTally tally = classify_records(records, ctx.workers);
        JsonText t;
        t.open();
        tally_json(t, tally);
        t.close();
        tally_text = t.str();
    }
    if (!tally_text.empty()) out.write("qnd_tally.json", tally_text);
    if (!metrics_text.empty()) out.write("qnd_metrics.json", metrics_text);
    out.write_manifest(rc);
}

void run_qnd_synth(const QndSynthConfig &c, OutputSet &out, const RunConfig &rc, int workers) {
    SynthRates rates;
    rates.assign = c.assign;
    rates.bitflip = c.bitflip;
    rates.leakage = c.leakage;
    rates.initial_leakage = c.initial_leakage;
    rates.sequence_length = c.sequence_length;
    const std::vector<ShotRecord> records = synthesize_records(rates, c.shots, c.seed, workers);
    std::ostringstream ss;
    write_records_csv(ss, records);
    out.write("records.csv", ss.str());
    out.write_manifest(rc);
}

}  // namespace

void run(const RunConfig &config, const RunContext &ctx, std::ostream &log) {
    OutputSet out(ctx.output_dir);
    const Body &b = config.body;
    if (const auto *c = std::get_if<SpectrumConfig>(&b)) {
        run_spectrum(*c, out, config);
    } else if (const auto *c = std::get_if<ChiConfig>(&b)) {
        run_chi(*c, out, config, ctx.workers);
    } else if (const auto *c = std::get_if<PurcellConfig>(&b)) {
        run_purcell(*c, out, config);
    } else if (const auto *c = std::get_if<AtlasConfig>(&b)) {
        run_atlas(*c, out, config, ctx.workers, log);
    } else if (const auto *c = std::get_if<QndConfig>(&b)) {
        run_qnd(*c, out, config, ctx);
    } else if (const auto *c = std::get_if<QndSynthConfig>(&b)) {
        run_qnd_synth(*c, out, config, ctx.workers);
    }
    for (const WrittenFile &f : out.files()) log << fmt::format("wrote {}/{}\n", out.dir(), f.name);
}

}  // namespace hfro::app
