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

#include "config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "hfreadout/transmon.hpp"

namespace hfro::app {

namespace {

using Check = std::function<const char *(double)>;

const char *positive(double v) { return v > 0.0 ? nullptr : "must be positive"; }
const char *nonnegative(double v) { return v >= 0.0 ? nullptr : "must be non-negative"; }
const char *probability(double v) { return v >= 0.0 && v <= 1.0 ? nullptr : "must lie in [0, 1]"; }
const char *open_unit(double v) { return v > 0.0 && v < 1.0 ? nullptr : "must lie in (0, 1)"; }
const char *any(double) { return nullptr; }

class Reader {
  public:
    Reader(const Json &j, std::string path, ParseResult &out) : j_(j), path_(std::move(path)), out_(out) {
        ok_ = j_.is_object();
        if (!ok_) error("", "expected an object");
    }

    bool ok() const { return ok_; }

    bool has(const char *key) {
        seen_.insert(key);
        return ok_ && j_.contains(key);
    }

    void error(const std::string &key, const std::string &msg) {
        out_.errors.push_back(fmt::format("{}: {}", where(key), msg));
    }

    std::string where(const std::string &key) const {
        if (key.empty()) return path_.empty() ? "<root>" : path_;
        return path_.empty() ? key : path_ + "." + key;
    }

    const Json *child(const char *key, bool required) {
        if (!has(key)) {
            if (required && ok_) error(key, "required key missing");
            return nullptr;
        }
        return &j_.at(key);
    }

    double number(const char *key, double def, bool required, const Check &check = any) {
        const Json *v = child(key, required);
        if (!v) return def;
        if (!v->is_number()) {
            error(key, "expected a number");
            return def;
        }
        const double x = v->get<double>();
        if (!std::isfinite(x)) {
            error(key, "must be finite");
            return def;
        }
        if (const char *msg = check(x)) error(key, msg);
        return x;
    }

    std::optional<double> optional_number(const char *key, const Check &check = any) {
        if (!has(key)) return std::nullopt;
        return number(key, 0.0, true, check);
    }

    long long integer(const char *key, long long def, bool required, long long lo,
                      long long hi = std::numeric_limits<long long>::max()) {
        const Json *v = child(key, required);
        if (!v) return def;
        if (!v->is_number_integer()) {
            error(key, "expected an integer");
            return def;
        }
        long long x = 0;
        if (v->is_number_unsigned()) {
            const auto u = v->get<std::uint64_t>();
            if (u > static_cast<std::uint64_t>(std::numeric_limits<long long>::max())) {
                error(key, "out of range");
                return def;
            }
            x = static_cast<long long>(u);
        } else {
            x = v->get<long long>();
        }
        if (x < lo || x > hi) {
            error(key, hi == std::numeric_limits<long long>::max() ? fmt::format("must be at least {}", lo)
                                                                    : fmt::format("must lie in [{}, {}]", lo, hi));
        }
        return x;
    }

    std::string text(const char *key, const std::string &def, bool required,
                     const std::vector<std::string> &allowed = {}) {
        const Json *v = child(key, required);
        if (!v) return def;
        if (!v->is_string()) {
            error(key, "expected a string");
            return def;
        }
        std::string s = v->get<std::string>();
        if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
            std::string list;
            for (const auto &a : allowed) list += (list.empty() ? "" : ", ") + a;
            error(key, fmt::format("'{}' is not one of {}", s, list));
        }
        return s;
    }

    std::vector<double> numbers(const char *key, const std::vector<double> &def, bool required,
                                const Check &check = any) {
        const Json *v = child(key, required);
        if (!v) return def;
        if (!v->is_array() || v->empty()) {
            error(key, "expected a non-empty array of numbers");
            return def;
        }
        std::vector<double> out;
        for (std::size_t i = 0; i < v->size(); ++i) {
            const Json &e = (*v)[i];
            if (!e.is_number() || !std::isfinite(e.get<double>())) {
                error(fmt::format("{}[{}]", key, i), "expected a finite number");
                continue;
            }
            if (const char *msg = check(e.get<double>())) error(fmt::format("{}[{}]", key, i), msg);
            out.push_back(e.get<double>());
        }
        return out;
    }

    std::vector<int> integers(const char *key, const std::vector<int> &def, int lo) {
        const Json *v = child(key, false);
        if (!v) return def;
        if (!v->is_array() || v->empty()) {
            error(key, "expected a non-empty array of integers");
            return def;
        }
        std::vector<int> out;
        for (std::size_t i = 0; i < v->size(); ++i) {
            const Json &e = (*v)[i];
            if (!e.is_number_integer() || e.get<long long>() < lo || e.get<long long>() > 1000000) {
                error(fmt::format("{}[{}]", key, i), fmt::format("expected an integer of at least {}", lo));
                continue;
            }
            out.push_back(e.get<int>());
        }
        return out;
    }

    void finish() {
        if (!ok_) return;
        for (const auto &item : j_.items()) {
            if (!seen_.count(item.key())) error(item.key(), "unknown key");
        }
    }

    ParseResult &result() { return out_; }

  private:
    const Json &j_;
    std::string path_;
    ParseResult &out_;
    std::set<std::string> seen_;
    bool ok_ = false;
};

std::string sub(const std::string &path, const char *key) { return path.empty() ? key : path + "." + key; }

TransmonBlock read_transmon(Reader &parent, const std::string &path) {
    TransmonBlock t;
    const Json *j = parent.child("transmon", true);
    if (!j) return t;
    Reader r(*j, sub(path, "transmon"), parent.result());
    t.e_c_hz = r.number("e_c_hz", 0.0, true, positive);
    t.e_j_hz = r.number("e_j_hz", 0.0, true, nonnegative);
    const double n_g = r.number("n_g", 0.0, false);
    const double reduced = std::round(reduce_offset_charge(n_g) * 1e12) / 1e12;
    t.n_g = reduced >= 1.0 ? 0.0 : reduced;
    if (t.n_g != n_g) {
        r.result().warnings.push_back(fmt::format("{}: n_g = {} normalized to {}", r.where("n_g"), n_g, t.n_g));
    }
    t.n_cut = static_cast<int>(r.integer("n_cut", kDefaultChargeCutoff, false, 1, 2000));
    r.finish();
    return t;
}

SpectrumConfig read_spectrum(Reader &r) {
    SpectrumConfig c;
    c.transmon = read_transmon(r, "");
    c.levels = static_cast<int>(r.integer("levels", 10, false, 2, 4001));
    return c;
}

ChiConfig read_chi(Reader &r) {
    ChiConfig c;
    c.transmon = read_transmon(r, "");
    c.omega_r_bare_hz = r.number("omega_r_bare_hz", 0.0, true, positive);
    c.g_hz = r.optional_number("g_hz", positive);
    c.eta = r.optional_number("eta", open_unit);
    if (c.g_hz && c.eta) r.error("", "give exactly one of g_hz and eta");
    if (!c.g_hz && !c.eta && r.ok()) r.error("g_hz", "required key missing (or give eta)");
    c.method = r.text("method", "full_sum", false, {"full_sum", "high_freq", "rwa"});
    if (r.has("m_max")) c.m_max = static_cast<int>(r.integer("m_max", 2, true, 2, 4001));
    if (const Json *j = r.child("ratio_scan", false)) {
        Reader s(*j, "ratio_scan", r.result());
        RatioScanBlock b;
        b.omega_min_hz = s.number("omega_min_hz", 0.0, true, positive);
        b.omega_max_hz = s.number("omega_max_hz", 0.0, true, positive);
        b.points = static_cast<int>(s.integer("points", 0, true, 1, 10000000));
        b.n_g_list = s.numbers("n_g_list", b.n_g_list, false);
        b.visibility = s.number("visibility", 0.1, false, nonnegative);
        if (b.omega_max_hz < b.omega_min_hz) s.error("omega_max_hz", "must not be below omega_min_hz");
        if (!c.eta && r.ok()) s.error("", "a ratio scan needs eta rather than g_hz");
        s.finish();
        c.ratio_scan = b;
    }
    return c;
}

PurcellConfig read_purcell(Reader &r) {
    PurcellConfig c;
    if (const Json *j = r.child("circuit", false)) {
        Reader s(*j, "circuit", r.result());
        CircuitBlock b;
        b.l_q_h = s.number("l_q_h", 0.0, true, positive);
        b.c_q_f = s.number("c_q_f", 0.0, true, positive);
        b.c_c_f = s.number("c_c_f", 0.0, true, positive);
        b.l_res_h = s.number("l_res_h", 0.0, true, positive);
        b.c_res_f = s.number("c_res_f", 0.0, true, positive);
        b.topology = s.text("topology", "inductive", false, {"inductive", "capacitive"});
        if (b.topology == "inductive") {
            b.l_tr_h = s.number("l_tr_h", 0.0, true, positive);
        } else {
            b.c_tr_f = s.number("c_tr_f", 0.0, true, positive);
        }
        b.z0_ohm = s.number("z0_ohm", 50.0, false, positive);
        s.finish();
        c.circuit = b;
    }
    if (const Json *j = r.child("targets", false)) {
        Reader s(*j, "targets", r.result());
        TargetsBlock b;
        b.omega_q_hz = s.number("omega_q_hz", 0.0, true, positive);
        b.omega_r_hz = s.number("omega_r_hz", 0.0, true, positive);
        b.eta = s.number("eta", 0.0, true, open_unit);
        b.kappa_hz = s.number("kappa_hz", 0.0, true, positive);
        b.z0_ohm = s.number("z0_ohm", 50.0, false, positive);
        b.topology = s.text("topology", "inductive", false, {"inductive", "capacitive"});
        s.finish();
        c.targets = b;
    }
    if (c.circuit.has_value() == c.targets.has_value() && r.ok()) {
        r.error("circuit", "give exactly one of circuit and targets");
    }
    if (const Json *j = r.child("admittance", false)) {
        Reader s(*j, "admittance", r.result());
        SweepBlock b;
        b.f_min_hz = s.number("f_min_hz", 0.0, true, positive);
        b.f_max_hz = s.number("f_max_hz", 0.0, true, positive);
        b.points = static_cast<int>(s.integer("points", 0, true, 1, 10000000));
        if (b.f_max_hz < b.f_min_hz) s.error("f_max_hz", "must not be below f_min_hz");
        s.finish();
        c.admittance = b;
    }
    return c;
}

AtlasConfig read_atlas(Reader &r) {
    AtlasConfig c;
    c.transmon = read_transmon(r, "");
    if (const Json *j = r.child("grid", true)) {
        Reader s(*j, "grid", r.result());
        GridBlock &g = c.grid;
        g.omega_min = s.number("omega_min", 0.0, true, positive);
        g.omega_max = s.number("omega_max", 0.0, true, positive);
        g.n_omega = static_cast<int>(s.integer("n_omega", 0, true, 1, 100000));
        g.power_min = s.number("power_min", 0.0, false, nonnegative);
        g.power_max = s.number("power_max", 0.0, true, nonnegative);
        g.n_power = static_cast<int>(s.integer("n_power", 0, true, 1, 100000));
        g.power_kind = s.text("power_kind", "stark", false, {"stark", "zeta"});
        if (g.omega_max < g.omega_min) s.error("omega_max", "must not be below omega_min");
        if (g.power_max < g.power_min) s.error("power_max", "must not be below power_min");
        s.finish();
    }
    c.levels = static_cast<int>(r.integer("levels", 20, false, 2, 200));
    c.tolerance = r.number("tolerance", 1e-7, false, [](double v) {
        return v >= 1e-12 && v <= 1e-6 ? nullptr : "must lie in [1e-12, 1e-6]";
    });
    if (const Json *j = r.child("track", false)) {
        Reader s(*j, "track", r.result());
        c.track.levels = s.integers("levels", c.track.levels, 0);
        c.track.threshold = s.number("threshold", 0.8, false, open_unit);
        c.track.windows = static_cast<int>(s.integer("windows", 8, false, 1, 10000));
        for (int l : c.track.levels) {
            if (l >= c.levels) s.error("levels", fmt::format("level {} is outside the {} simulated levels", l, c.levels));
        }
        s.finish();
    }
    if (const Json *j = r.child("transition", false)) {
        Reader s(*j, "transition", r.result());
        TransitionBlock b;
        b.initial = static_cast<int>(s.integer("initial", 1, true, 0, 1000));
        b.final_level = static_cast<int>(s.integer("final", 8, true, 0, 1000));
        b.powers = s.numbers("powers", {}, true, positive);
        b.omega_min = s.number("omega_min", 0.0, true, positive);
        b.omega_max = s.number("omega_max", 0.0, true, positive);
        if (b.initial == b.final_level) s.error("final", "must differ from initial");
        if (b.omega_max <= b.omega_min) s.error("omega_max", "must exceed omega_min");
        if (std::max(b.initial, b.final_level) >= c.levels) s.error("final", "outside the simulated levels");
        s.finish();
        c.transition = b;
    }
    return c;
}

QndConfig read_qnd(Reader &r) {
    QndConfig c;
    if (r.has("records")) c.records = r.text("records", "", true);
    c.format = r.text("format", "csv", false, {"csv", "json"});
    if (const Json *j = r.child("table", false)) {
        TableBlock t;
        const std::string where = "table";
        bool shape_ok = j->is_array() && j->size() == 5;
        if (shape_ok) {
            for (const Json &row : *j) {
                if (!row.is_array() || row.size() != 5) {
                    shape_ok = false;
                    break;
                }
                std::vector<std::vector<double>> rows;
                for (const Json &pair : row) {
                    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
                        shape_ok = false;
                        break;
                    }
                    rows.push_back({pair[0].get<double>(), pair[1].get<double>()});
                }
                t.rows.push_back(std::move(rows));
            }
        }
        if (!shape_ok) {
            r.error(where, "expected 5 x 5 x 2 numbers indexed [prepared][post][outcome]");
        } else {
            c.table = t;
        }
    }
    if (!c.records && !c.table && r.ok()) r.error("records", "required key missing (or give table)");
    return c;
}

QndSynthConfig read_qnd_synth(Reader &r) {
    QndSynthConfig c;
    if (const Json *j = r.child("rates", true)) {
        Reader s(*j, "rates", r.result());
        c.assign = s.number("assign", 0.0, true, probability);
        c.bitflip = s.number("bitflip", 0.0, true, probability);
        c.leakage = s.number("leakage", 0.0, true, probability);
        c.initial_leakage = s.number("initial_leakage", 0.0, false, probability);
        s.finish();
    }
    c.sequence_length = static_cast<int>(r.integer("sequence_length", 18, false, 1, 64));
    if (c.leakage * c.sequence_length > 1.0) r.error("rates.leakage", "leakage times sequence_length exceeds 1");
    c.shots = static_cast<std::uint64_t>(r.integer("shots", 0, true, 1, 1000000000));
    c.seed = static_cast<std::uint64_t>(r.integer("seed", 0, true, 0));
    return c;
}

}  // namespace

const std::vector<std::string> &known_kinds() {
    static const std::vector<std::string> kinds{"spectrum", "chi", "purcell", "atlas", "qnd", "qnd-synth"};
    return kinds;
}

std::string kind_of(const Body &body) {
    return known_kinds()[body.index()];
}

ParseResult parse_config(const Json &j, const std::string &forced_kind) {
    ParseResult out;
    Reader r(j, "", out);
    if (!r.ok()) return out;
    std::string kind = forced_kind;
    if (r.has("kind")) {
        const std::string given = r.text("kind", "", true, known_kinds());
        if (!forced_kind.empty() && given != forced_kind) {
            r.error("kind", fmt::format("'{}' does not match the '{}' command", given, forced_kind));
        }
        if (kind.empty()) kind = given;
    }
    if (kind.empty()) {
        std::string list;
        for (const auto &k : known_kinds()) list += (list.empty() ? "" : ", ") + k;
        r.error("kind", "required key missing (one of " + list + ")");
        return out;
    }
    RunConfig config;
    if (r.has("workers")) config.workers = static_cast<int>(r.integer("workers", 1, true, 1, 4096));
    if (r.has("output_dir")) config.output_dir = r.text("output_dir", "", true);

    if (kind == "spectrum") {
        config.body = read_spectrum(r);
    } else if (kind == "chi") {
        config.body = read_chi(r);
    } else if (kind == "purcell") {
        config.body = read_purcell(r);
    } else if (kind == "atlas") {
        config.body = read_atlas(r);
    } else if (kind == "qnd") {
        config.body = read_qnd(r);
    } else if (kind == "qnd-synth") {
        config.body = read_qnd_synth(r);
    } else {
        r.error("kind", fmt::format("unknown kind '{}'", kind));
        return out;
    }
    r.finish();
    if (out.errors.empty()) out.config = std::move(config);
    return out;
}

ParseResult load_config(const std::string &path, const std::string &kind) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        ParseResult out;
        out.errors.push_back(fmt::format("{}: cannot open file", path));
        return out;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) return parse_config(Json::object(), kind);
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        ParseResult out;
        out.errors.push_back(fmt::format("{}: invalid JSON: {}", path, e.what()));
        return out;
    }
    return parse_config(j, kind);
}

namespace {

Json transmon_json(const TransmonBlock &t) {
    return Json{{"e_c_hz", t.e_c_hz}, {"e_j_hz", t.e_j_hz}, {"n_g", t.n_g}, {"n_cut", t.n_cut}};
}

struct BodyJson {
    Json &j;

    void operator()(const SpectrumConfig &c) const {
        j["transmon"] = transmon_json(c.transmon);
        j["levels"] = c.levels;
    }
    void operator()(const ChiConfig &c) const {
        j["transmon"] = transmon_json(c.transmon);
        j["omega_r_bare_hz"] = c.omega_r_bare_hz;
        if (c.g_hz) j["g_hz"] = *c.g_hz;
        if (c.eta) j["eta"] = *c.eta;
        j["method"] = c.method;
        if (c.m_max) j["m_max"] = *c.m_max;
        if (c.ratio_scan) {
            const RatioScanBlock &b = *c.ratio_scan;
            j["ratio_scan"] = Json{{"omega_min_hz", b.omega_min_hz}, {"omega_max_hz", b.omega_max_hz},
                                   {"points", b.points},             {"n_g_list", b.n_g_list},
                                   {"visibility", b.visibility}};
        }
    }
    void operator()(const PurcellConfig &c) const {
        if (c.circuit) {
            const CircuitBlock &b = *c.circuit;
            Json k{{"l_q_h", b.l_q_h}, {"c_q_f", b.c_q_f},       {"c_c_f", b.c_c_f},
                   {"l_res_h", b.l_res_h}, {"c_res_f", b.c_res_f}, {"topology", b.topology}};
            if (b.topology == "inductive") {
                k["l_tr_h"] = b.l_tr_h;
            } else {
                k["c_tr_f"] = b.c_tr_f;
            }
            k["z0_ohm"] = b.z0_ohm;
            j["circuit"] = k;
        }
        if (c.targets) {
            const TargetsBlock &b = *c.targets;
            j["targets"] = Json{{"omega_q_hz", b.omega_q_hz}, {"omega_r_hz", b.omega_r_hz}, {"eta", b.eta},
                                {"kappa_hz", b.kappa_hz},     {"z0_ohm", b.z0_ohm},         {"topology", b.topology}};
        }
        if (c.admittance) {
            j["admittance"] =
                Json{{"f_min_hz", c.admittance->f_min_hz}, {"f_max_hz", c.admittance->f_max_hz}, {"points", c.admittance->points}};
        }
    }
    void operator()(const AtlasConfig &c) const {
        j["transmon"] = transmon_json(c.transmon);
        const GridBlock &g = c.grid;
        j["grid"] = Json{{"omega_min", g.omega_min}, {"omega_max", g.omega_max}, {"n_omega", g.n_omega},
                         {"power_min", g.power_min}, {"power_max", g.power_max}, {"n_power", g.n_power},
                         {"power_kind", g.power_kind}};
        j["levels"] = c.levels;
        j["tolerance"] = c.tolerance;
        j["track"] = Json{{"levels", c.track.levels}, {"threshold", c.track.threshold}, {"windows", c.track.windows}};
        if (c.transition) {
            const TransitionBlock &b = *c.transition;
            j["transition"] = Json{{"initial", b.initial},     {"final", b.final_level},    {"powers", b.powers},
                                   {"omega_min", b.omega_min}, {"omega_max", b.omega_max}};
        }
    }
    void operator()(const QndConfig &c) const {
        if (c.records) j["records"] = *c.records;
        j["format"] = c.format;
        if (c.table) j["table"] = c.table->rows;
    }
    void operator()(const QndSynthConfig &c) const {
        j["rates"] = Json{{"assign", c.assign},
                          {"bitflip", c.bitflip},
                          {"leakage", c.leakage},
                          {"initial_leakage", c.initial_leakage}};
        j["sequence_length"] = c.sequence_length;
        j["shots"] = c.shots;
        j["seed"] = c.seed;
    }
};

}  // namespace

Json to_json(const RunConfig &config) {
    Json j;
    j["kind"] = kind_of(config.body);
    if (config.workers) j["workers"] = *config.workers;
    if (config.output_dir) j["output_dir"] = *config.output_dir;
    std::visit(BodyJson{j}, config.body);
    return j;
}

std::string canonical_text(const RunConfig &config) {
    RunConfig c = config;
    c.workers.reset();
    c.output_dir.reset();
    return to_json(c).dump();
}

}  // namespace hfro::app
