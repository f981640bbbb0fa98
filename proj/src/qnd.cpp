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

#include "hfreadout/qnd.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "hfreadout/errors.hpp"
#include "hfreadout/parallel.hpp"

namespace hfro {

std::string state_label(int state) {
    if (state < 0 || state >= kStateCount) throw InvalidParameter("state index out of range");
    return state == 4 ? "4+" : std::to_string(state);
}

int parse_state_label(const std::string &text) {
    if (text == "0") return 0;
    if (text == "1") return 1;
    if (text == "2") return 2;
    if (text == "3") return 3;
    if (text == "4+" || text == "4") return 4;
    throw InvalidParameter("unknown state label '" + text + "'");
}

int ConditionalTable::index(int post, int outcome, int prepared) {
    if (post < 0 || post >= kStateCount || prepared < 0 || prepared >= kStateCount || outcome < 0 ||
        outcome > 1) {
        throw InvalidParameter("conditional table index out of range");
    }
    return (prepared * kStateCount + post) * 2 + outcome;
}

ConditionalTable ConditionalTable::ideal() {
    ConditionalTable t;
    for (int k = 0; k < kStateCount; ++k) t.at(k, k == 0 ? 0 : 1, k) = 1.0;
    return t;
}

double ConditionalTable::post_state(int post, int prepared) const {
    return at(post, 0, prepared) + at(post, 1, prepared);
}

double ConditionalTable::outcome(int outcome, int prepared) const {
    double s = 0.0;
    for (int i = 0; i < kStateCount; ++i) s += at(i, outcome, prepared);
    return s;
}

void ConditionalTable::validate() const {
    for (int k = 0; k < kStateCount; ++k) {
        double s = 0.0;
        for (int i = 0; i < kStateCount; ++i) {
            for (int j = 0; j < 2; ++j) {
                const double v = at(i, j, k);
                if (!(v >= 0.0 && v <= 1.0)) {
                    throw InvalidParameter("table entry P(" + state_label(i) + "_s," + std::to_string(j) + "_m|" +
                                           state_label(k) + "_s) outside [0, 1]");
                }
                s += v;
            }
        }
        if (std::abs(s - 1.0) > 1e-9) {
            throw InvalidParameter("table row for prepared state " + state_label(k) + " sums to " +
                                   std::to_string(s));
        }
    }
}

QndDecomposition qnd_fidelity(const ConditionalTable &t) {
    t.validate();
    QndDecomposition d;
    d.q = 0.5 * (t.at(1, 1, 1) + t.at(0, 0, 0));
    d.eps_assign = 0.5 * (t.at(0, 1, 0) + t.at(1, 0, 1));
    d.eps_trans_bitflip = 0.5 * (t.post_state(1, 0) + t.post_state(0, 1));
    for (int j = 2; j < kStateCount; ++j) d.eps_trans_leakage += 0.5 * (t.post_state(j, 0) + t.post_state(j, 1));
    d.eps_trans = d.eps_trans_bitflip + d.eps_trans_leakage;
    return d;
}

double readout_fidelity(const ConditionalTable &t) {
    t.validate();
    return 0.5 * (t.outcome(0, 0) + t.outcome(1, 1));
}

RepeatTable compose_repeat(const ConditionalTable &t) {
    t.validate();
    RepeatTable r;
    for (int k = 0; k < 2; ++k) {
        for (int j1 = 0; j1 < 2; ++j1) {
            const double first = t.outcome(j1, k);
            if (first <= 0.0) {
                r.at(0, j1, k) = r.at(1, j1, k) = std::nan("");
                continue;
            }
            for (int j2 = 0; j2 < 2; ++j2) {
                double joint = 0.0;
                for (int s = 0; s < kStateCount; ++s) joint += t.at(s, j1, k) * t.outcome(j2, s);
                r.at(j2, j1, k) = joint / first;
            }
        }
    }
    return r;
}

double repeatability(const RepeatTable &t) {
    for (int k = 0; k < 2; ++k) {
        const double s = t.at(0, k, k) + t.at(1, k, k);
        if (!(t.at(0, k, k) >= 0.0) || !(t.at(1, k, k) >= 0.0) || !(std::abs(s - 1.0) <= 1e-9)) {
            throw InvalidParameter("two-measurement table row for outcome " + std::to_string(k) + " after prepared " +
                                   std::to_string(k) + " is missing or malformed");
        }
    }
    return 0.5 * (t.at(0, 0, 0) + t.at(1, 1, 1));
}

SequenceEvents classify_sequence(int prepared, const std::vector<std::uint8_t> &outcomes) {
    SequenceEvents ev;
    int ref = prepared;
    const std::size_t n = outcomes.size();
    for (std::size_t i = 0; i < n; ++i) {
        const int o = outcomes[i];
        if (o == ref) continue;
        if (i + 1 == n || outcomes[i + 1] == o) {
            ++ev.transition;
            ref = o;
        } else {
            ++ev.assignment;
        }
    }
    return ev;
}

ExpectedEvents expected_events(double a, double b, int length) {
    if (length < 1) throw InvalidParameter("sequence length must be positive");
    // w[s][o][r]: true state, outcome at the current position, reference before it.
    double w[2][2][2] = {};
    const double ps[2] = {1.0 - b, b};
    const double po[2] = {1.0 - a, a};
    for (int f = 0; f < 2; ++f) {
        for (int e = 0; e < 2; ++e) w[f][f ^ e][0] += ps[f] * po[e];
    }
    ExpectedEvents out;
    for (int i = 0; i + 1 < length; ++i) {
        double next[2][2][2] = {};
        for (int s = 0; s < 2; ++s) {
            for (int o = 0; o < 2; ++o) {
                for (int r = 0; r < 2; ++r) {
                    const double base = w[s][o][r];
                    if (base == 0.0) continue;
                    for (int f = 0; f < 2; ++f) {
                        const int s2 = s ^ f;
                        for (int e = 0; e < 2; ++e) {
                            const int o2 = s2 ^ e;
                            const double p = base * ps[f] * po[e];
                            int r2 = r;
                            if (o != r) {
                                if (o2 == o) {
                                    out.transition += p;
                                    r2 = o;
                                } else {
                                    out.assignment += p;
                                }
                            }
                            next[s2][o2][r2] += p;
                        }
                    }
                }
            }
        }
        std::copy(&next[0][0][0], &next[0][0][0] + 8, &w[0][0][0]);
    }
    for (int s = 0; s < 2; ++s) {
        for (int r = 0; r < 2; ++r) out.transition += w[s][1 - r][r];
    }
    return out;
}

namespace {

void check_record(const ShotRecord &r, std::size_t length) {
    if (r.prepared != 0 && r.prepared != 1) throw InvalidParameter("prepared state must be 0 or 1");
    if (r.pre_leak < 0 || r.pre_leak >= kStateCount || r.post_leak < 0 || r.post_leak >= kStateCount) {
        throw InvalidParameter("leakage label out of range");
    }
    if (r.outcomes.size() != length) throw InvalidParameter("records have different sequence lengths");
    for (std::uint8_t o : r.outcomes) {
        if (o > 1) throw InvalidParameter("outcomes must be 0 or 1");
    }
}

struct Counts {
    std::uint64_t discarded = 0;
    std::uint64_t leaked = 0;
    std::uint64_t clean = 0;
    std::uint64_t assignment = 0;
    std::uint64_t transition = 0;

    void merge(const Counts &o) {
        discarded += o.discarded;
        leaked += o.leaked;
        clean += o.clean;
        assignment += o.assignment;
        transition += o.transition;
    }
};

// Newton solve of expected_events(a, b) = (m_a, m_t) with a finite-difference Jacobian.
Eigen::Matrix2d invert_events(double m_a, double m_t, int length, Eigen::Vector2d &x) {
    const double n = length;
    x = Eigen::Vector2d(m_a / n, std::max(0.0, (m_t - m_a / n) / n));
    Eigen::Matrix2d jac = Eigen::Matrix2d::Identity() * n;
    auto eval = [&](const Eigen::Vector2d &v) {
        const ExpectedEvents e = expected_events(v(0), v(1), length);
        return Eigen::Vector2d(e.assignment, e.transition);
    };
    const Eigen::Vector2d target(m_a, m_t);
    for (int it = 0; it < 50; ++it) {
        const Eigen::Vector2d f = eval(x);
        for (int c = 0; c < 2; ++c) {
            Eigen::Vector2d dx = Eigen::Vector2d::Zero();
            dx(c) = 1e-7;
            jac.col(c) = (eval(x + dx) - eval(x - dx)) / 2e-7;
        }
        const Eigen::Vector2d step = jac.fullPivLu().solve(target - f);
        x += step;
        if (step.cwiseAbs().maxCoeff() < 1e-15) break;
    }
    return jac;
}

}  // namespace

ErrorTally classify_records(const std::vector<ShotRecord> &records, int workers) {
    if (records.empty()) throw InvalidParameter("no records to classify");
    const std::size_t length = records.front().outcomes.size();
    if (length == 0) throw InvalidParameter("records have no outcomes");

    constexpr std::size_t kChunk = 4096;
    const std::size_t chunks = (records.size() + kChunk - 1) / kChunk;
    std::vector<Counts> partial(chunks);
    parallel_for(chunks, workers, [&](std::size_t c) {
        Counts &acc = partial[c];
        const std::size_t end = std::min(records.size(), (c + 1) * kChunk);
        for (std::size_t i = c * kChunk; i < end; ++i) {
            const ShotRecord &r = records[i];
            check_record(r, length);
            if (is_leaked(r.pre_leak)) {
                ++acc.discarded;
            } else if (is_leaked(r.post_leak)) {
                ++acc.leaked;
            } else {
                ++acc.clean;
                const SequenceEvents ev = classify_sequence(r.prepared, r.outcomes);
                acc.assignment += static_cast<std::uint64_t>(ev.assignment);
                acc.transition += static_cast<std::uint64_t>(ev.transition);
            }
        }
    });
    Counts total;
    for (const Counts &c : partial) total.merge(c);

    ErrorTally t;
    t.sequence_length = static_cast<int>(length);
    t.records = records.size();
    t.discarded = total.discarded;
    t.leaked_sequences = total.leaked;
    t.clean_sequences = total.clean;
    t.assignment_events = total.assignment;
    t.transition_events = total.transition;
    if (total.discarded == records.size()) throw InvalidParameter("every record starts from a leaked state");

    const double n = static_cast<double>(length);
    const double kept = static_cast<double>(total.leaked + total.clean);
    const double p_seq = static_cast<double>(total.leaked) / kept;
    t.eps_trans_leakage = p_seq / n;
    t.sigma_trans_leakage = std::sqrt(p_seq * (1.0 - p_seq) / kept) / n;
    if (total.clean == 0) throw InvalidParameter("every kept record leaked; bit-flip and assignment rates are undefined");

    const double clean = static_cast<double>(total.clean);
    const double slots = clean * n;
    const double pa = static_cast<double>(total.assignment) / slots;
    const double pt = static_cast<double>(total.transition) / slots;
    Eigen::Vector2d x;
    const Eigen::Matrix2d jac = invert_events(pa * n, pt * n, t.sequence_length, x);
    Eigen::Matrix2d obs = Eigen::Matrix2d::Zero();
    obs(0, 0) = n * n * pa * (1.0 - pa) / slots;
    obs(1, 1) = n * n * pt * (1.0 - pt) / slots;
    const Eigen::Matrix2d inv = jac.inverse();
    const Eigen::Matrix2d cov = inv * obs * inv.transpose();

    // Leak-free sequences see the flip probability conditioned on no leak in that step.
    const double q_leak = 1.0 - std::pow(1.0 - p_seq, 1.0 / n);
    t.eps_assign = std::clamp(x(0), 0.0, 1.0);
    t.eps_trans_bitflip = std::clamp(x(1) * (1.0 - q_leak), 0.0, 1.0);
    t.sigma_assign = std::sqrt(std::max(0.0, cov(0, 0)));
    t.sigma_trans_bitflip = std::sqrt(std::max(0.0, cov(1, 1))) * (1.0 - q_leak);
    return t;
}

void SynthRates::validate() const {
    auto check = [](double v, const char *name) {
        if (!(v >= 0.0 && v <= 1.0)) throw InvalidParameter(std::string(name) + " must lie in [0, 1]");
    };
    check(assign, "assign");
    check(bitflip, "bitflip");
    check(initial_leakage, "initial_leakage");
    if (sequence_length < 1) throw InvalidParameter("sequence_length must be positive");
    if (!(leakage >= 0.0 && leakage * sequence_length <= 1.0)) {
        throw InvalidParameter("leakage times sequence_length must lie in [0, 1]");
    }
    const double q = 1.0 - std::pow(1.0 - leakage * sequence_length, 1.0 / sequence_length);
    if (q + bitflip > 1.0) throw InvalidParameter("per-measurement leak and bit-flip probabilities exceed 1");
}

namespace {

double uniform(std::mt19937_64 &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// splitmix64 finalizer, used to spread (seed, index) over the generator seed space.
std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

ShotRecord draw_record(const SynthRates &rates, double q_leak, std::uint64_t seed, std::uint64_t index) {
    std::mt19937_64 rng(mix64(mix64(seed) ^ index));
    ShotRecord r;
    r.prepared = static_cast<int>(index & 1u);
    r.outcomes.resize(static_cast<std::size_t>(rates.sequence_length));
    int state = r.prepared;
    int sticky = 0;
    if (uniform(rng) < rates.initial_leakage) {
        state = 2;
        sticky = uniform(rng) < 0.5 ? 0 : 1;
        r.pre_leak = 2;
    } else {
        r.pre_leak = 0;
    }
    for (auto &o : r.outcomes) {
        const double u = uniform(rng);
        if (state < 2) {
            if (u < q_leak) {
                state = 2;
                sticky = uniform(rng) < 0.5 ? 0 : 1;
            } else if (u < q_leak + rates.bitflip) {
                state ^= 1;
            }
        }
        if (state >= 2) {
            o = static_cast<std::uint8_t>(sticky);
        } else {
            o = static_cast<std::uint8_t>(uniform(rng) < rates.assign ? state ^ 1 : state);
        }
    }
    r.post_leak = state >= 2 ? state : 0;
    return r;
}

}  // namespace

std::vector<ShotRecord> synthesize_records(const SynthRates &rates, std::uint64_t n_shots, std::uint64_t seed,
                                           int workers) {
    rates.validate();
    const double q_leak = 1.0 - std::pow(1.0 - rates.leakage * rates.sequence_length, 1.0 / rates.sequence_length);
    std::vector<ShotRecord> out(n_shots);
    constexpr std::size_t kChunk = 4096;
    const std::size_t chunks = (n_shots + kChunk - 1) / kChunk;
    parallel_for(chunks, workers, [&](std::size_t c) {
        const std::size_t end = std::min<std::size_t>(n_shots, (c + 1) * kChunk);
        for (std::size_t i = c * kChunk; i < end; ++i) out[i] = draw_record(rates, q_leak, seed, i);
    });
    return out;
}

namespace {

std::string leak_label(int label) { return is_leaked(label) ? state_label(label) : "c"; }

int parse_leak_label(const std::string &text) {
    if (text == "c" || text == "0" || text == "1") return 0;
    const int v = parse_state_label(text);
    return v;
}

}  // namespace

void write_records_csv(std::ostream &out, const std::vector<ShotRecord> &records) {
    const std::size_t length = records.empty() ? kDefaultSequenceLength : records.front().outcomes.size();
    out << "prepared,pre_leak";
    for (std::size_t i = 1; i <= length; ++i) out << ",o" << i;
    out << ",post_leak\n";
    std::string line;
    for (const ShotRecord &r : records) {
        check_record(r, length);
        line.clear();
        line += static_cast<char>('0' + r.prepared);
        line += ',';
        line += leak_label(r.pre_leak);
        for (std::uint8_t o : r.outcomes) {
            line += ',';
            line += static_cast<char>('0' + o);
        }
        line += ',';
        line += leak_label(r.post_leak);
        line += '\n';
        out << line;
    }
}

std::vector<ShotRecord> read_records_csv(std::istream &in) {
    std::vector<ShotRecord> records;
    std::string line;
    std::size_t line_no = 0;
    std::size_t length = 0;
    std::vector<std::string> fields;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        fields.clear();
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (line_no == 1 && !fields.empty() && fields[0] == "prepared") {
            length = fields.size() >= 3 ? fields.size() - 3 : 0;
            continue;
        }
        if (fields.size() < 4) throw InvalidParameter("line " + std::to_string(line_no) + ": too few fields");
        if (length == 0) length = fields.size() - 3;
        if (fields.size() != length + 3) {
            throw InvalidParameter("line " + std::to_string(line_no) + ": expected " + std::to_string(length + 3) +
                                   " fields");
        }
        ShotRecord r;
        try {
            if (fields[0] != "0" && fields[0] != "1") throw InvalidParameter("prepared state must be 0 or 1");
            r.prepared = fields[0][0] - '0';
            r.pre_leak = parse_leak_label(fields[1]);
            r.post_leak = parse_leak_label(fields.back());
            r.outcomes.resize(length);
            for (std::size_t i = 0; i < length; ++i) {
                const std::string &o = fields[i + 2];
                if (o != "0" && o != "1") throw InvalidParameter("outcome must be 0 or 1");
                r.outcomes[i] = static_cast<std::uint8_t>(o[0] - '0');
            }
        } catch (const InvalidParameter &e) {
            throw InvalidParameter("line " + std::to_string(line_no) + ": " + e.what());
        }
        records.push_back(std::move(r));
    }
    return records;
}

}  // namespace hfro
