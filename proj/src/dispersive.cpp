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

#include "hfreadout/dispersive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hfreadout/errors.hpp"
#include "hfreadout/parallel.hpp"

namespace hfro {

namespace {

double check_finite_positive(double v, const char *what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidParameter(std::string(what) + " must be positive");
    return v;
}

// One term of the second-order pull sum for level n through level m, without the g^2/N_zpf^2 prefactor.
double pull_term(const Spectrum &s, int n, int m, double w) {
    const double e = s.transition(n, m);
    const double nm = s.charge_element(n, m);
    return nm * nm * 2.0 * e / (e * e - w * w);
}

double pull_prefactor(const Spectrum &s, const ReadoutCoupling &c) {
    const double n_zpf = zero_point_scales(s.params()).n_zpf;
    return c.g() * c.g() / (n_zpf * n_zpf);
}

}  // namespace

ReadoutCoupling::ReadoutCoupling(double g, double omega_r_bare) : g_(g), omega_r_bare_(omega_r_bare) {
    if (!(g >= 0.0) || !std::isfinite(g)) throw InvalidParameter("g must be non-negative");
    check_finite_positive(omega_r_bare, "omega_r_bare");
}

std::string to_string(ShiftMethod method) {
    switch (method) {
        case ShiftMethod::full_sum: return "full_sum";
        case ShiftMethod::high_freq: return "high_freq";
        case ShiftMethod::rwa: return "rwa";
    }
    return "unknown";
}

ShiftMethod parse_shift_method(const std::string &name) {
    if (name == "full_sum") return ShiftMethod::full_sum;
    if (name == "high_freq") return ShiftMethod::high_freq;
    if (name == "rwa") return ShiftMethod::rwa;
    throw InvalidParameter("unknown shift method '" + name + "'");
}

int levels_inside_well(const Spectrum &spectrum) {
    const double top = 2.0 * spectrum.params().e_j();
    const auto &e = spectrum.energies();
    int count = 0;
    while (count < spectrum.levels() && e[count] - e[0] < top) ++count;
    return count;
}

int default_sum_cutoff(const Spectrum &spectrum) {
    return std::clamp(3 * levels_inside_well(spectrum), 2, spectrum.levels());
}

double chi_n_full(const Spectrum &spectrum, const ReadoutCoupling &coupling, int n, int m_max) {
    if (m_max > spectrum.levels() || n < 0 || n >= m_max) {
        throw InvalidParameter("chi_n_full needs 0 <= n < m_max <= levels");
    }
    const double w = coupling.omega_r_bare();
    double sum = 0.0;
    for (int m = 0; m < m_max; ++m) {
        if (m == n) continue;
        const double e = std::abs(spectrum.transition(n, m));
        if (std::abs(e - w) < kPoleGuard * w) throw DivergenceError(n, m);
        sum += pull_term(spectrum, n, m, w);
    }
    return pull_prefactor(spectrum, coupling) * sum;
}

ShiftReport shift_full(const Spectrum &spectrum, const ReadoutCoupling &coupling, int levels,
                       int m_max) {
    if (levels < 2 || levels > m_max) throw InvalidParameter("shift_full needs 2 <= levels <= m_max");
    ShiftReport report;
    report.method = ShiftMethod::full_sum;
    for (int n = 0; n < levels; ++n) report.chi_n.push_back(chi_n_full(spectrum, coupling, n, m_max));
    report.chi = report.chi_n[1] - report.chi_n[0];
    return report;
}

double chi_high_freq(const Spectrum &spectrum, const ReadoutCoupling &coupling) {
    const double w = coupling.omega_r_bare();
    const double e10 = spectrum.transition(1, 0);
    const double e21 = spectrum.transition(2, 1);
    if (std::abs(w - e10) < 0.01 * e10 || std::abs(w - e21) < 0.01 * e21) {
        throw PoleError("resonator within 1% of E_10 or E_21");
    }
    const double g = coupling.g();
    const double w2 = w * w;
    return -8.0 * spectrum.params().e_c() * g * g * w2 / ((w2 - e10 * e10) * (w2 - e21 * e21));
}

double chi_rwa_at(double e_c, double g, double delta) {
    const double d = delta * (delta - e_c);
    if (delta == 0.0 || d == 0.0) throw PoleError("rwa shift is singular at Delta = 0 or Delta = E_C");
    return -2.0 * e_c * g * g / d;
}

double chi_rwa(const Spectrum &spectrum, const ReadoutCoupling &coupling) {
    return chi_rwa_at(spectrum.params().e_c(), coupling.g(),
                      spectrum.qubit_frequency() - coupling.omega_r_bare());
}

double chi0_high_freq(const Spectrum &spectrum, const ReadoutCoupling &coupling) {
    const double r = coupling.g() / coupling.omega_r_bare();
    return 2.0 * spectrum.qubit_frequency() * r * r;
}

bool high_frequency_regime(const Spectrum &spectrum, const ReadoutCoupling &coupling) {
    return coupling.omega_r_bare() >= 5.0 * spectrum.qubit_frequency();
}

double coupling_from_eta(double eta, double omega_q, double omega_r_bare) {
    if (!(eta > 0.0 && eta < 1.0)) throw InvalidParameter("eta must lie in (0, 1)");
    check_finite_positive(omega_q, "omega_q");
    check_finite_positive(omega_r_bare, "omega_r_bare");
    return 0.5 * eta * std::sqrt(omega_q * omega_r_bare);
}

double eta_from_coupling(double g, double omega_q, double omega_r_bare) {
    check_finite_positive(g, "g");
    check_finite_positive(omega_q, "omega_q");
    check_finite_positive(omega_r_bare, "omega_r_bare");
    const double eta = 2.0 * g / std::sqrt(omega_q * omega_r_bare);
    if (!(eta < 1.0)) throw InvalidParameter("coupling implies eta >= 1");
    return eta;
}

double linear_circuit_frequency(const TransmonParams &params) {
    return std::sqrt(8.0 * params.e_j() * params.e_c());
}

double dressed_resonator_frequency(const Spectrum &spectrum, const ReadoutCoupling &coupling,
                                   int n, int m_max) {
    return coupling.omega_r_bare() + chi_n_full(spectrum, coupling, n, m_max);
}

std::vector<RatioPoint> resonance_ratio_scan(const TransmonParams &params, double eta,
                                             std::span<const double> omega_range,
                                             const RatioScanOptions &options) {
    for (std::size_t i = 1; i < omega_range.size(); ++i) {
        if (!(omega_range[i] > omega_range[i - 1])) throw InvalidParameter("omega_range must increase");
    }
    const std::size_t npts = omega_range.size();
    std::vector<Spectrum> spectra;
    for (double n_g : options.n_g_list) spectra.push_back(diagonalize(params.with_n_g(n_g)));
    const double omega_lin = linear_circuit_frequency(params);

    std::vector<RatioPoint> rows(spectra.size() * npts);
    // Per-point visibility of each (n, m) term, used for pole-crossing flags.
    std::vector<std::vector<double>> weight(rows.size());

    parallel_for(rows.size(), options.workers, [&](std::size_t idx) {
        const Spectrum &s = spectra[idx / npts];
        const double w = omega_range[idx % npts];
        RatioPoint &p = rows[idx];
        p.omega_r_bare = w;
        p.n_g = s.params().n_g();
        const ReadoutCoupling c(coupling_from_eta(eta, omega_lin, w), w);
        const int m_max = default_sum_cutoff(s);
        p.chi_rwa = chi_rwa(s, c);
        try {
            p.chi_full = chi_n_full(s, c, 1, m_max) - chi_n_full(s, c, 0, m_max);
            p.ratio = p.chi_full / p.chi_rwa;
        } catch (const DivergenceError &e) {
            p.chi_full = std::numeric_limits<double>::quiet_NaN();
            p.ratio = std::numeric_limits<double>::quiet_NaN();
            p.flags |= kScanDivergent;
            p.resonant_level = e.m();
            return;
        }
        auto &wt = weight[idx];
        wt.assign(2 * static_cast<std::size_t>(m_max), 0.0);
        const double pref = pull_prefactor(s, c);
        for (int n = 0; n < 2; ++n) {
            for (int m = 0; m < m_max; ++m) {
                if (m == n) continue;
                wt[n * m_max + m] = std::abs(pref * pull_term(s, n, m, w)) / std::abs(p.chi_full);
            }
        }
    });

    for (std::size_t k = 0; k < spectra.size(); ++k) {
        const Spectrum &s = spectra[k];
        const int m_max = default_sum_cutoff(s);
        for (std::size_t i = 1; i < npts; ++i) {
            RatioPoint &p = rows[k * npts + i];
            const auto &wa = weight[k * npts + i - 1];
            const auto &wb = weight[k * npts + i];
            double best = 0.0;
            for (int n = 0; n < 2; ++n) {
                for (int m = 0; m < m_max; ++m) {
                    if (m == n) continue;
                    const double e = std::abs(s.transition(n, m));
                    if ((e - omega_range[i - 1]) * (e - omega_range[i]) > 0.0) continue;
                    const std::size_t t = static_cast<std::size_t>(n * m_max + m);
                    double vis = std::numeric_limits<double>::infinity();
                    if (!wa.empty() && !wb.empty()) vis = std::max(wa[t], wb[t]);
                    if (vis >= options.visibility && vis > best) {
                        best = vis;
                        p.flags |= kScanPoleCrossed;
                        if (!(p.flags & kScanDivergent)) p.resonant_level = m;
                    }
                }
            }
        }
    }
    return rows;
}

}  // namespace hfro
