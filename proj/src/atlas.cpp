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

#include "hfreadout/atlas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hfreadout/errors.hpp"
#include "hfreadout/parallel.hpp"

namespace hfro {

namespace {

constexpr int kTerms = kPolyOrder + 1;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Complex = std::complex<double>;

void check_increasing(const std::vector<double> &v, const char *what) {
    if (v.empty()) throw InvalidParameter(std::string(what) + " axis is empty");
    for (std::size_t k = 1; k < v.size(); ++k) {
        if (!(v[k] > v[k - 1])) throw InvalidParameter(std::string(what) + " axis must be strictly increasing");
    }
}

// Powers x^i y^j for i in 1..4, j in 0..4, in coefficient-row order minus the i = 0 block.
Eigen::RowVectorXd design_row(double x, double y) {
    Eigen::RowVectorXd row(kPolyOrder * kTerms);
    double xi = x;
    for (int i = 1; i <= kPolyOrder; ++i, xi *= x) {
        double yj = 1.0;
        for (int j = 0; j < kTerms; ++j, yj *= y) row[(i - 1) * kTerms + j] = xi * yj;
    }
    return row;
}

struct Sample {
    double x;
    double y;
    int row;
    int column;
    Eigen::VectorXcd residual;  // mode coefficients minus the bare state
};

double scaled_x(const FitScaling &s, double zeta) { return zeta / s.zeta_scale; }
double scaled_y(const FitScaling &s, double omega) {
    return (omega / s.omega_q - s.omega_center) / s.omega_half_width;
}

// Least squares for the i >= 1 coefficient rows. The zeta degree is capped by the
// number of distinct power rows in the data and the omega degree by the number of
// distinct columns minus one; unused terms stay 0.
Eigen::MatrixXcd fit_coefficients(const std::vector<Sample> &samples, int dim) {
    const int ncol = kPolyOrder * kTerms;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(ncol, dim);
    if (samples.empty()) return out;
    std::vector<int> rows, cols;
    for (const Sample &s : samples) {
        if (s.x != 0.0) rows.push_back(s.row);
        cols.push_back(s.column);
    }
    std::sort(rows.begin(), rows.end());
    std::sort(cols.begin(), cols.end());
    const int deg_x = std::min<int>(kPolyOrder, std::unique(rows.begin(), rows.end()) - rows.begin());
    const int deg_y = std::min<int>(kPolyOrder, std::unique(cols.begin(), cols.end()) - cols.begin() - 1);
    Eigen::MatrixXd a(samples.size(), ncol);
    Eigen::MatrixXcd b(samples.size(), dim);
    for (std::size_t r = 0; r < samples.size(); ++r) {
        a.row(r) = design_row(samples[r].x, samples[r].y);
        b.row(r) = samples[r].residual.transpose();
    }
    Eigen::VectorXd norms = a.colwise().norm().transpose();
    std::vector<int> keep;
    for (int c = 0; c < ncol; ++c) {
        if (c / kTerms + 1 <= deg_x && c % kTerms <= deg_y && norms[c] > 0.0) keep.push_back(c);
    }
    if (keep.empty()) return out;
    Eigen::MatrixXd as(a.rows(), keep.size());
    for (std::size_t c = 0; c < keep.size(); ++c) as.col(c) = a.col(keep[c]) / norms[keep[c]];
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(as);
    const Eigen::MatrixXd re = qr.solve(b.real());
    const Eigen::MatrixXd im = qr.solve(b.imag());
    for (std::size_t c = 0; c < keep.size(); ++c) {
        for (int k = 0; k < dim; ++k) {
            out(keep[c], k) = Complex(re(c, k), im(c, k)) / norms[keep[c]];
        }
    }
    return out;
}

// Mode index with the largest squared overlap with ref, plus the overlap.
std::pair<int, double> best_mode(const Eigen::MatrixXcd &modes, const Eigen::VectorXcd &ref) {
    const Eigen::VectorXd w = (modes.adjoint() * ref).cwiseAbs2();
    Eigen::Index best = 0;
    const double value = w.maxCoeff(&best);
    return {static_cast<int>(best), value};
}

}  // namespace

std::string to_string(PowerKind kind) { return kind == PowerKind::zeta ? "zeta" : "stark"; }

PowerKind parse_power_kind(const std::string &name) {
    if (name == "zeta") return PowerKind::zeta;
    if (name == "stark") return PowerKind::stark;
    throw InvalidParameter("unknown power kind '" + name + "'");
}

void GridSpec::validate() const {
    if (n_omega < 1 || n_power < 1) throw InvalidParameter("grid sizes must be positive");
    if (!(omega_min > 0.0) || !(omega_max >= omega_min)) throw InvalidParameter("invalid omega range");
    if (n_omega > 1 && !(omega_max > omega_min)) throw InvalidParameter("omega range is empty");
    if (!(power_min >= 0.0) || !(power_max >= power_min)) throw InvalidParameter("invalid power range");
    if (n_power > 1 && !(power_max > power_min)) throw InvalidParameter("power range is empty");
}

double grid_zeta(PowerKind kind, double power, double omega, double omega_q) {
    if (kind == PowerKind::zeta) return power * omega_q;
    return zeta_from_stark(power * omega_q, omega, omega_q);
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) v[k] = n == 1 ? lo : lo + (hi - lo) * k / (n - 1);
    return v;
}

DriveGrid compute_grid(const ModelFactory &model, std::vector<double> omegas, std::vector<double> powers,
                       PowerKind kind, double omega_q, int dimension, const GridOptions &options) {
    check_increasing(omegas, "omega");
    check_increasing(powers, "power");
    DriveGrid grid;
    grid.omegas = std::move(omegas);
    grid.powers = std::move(powers);
    grid.kind = kind;
    grid.omega_q = omega_q;
    grid.dimension = dimension;
    grid.cells.resize(grid.n_omega() * grid.n_power());
    parallel_for(grid.cells.size(), options.workers, [&](std::size_t idx) {
        FloquetCell &cell = grid.cells[idx];
        cell.omega = grid.omegas[idx % grid.n_omega()];
        try {
            cell.zeta = grid_zeta(kind, grid.powers[idx / grid.n_omega()], cell.omega, omega_q);
            cell.set = floquet_set(model(cell.omega, cell.zeta), options.propagator);
        } catch (const NumericalError &e) {
            cell.failed = true;
            cell.reason = e.what();
        }
    });
    return grid;
}

DriveGrid compute_transmon_grid(const Spectrum &spectrum, const GridSpec &spec, int levels,
                                const GridOptions &options) {
    spec.validate();
    const double wq = spectrum.qubit_frequency();
    std::vector<double> omegas = linspace(spec.omega_min, spec.omega_max, spec.n_omega);
    for (double &w : omegas) w *= wq;
    ModelFactory model = [&spectrum, levels](double omega, double zeta) {
        return PeriodicHamiltonian::driven_transmon(spectrum, DriveParams{omega, zeta}, levels);
    };
    return compute_grid(model, std::move(omegas), linspace(spec.power_min, spec.power_max, spec.n_power),
                        spec.kind, wq, levels, options);
}

Eigen::VectorXcd StarkTrackedState::evaluate_raw(double zeta, double omega) const {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dimension);
    v[level] = 1.0;
    if (coefficients.rows() == 0) return v;
    const Eigen::RowVectorXd row = design_row(scaled_x(scaling, zeta), scaled_y(scaling, omega));
    v += (row.cast<Complex>() * coefficients.bottomRows(kPolyOrder * kTerms)).transpose();
    return v;
}

Eigen::VectorXcd StarkTrackedState::evaluate(double zeta, double omega) const {
    Eigen::VectorXcd v = evaluate_raw(zeta, omega);
    return v / v.norm();
}

StarkTrackedState bare_state(int level, int dimension) {
    if (level < 0 || level >= dimension) throw InvalidParameter("level outside the basis");
    StarkTrackedState s;
    s.level = level;
    s.dimension = dimension;
    s.coefficients = Eigen::MatrixXcd::Zero(kTerms * kTerms, dimension);
    s.coefficients(0, level) = 1.0;
    return s;
}

TrackResult track_states(const DriveGrid &grid, const TrackOptions &options) {
    if (!(options.threshold > 0.0 && options.threshold <= 1.0)) {
        throw InvalidParameter("overlap threshold must lie in (0, 1]");
    }
    if (options.windows < 1) throw InvalidParameter("at least one window is required");
    const int dim = grid.dimension;
    const std::size_t nw = grid.n_omega();
    const std::size_t np = grid.n_power();
    const int windows = std::min<int>(options.windows, static_cast<int>(np));

    FitScaling scaling;
    scaling.omega_q = grid.omega_q;
    double zmax = 0.0;
    for (const auto &c : grid.cells) zmax = std::max(zmax, c.zeta);
    scaling.zeta_scale = zmax > 0.0 ? zmax : 1.0;
    const double lo = grid.omegas.front() / grid.omega_q;
    const double hi = grid.omegas.back() / grid.omega_q;
    scaling.omega_center = 0.5 * (lo + hi);
    scaling.omega_half_width = hi > lo ? 0.5 * (hi - lo) : 1.0;

    std::vector<int> bounds;
    for (int w = 0; w <= windows; ++w) bounds.push_back(static_cast<int>((w * np) / windows));

    const std::size_t nl = options.levels.size();
    TrackResult result;
    std::vector<std::vector<Sample>> samples(nl);
    for (int level : options.levels) {
        StarkTrackedState s = bare_state(level, dim);
        s.scaling = scaling;
        s.window_boundaries = bounds;
        s.status.assign(grid.cells.size(), kCellBelowThreshold);
        result.states.push_back(std::move(s));
    }

    std::vector<int> label(nl);
    std::vector<Eigen::VectorXcd> picked(nl);
    for (int w = 0; w < windows; ++w) {
        for (int p = bounds[w]; p < bounds[w + 1]; ++p) {
            for (std::size_t o = 0; o < nw; ++o) {
                const std::size_t idx = static_cast<std::size_t>(p) * nw + o;
                const FloquetCell &cell = grid.cells[idx];
                if (cell.failed) {
                    for (auto &s : result.states) s.status[idx] = kCellFailed;
                    continue;
                }
                for (std::size_t l = 0; l < nl; ++l) {
                    StarkTrackedState &s = result.states[l];
                    const Eigen::VectorXcd ref = s.evaluate(cell.zeta, cell.omega);
                    const auto [mode, overlap] = best_mode(cell.set.modes, ref);
                    label[l] = -1;
                    if (overlap < options.threshold) continue;
                    label[l] = mode;
                    const Complex phase = ref.dot(cell.set.modes.col(mode));
                    picked[l] = cell.set.modes.col(mode) * (std::conj(phase) / std::abs(phase));
                }
                for (std::size_t l = 0; l < nl; ++l) {
                    if (label[l] < 0) continue;
                    bool clash = false;
                    for (std::size_t m = 0; m < nl; ++m) {
                        if (m != l && label[m] == label[l]) {
                            clash = true;
                            if (m > l) {
                                result.collisions.push_back(
                                    {idx, options.levels[l], options.levels[m], label[l]});
                            }
                        }
                    }
                    if (clash) {
                        result.states[l].status[idx] = kCellCollision;
                        continue;
                    }
                    Sample smp{scaled_x(scaling, cell.zeta), scaled_y(scaling, cell.omega), p, static_cast<int>(o),
                               picked[l]};
                    smp.residual[options.levels[l]] -= 1.0;
                    samples[l].push_back(std::move(smp));
                    result.states[l].status[idx] = kCellIncluded;
                }
            }
        }
        for (std::size_t l = 0; l < nl; ++l) {
            result.states[l].coefficients.bottomRows(kPolyOrder * kTerms) = fit_coefficients(samples[l], dim);
        }
    }

    for (std::size_t l = 0; l < nl; ++l) {
        StarkTrackedState &s = result.states[l];
        double sq = 0.0;
        for (const Sample &smp : samples[l]) {
            const Eigen::RowVectorXd row = design_row(smp.x, smp.y);
            const Eigen::VectorXcd fit =
                (row.cast<Complex>() * s.coefficients.bottomRows(kPolyOrder * kTerms)).transpose();
            sq += (fit - smp.residual).squaredNorm();
        }
        s.fit_residual = samples[l].empty() ? 0.0 : std::sqrt(sq / samples[l].size());
    }
    return result;
}

std::size_t HybridizationMap::count_above(double value) const {
    return static_cast<std::size_t>(
        std::count_if(theta.begin(), theta.end(), [value](double t) { return t > value; }));
}

std::size_t HybridizationMap::lost_count() const {
    return static_cast<std::size_t>(std::count(status.begin(), status.end(), kMapLost));
}

HybridizationMap hybridization_map(const DriveGrid &grid, const StarkTrackedState &tracked) {
    if (tracked.dimension != grid.dimension) throw InvalidParameter("tracked state does not match the grid basis");
    HybridizationMap map;
    map.level = tracked.level;
    map.n_power = grid.n_power();
    map.n_omega = grid.n_omega();
    const std::size_t n = grid.cells.size();
    map.theta.assign(n, kNaN);
    map.dominant.assign(n, -1);
    map.status.assign(n, kMapOk);
    for (std::size_t idx = 0; idx < n; ++idx) {
        const FloquetCell &cell = grid.cells[idx];
        if (cell.failed) {
            map.status[idx] = kMapFailed;
            continue;
        }
        const Eigen::VectorXcd ref = tracked.evaluate(cell.zeta, cell.omega);
        const auto [mode, overlap] = best_mode(cell.set.modes, ref);
        if (overlap < kLostOverlap) {
            map.status[idx] = kMapLost;
            continue;
        }
        const double theta = std::clamp(1.0 - overlap, 0.0, 1.0);
        map.theta[idx] = theta;
        if (theta < 1e-6) continue;
        const Eigen::VectorXcd psi = cell.set.modes.col(mode);
        const Eigen::VectorXcd rest = psi - ref * ref.dot(psi);
        double best = -1.0;
        for (int k = 2; k < rest.size(); ++k) {
            if (std::norm(rest[k]) > best) {
                best = std::norm(rest[k]);
                map.dominant[idx] = k;
            }
        }
    }
    return map;
}

std::vector<ResonanceEntry> resonance_condition_scan(const Spectrum &spectrum, double band_lo,
                                                     double band_hi, const std::vector<int> &initial) {
    if (!(band_hi >= band_lo)) throw InvalidParameter("empty resonance band");
    std::vector<ResonanceEntry> out;
    for (int i : initial) {
        for (int j = i + 1; j < spectrum.levels(); ++j) {
            const double w = spectrum.transition(j, i);
            if (w >= band_lo && w <= band_hi) out.push_back({spectrum.params().n_g(), i, j, w});
        }
    }
    return out;
}

std::vector<ResonanceEntry> resonance_condition_scan(const TransmonParams &params,
                                                     const std::vector<double> &n_g_list, double band_lo,
                                                     double band_hi, const std::vector<int> &initial) {
    std::vector<ResonanceEntry> out;
    for (double n_g : n_g_list) {
        const auto part = resonance_condition_scan(diagonalize(params.with_n_g(n_g)), band_lo, band_hi, initial);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

namespace {

struct PairProbe {
    double gap = 0.0;
    double third = 0.0;  // largest weight of any other mode in span{r_i, r_j}
    double theta = 0.0;  // 1 - max |<r_i|Phi>|^2
};

class TransitionProbe {
  public:
    TransitionProbe(const ModelFactory &model, int dim, int i, int j, double zeta, double lo, double hi,
                    const TransitionOptions &options)
        : model_(model), dim_(dim), i_(i), j_(j), zeta_(zeta), lo_(lo), hi_(hi), options_(options) {
        ri_lo_ = edge_reference(lo, i);
        rj_lo_ = edge_reference(lo, j);
        ri_hi_ = edge_reference(hi, i);
        rj_hi_ = edge_reference(hi, j);
    }

    PairProbe operator()(double omega) const {
        const FloquetSet set = floquet_set(model_(omega, zeta_), options_.propagator);
        const double t = (omega - lo_) / (hi_ - lo_);
        const Eigen::VectorXcd ri = blend(ri_lo_, ri_hi_, t);
        const Eigen::VectorXcd rj = blend(rj_lo_, rj_hi_, t);
        const Eigen::VectorXd wi = (set.modes.adjoint() * ri).cwiseAbs2();
        const Eigen::VectorXd wj = (set.modes.adjoint() * rj).cwiseAbs2();
        const Eigen::VectorXd w = wi + wj;
        std::vector<int> order(w.size());
        std::iota(order.begin(), order.end(), 0);
        std::partial_sort(order.begin(), order.begin() + std::min<Eigen::Index>(3, w.size()), order.end(),
                          [&](int a, int b) { return w[a] > w[b] || (w[a] == w[b] && a < b); });
        PairProbe p;
        const double d = std::abs(set.quasienergies[order[0]] - set.quasienergies[order[1]]);
        p.gap = std::min(d, omega - d);
        p.third = w.size() > 2 ? w[order[2]] : 0.0;
        p.theta = 1.0 - wi.maxCoeff();
        return p;
    }

    /// Level-i reference with the admixture of the (i, j) crossing removed from the edge modes.
    Eigen::VectorXcd pinned_reference(double gap_min) const {
        auto angle = [&](double edge) {
            const double gap = (*this)(edge).gap;
            const double detuning = std::sqrt(std::max(gap * gap - gap_min * gap_min, 0.0));
            return 0.5 * std::atan2(gap_min, detuning);
        };
        const double a_lo = angle(lo_);
        const double a_hi = angle(hi_);
        Eigen::VectorXcd v = std::sin(a_hi) * ri_lo_ + std::sin(a_lo) * ri_hi_;
        if (v.norm() == 0.0) v = ri_lo_ + ri_hi_;
        return v / v.norm();
    }

    double theta_against(double omega, const Eigen::VectorXcd &reference) const {
        const FloquetSet set = floquet_set(model_(omega, zeta_), options_.propagator);
        return 1.0 - (set.modes.adjoint() * reference).cwiseAbs2().maxCoeff();
    }

  private:
    Eigen::VectorXcd edge_reference(double omega, int level) const {
        const FloquetSet set = floquet_set(model_(omega, zeta_), options_.propagator);
        Eigen::Index best = 0;
        set.modes.row(level).cwiseAbs2().maxCoeff(&best);
        Eigen::VectorXcd v = set.modes.col(best);
        const Complex c = v[level];
        return v * (std::conj(c) / std::abs(c));
    }

    static Eigen::VectorXcd blend(const Eigen::VectorXcd &a, const Eigen::VectorXcd &b, double t) {
        Eigen::VectorXcd v = (1.0 - t) * a + t * b;
        return v / v.norm();
    }

    const ModelFactory &model_;
    int dim_;
    int i_, j_;
    double zeta_;
    double lo_, hi_;
    TransitionOptions options_;
    Eigen::VectorXcd ri_lo_, rj_lo_, ri_hi_, rj_hi_;
};

// Golden-section minimum of f on [a, b].
template <typename F>
double golden_minimum(F &&f, double a, double b, double tol) {
    constexpr double r = 0.61803398874989484820;
    double c = b - r * (b - a);
    double d = a + r * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (std::abs(b - a) > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

double two_level_profile(double omega, double center, double amplitude, double slope) {
    return two_level_oracle(2.0 * amplitude, slope * (omega - center)).theta;
}

// Least-squares fit of (center, amplitude) to theta samples by damped Gauss-Newton.
// slope converts drive detuning into the Stark-shifted level detuning.
std::pair<double, double> fit_profile(const std::vector<double> &w, const std::vector<double> &th,
                                      double center, double amplitude, double slope) {
    auto cost = [&](double c, double a) {
        double s = 0.0;
        for (std::size_t k = 0; k < w.size(); ++k) {
            const double r = two_level_profile(w[k], c, a, slope) - th[k];
            s += r * r;
        }
        return s;
    };
    double lambda = 1e-3;
    double current = cost(center, amplitude);
    for (int iter = 0; iter < 200; ++iter) {
        Eigen::Matrix2d jtj = Eigen::Matrix2d::Zero();
        Eigen::Vector2d jtr = Eigen::Vector2d::Zero();
        const double hc = 1e-6 * amplitude;
        const double ha = 1e-6 * amplitude;
        for (std::size_t k = 0; k < w.size(); ++k) {
            const double f0 = two_level_profile(w[k], center, amplitude, slope);
            Eigen::Vector2d g;
            g[0] = (two_level_profile(w[k], center + hc, amplitude, slope) - two_level_profile(w[k], center - hc, amplitude, slope)) / (2 * hc);
            g[1] = (two_level_profile(w[k], center, amplitude + ha, slope) - two_level_profile(w[k], center, amplitude - ha, slope)) / (2 * ha);
            jtj += g * g.transpose();
            jtr += g * (f0 - th[k]);
        }
        Eigen::Matrix2d m = jtj;
        m.diagonal() *= 1.0 + lambda;
        const Eigen::Vector2d step = m.ldlt().solve(-jtr);
        const double nc = center + step[0];
        const double na = std::abs(amplitude + step[1]);
        const double trial = cost(nc, na);
        if (trial < current) {
            const bool done = std::abs(step[1]) < 1e-10 * amplitude && std::abs(step[0]) < 1e-10 * amplitude;
            center = nc;
            amplitude = na;
            current = trial;
            lambda *= 0.3;
            if (done) break;
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) break;
        }
    }
    return {center, amplitude};
}

}  // namespace

TransitionAmplitude extract_transition_amplitude(const ModelFactory &model, int dimension, int i, int j,
                                                 double zeta, double omega_lo, double omega_hi,
                                                 const TransitionOptions &options) {
    if (i < 0 || j < 0 || i >= dimension || j >= dimension || i == j) {
        throw InvalidParameter("transition levels outside the basis");
    }
    if (!(omega_hi > omega_lo) || !(omega_lo > 0.0)) throw InvalidParameter("invalid omega window");
    if (options.coarse_points < 5) throw InvalidParameter("coarse scan needs at least 5 points");
    TransitionAmplitude out;
    out.initial = i;
    out.final_level = j;
    out.zeta = zeta;

    const TransitionProbe probe(model, dimension, i, j, zeta, omega_lo, omega_hi, options);
    const std::vector<double> grid = linspace(omega_lo, omega_hi, options.coarse_points);
    std::vector<double> gaps(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) gaps[k] = probe(grid[k]).gap;
    const std::size_t kmin = static_cast<std::size_t>(std::min_element(gaps.begin(), gaps.end()) - gaps.begin());

    int minima = 0;
    for (std::size_t k = 1; k + 1 < gaps.size(); ++k) {
        if (gaps[k] < gaps[k - 1] && gaps[k] <= gaps[k + 1]) ++minima;
    }
    if (kmin == 0 || kmin + 1 == grid.size()) {
        out.ill_defined = true;
        out.reason = "no crossing inside the scanned window";
        return out;
    }
    if (minima > 1) {
        out.ill_defined = true;
        out.reason = "several resonances cross the scanned window";
        return out;
    }

    auto gap_at = [&](double w) { return probe(w).gap; };
    const double wstar = golden_minimum(gap_at, grid[kmin - 1], grid[kmin + 1], options.search_tol * grid[kmin]);
    const PairProbe at_min = probe(wstar);
    out.omega_star = wstar;
    out.omega_gap = 0.5 * at_min.gap;
    if (at_min.third > options.crowding) {
        out.ill_defined = true;
        out.reason = "a third mode participates in the crossing";
        return out;
    }

    const Eigen::VectorXcd reference = probe.pinned_reference(at_min.gap);
    std::vector<double> ws;
    std::vector<double> th;
    double slope_sum = 0.0;
    int slope_count = 0;
    for (int k = -12; k <= 12; ++k) {
        const double w = wstar + out.omega_gap * 0.5 * k;
        const PairProbe pk = probe(w);
        ws.push_back(w);
        th.push_back(probe.theta_against(w, reference));
        if (std::abs(k) >= 8) {
            const double split = pk.gap * pk.gap - at_min.gap * at_min.gap;
            slope_sum += std::sqrt(std::max(split, 0.0)) / std::abs(w - wstar);
            ++slope_count;
        }
    }
    const double slope = slope_count > 0 && slope_sum > 0.0 ? slope_sum / slope_count : 1.0;
    out.omega_fit = fit_profile(ws, th, wstar, out.omega_gap, slope).second;
    return out;
}

TransitionAmplitude extract_transition_amplitude(const Spectrum &spectrum, int i, int j, double zeta,
                                                 double omega_lo, double omega_hi,
                                                 const TransitionOptions &options) {
    ModelFactory model = [&spectrum, &options](double omega, double z) {
        return PeriodicHamiltonian::driven_transmon(spectrum, DriveParams{omega, z}, options.levels);
    };
    TransitionAmplitude out = extract_transition_amplitude(model, options.levels, i, j, zeta, omega_lo,
                                                           omega_hi, options);
    out.low_power = 0.5 * zeta * charge_matrix_element(spectrum, i, j);
    return out;
}

}  // namespace hfro
