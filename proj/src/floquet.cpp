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

#include "hfreadout/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "hfreadout/errors.hpp"

namespace hfro {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kTieGap = 1e-10;
constexpr double kStepPhase = 2.0;
constexpr double kPadeNorm = 1.0;

using Matrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

class MagnusStepper {
  public:
    explicit MagnusStepper(const PeriodicHamiltonian &h)
        : h_(h), v_(h.v()), vd_(h.v().adjoint()), k1_(h.dimension(), h.dimension()),
          k2_(h.dimension(), h.dimension()), m_(h.dimension(), h.dimension()) {}

    // Writes 2 pi H(t) into k.
    void angular_hamiltonian(double t, Matrix &k) const {
        const double phase = kTwoPi * h_.omega() * t;
        const Complex e(std::cos(phase), -std::sin(phase));
        k.noalias() = v_ * e;
        k.noalias() += vd_ * std::conj(e);
        k.diagonal() += h_.h0().cast<Complex>();
        k *= kTwoPi;
    }

    // exp(-i M) for the fourth-order Magnus exponent of [t, t + dt].
    const Matrix &step(double t, double dt) {
        constexpr double c = 0.28867513459481288225;  // sqrt(3) / 6
        angular_hamiltonian(t + dt * (0.5 - c), k1_);
        angular_hamiltonian(t + dt * (0.5 + c), k2_);
        m_.noalias() = (0.5 * dt) * (k1_ + k2_);
        comm_.noalias() = k1_ * k2_;
        comm_.noalias() -= k2_ * k1_;
        m_ += Complex(0.0, 0.5 * c * dt * dt) * comm_;
        // Diagonal Pade(6,6) of exp(-i M / 2^s), squared s times. The approximant
        // q^-1 p has q = p^dagger for Hermitian M, so each factor is unitary.
        const double norm = m_.cwiseAbs().colwise().sum().maxCoeff();
        int squarings = 0;
        if (norm > kPadeNorm) squarings = static_cast<int>(std::ceil(std::log2(norm / kPadeNorm)));
        if (squarings > 0) m_ /= std::ldexp(1.0, squarings);
        m2_.noalias() = m_ * m_;
        m4_.noalias() = m2_ * m2_;
        m6_.noalias() = m4_ * m2_;
        const auto id = Matrix::Identity(m_.rows(), m_.cols());
        even_ = id - m2_ * (5.0 / 44.0) + m4_ * (1.0 / 792.0) - m6_ * (1.0 / 665280.0);
        tmp_ = id * 0.5 - m2_ * (1.0 / 66.0) + m4_ * (1.0 / 15840.0);
        odd_.noalias() = m_ * tmp_;
        num_ = even_ - Complex(0.0, 1.0) * odd_;
        den_ = even_ + Complex(0.0, 1.0) * odd_;
        lu_.compute(den_);
        exp_.noalias() = lu_.solve(num_);
        for (int k = 0; k < squarings; ++k) {
            tmp_.noalias() = exp_ * exp_;
            exp_.swap(tmp_);
        }
        return exp_;
    }

  private:
    const PeriodicHamiltonian &h_;
    Matrix v_;
    Matrix vd_;
    Matrix k1_, k2_, m_, comm_, m2_, m4_, m6_, even_, odd_, tmp_, num_, den_, exp_;
    Eigen::PartialPivLU<Matrix> lu_;
};

Matrix integrate(const PeriodicHamiltonian &h, double t_from, double t_to, int steps) {
    MagnusStepper stepper(h);
    Matrix u = Matrix::Identity(h.dimension(), h.dimension());
    Matrix tmp(h.dimension(), h.dimension());
    const double dt = (t_to - t_from) / steps;
    for (int s = 0; s < steps; ++s) {
        tmp.noalias() = stepper.step(t_from + s * dt, dt) * u;
        u.swap(tmp);
    }
    return u;
}

// Steps giving |2 pi H| dt of about kStepPhase for the integration span.
int initial_steps(const PeriodicHamiltonian &h, double span, int min_steps) {
    const double range = h.h0().maxCoeff() - h.h0().minCoeff();
    const double scale = kTwoPi * (range + 2.0 * h.v().norm()) * span;
    return std::max(min_steps, static_cast<int>(std::ceil(scale / kStepPhase)));
}

int dominant_index(const Eigen::Ref<const Eigen::VectorXcd> &v) {
    Eigen::Index best = 0;
    v.cwiseAbs2().maxCoeff(&best);
    return static_cast<int>(best);
}

}  // namespace

void DriveParams::validate() const {
    if (!(omega > 0.0) || !std::isfinite(omega)) throw InvalidParameter("drive frequency must be positive");
    if (!(zeta >= 0.0) || !std::isfinite(zeta)) throw InvalidParameter("drive amplitude must be non-negative");
}

PeriodicHamiltonian::PeriodicHamiltonian(Eigen::VectorXd h0, Eigen::MatrixXcd v, double omega)
    : h0_(std::move(h0)), v_(std::move(v)), omega_(omega) {
    if (!(omega > 0.0) || !std::isfinite(omega)) throw InvalidParameter("drive frequency must be positive");
    if (v_.rows() != h0_.size() || v_.cols() != h0_.size() || h0_.size() == 0) {
        throw InvalidParameter("drive operator shape does not match h0");
    }
    static_only_ = v_.isZero(0.0);
    time_symmetric_ = v_.imag().isZero(0.0) && v_.real().isApprox(v_.real().transpose(), 0.0);
}

PeriodicHamiltonian PeriodicHamiltonian::driven_transmon(const Spectrum &spectrum,
                                                         const DriveParams &drive, int levels) {
    drive.validate();
    if (levels < 2 || levels > spectrum.levels()) {
        throw InvalidParameter("Floquet truncation of " + std::to_string(levels) +
                               " levels exceeds the validated spectrum");
    }
    Eigen::VectorXd h0 = spectrum.energies().head(levels).array() - spectrum.energies()[0];
    Eigen::MatrixXcd v = (0.5 * drive.zeta * spectrum.charge_matrix(levels)).cast<Complex>();
    return {std::move(h0), std::move(v), drive.omega};
}

PeriodicHamiltonian PeriodicHamiltonian::two_level(double splitting, double a, double omega_d) {
    Eigen::VectorXd h0(2);
    h0 << splitting, 0.0;
    Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(2, 2);
    v(0, 1) = 0.5 * a;
    return {std::move(h0), std::move(v), omega_d};
}

Eigen::MatrixXcd PeriodicHamiltonian::at(double t) const {
    const double phase = kTwoPi * omega_ * t;
    const Complex e(std::cos(phase), -std::sin(phase));
    Eigen::MatrixXcd h = v_ * e + v_.adjoint() * std::conj(e);
    h.diagonal() += h0_.cast<Complex>();
    return h;
}

double unitarity_defect(const Eigen::MatrixXcd &u) {
    Eigen::MatrixXcd d = u.adjoint() * u;
    d.diagonal().array() -= 1.0;
    return d.cwiseAbs().maxCoeff();
}

Eigen::MatrixXcd propagate(const PeriodicHamiltonian &h, double t_from, double t_to, int steps) {
    if (steps < 1) throw InvalidParameter("propagate needs at least one step");
    return integrate(h, t_from, t_to, steps);
}

Propagator one_period_propagator(const PeriodicHamiltonian &h, const PropagatorOptions &options) {
    if (!(options.tol >= 1e-12 && options.tol <= 1e-6)) {
        throw InvalidParameter("propagator tolerance must lie in [1e-12, 1e-6]");
    }
    const double period = h.period();
    const double t0 = options.t0 * period;
    const bool half = h.time_symmetric() && options.t0 == 0.0;
    const double span = half ? 0.5 * period : period;

    auto run = [&](int n) -> Matrix {
        if (!half) return integrate(h, t0, t0 + period, n);
        // H real and even in t: U(T, 0) = U(T/2, 0)^T U(T/2, 0).
        const Matrix uh = integrate(h, 0.0, span, n);
        return uh.transpose() * uh;
    };

    int n = initial_steps(h, span, options.min_steps);
    Matrix coarse = run(n);
    double err = 0.0;
    while (true) {
        if (2 * n > options.max_steps) {
            throw IntegrationFailure("step doubling exceeded " + std::to_string(options.max_steps) +
                                         " steps per period",
                                     unitarity_defect(coarse));
        }
        Matrix fine = run(2 * n);
        err = (fine - coarse).cwiseAbs().maxCoeff();
        n *= 2;
        coarse.swap(fine);
        if (err <= options.tol) break;
    }
    Propagator out;
    out.u = std::move(coarse);
    out.unitarity_defect = unitarity_defect(out.u);
    out.error_estimate = err;
    out.steps = half ? 2 * n : n;
    if (out.unitarity_defect > 10.0 * options.tol) {
        throw IntegrationFailure("propagator lost unitarity", out.unitarity_defect);
    }
    return out;
}

double fold_quasienergy(double e, double omega) {
    double r = e - omega * std::ceil(e / omega - 0.5);
    if (r <= -0.5 * omega) r += omega;
    if (r > 0.5 * omega) r -= omega;
    return r;
}

FloquetSet floquet_modes(const Eigen::MatrixXcd &u, double omega) {
    if (u.rows() != u.cols() || u.rows() == 0) throw InvalidParameter("propagator must be square");
    if (!(omega > 0.0)) throw InvalidParameter("drive frequency must be positive");
    const double defect = unitarity_defect(u);
    if (!(defect <= kMaxInputDefect)) {
        throw InvalidParameter("propagator is not unitary (defect " + std::to_string(defect) + ")");
    }
    const int dim = static_cast<int>(u.rows());
    Eigen::ComplexSchur<Matrix> schur(u);
    if (schur.info() != Eigen::Success) throw NumericalError("Schur decomposition failed");
    const Matrix &q = schur.matrixU();
    const Matrix &t = schur.matrixT();

    std::vector<double> eps(dim);
    std::vector<int> dom(dim);
    for (int k = 0; k < dim; ++k) {
        eps[k] = fold_quasienergy(-omega * std::arg(t(k, k)) / kTwoPi, omega);
        dom[k] = dominant_index(q.col(k));
    }
    std::vector<int> order(dim);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (std::abs(eps[a] - eps[b]) > kTieGap * omega) return eps[a] < eps[b];
        if (dom[a] != dom[b]) return dom[a] < dom[b];
        return a < b;
    });

    FloquetSet out;
    out.modes.resize(dim, dim);
    out.quasienergies.resize(dim);
    out.unitarity_defect = defect;
    for (int k = 0; k < dim; ++k) {
        const int src = order[k];
        Eigen::VectorXcd col = q.col(src);
        const Complex c = col[dom[src]];
        col *= std::conj(c) / std::abs(c);
        col[dom[src]] = Complex(col[dom[src]].real(), 0.0);
        out.modes.col(k) = col;
        out.quasienergies[k] = eps[src];
    }
    return out;
}

FloquetSet floquet_set(const PeriodicHamiltonian &h, const PropagatorOptions &options) {
    if (h.static_only()) {
        FloquetSet out;
        const int dim = h.dimension();
        out.modes = Matrix::Identity(dim, dim);
        out.quasienergies.resize(dim);
        for (int k = 0; k < dim; ++k) out.quasienergies[k] = fold_quasienergy(h.h0()[k], h.omega());
        return out;
    }
    return floquet_modes(one_period_propagator(h, options).u, h.omega());
}

double stark_from_zeta(double zeta, double omega, double omega_q) {
    if (omega == omega_q) throw PoleError("Stark relation is singular at omega = omega_q");
    const double d = omega * omega - omega_q * omega_q;
    return omega_q * zeta * zeta * omega * omega / (8.0 * d * d);
}

double zeta_from_stark(double delta_omega, double omega, double omega_q) {
    if (omega == omega_q) throw PoleError("Stark relation is singular at omega = omega_q");
    if (!(delta_omega >= 0.0)) throw InvalidParameter("Stark shift must be non-negative");
    if (!(omega > 0.0) || !(omega_q > 0.0)) throw InvalidParameter("frequencies must be positive");
    const double d = std::abs(omega * omega - omega_q * omega_q);
    return std::sqrt(8.0 * delta_omega / omega_q) * d / omega;
}

StarkValidity stark_validity(const TransmonParams &params, double omega, double omega_q) {
    StarkValidity v;
    v.deep_transmon = params.e_j() / params.e_c() >= 20.0;
    v.far_detuned = std::abs(omega - omega_q) >= params.e_c();
    return v;
}

TwoLevelResult two_level_oracle(double a, double delta) {
    TwoLevelResult r;
    r.quasienergy_gap = std::hypot(0.5 * a, 0.5 * delta);
    if (a == 0.0) return r;
    r.theta = 0.5 * (1.0 - std::abs(delta) / std::hypot(a, delta));
    return r;
}

}  // namespace hfro
