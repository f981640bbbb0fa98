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

#include "hfreadout/transmon.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "hfreadout/errors.hpp"

namespace hfro {

namespace {

constexpr double kBoundaryWeightLimit = 1e-6;
constexpr double kPhaseThreshold = 1e-8;

void fix_phase(Eigen::Ref<Eigen::VectorXd> v) {
    const double scale = v.cwiseAbs().maxCoeff();
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        if (std::abs(v[k]) > kPhaseThreshold * scale) {
            if (v[k] < 0.0) v = -v;
            return;
        }
    }
}

}  // namespace

double reduce_offset_charge(double n_g) {
    if (!std::isfinite(n_g)) throw InvalidParameter("offset charge must be finite");
    double r = n_g - std::floor(n_g);
    if (r >= 1.0) r = 0.0;
    return r;
}

TransmonParams::TransmonParams(double e_c, double e_j, double n_g, int n_cut)
    : e_c_(e_c), e_j_(e_j), n_g_(reduce_offset_charge(n_g)), n_cut_(n_cut) {
    if (!(e_c > 0.0) || !std::isfinite(e_c)) throw InvalidParameter("e_c must be positive");
    if (!(e_j >= 0.0) || !std::isfinite(e_j)) throw InvalidParameter("e_j must be non-negative");
    if (n_cut < 1) throw InvalidParameter("n_cut must be at least 1");
}

Eigen::VectorXd charge_basis_states(const TransmonParams &params) {
    return Eigen::VectorXd::LinSpaced(params.dimension(), -params.n_cut(), params.n_cut());
}

Eigen::MatrixXd charge_basis_hamiltonian(const TransmonParams &params) {
    const int dim = params.dimension();
    const Eigen::VectorXd n = charge_basis_states(params);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) {
        const double q = n[k] - params.n_g();
        h(k, k) = 4.0 * params.e_c() * q * q;
        if (k + 1 < dim) {
            h(k, k + 1) = -0.5 * params.e_j();
            h(k + 1, k) = -0.5 * params.e_j();
        }
    }
    return h;
}

Spectrum::Spectrum(TransmonParams params, Eigen::VectorXd energies, Eigen::MatrixXd eigenvectors,
                   int levels)
    : params_(std::move(params)),
      energies_(std::move(energies)),
      eigenvectors_(std::move(eigenvectors)),
      charges_(charge_basis_states(params_)),
      levels_(levels) {}

void Spectrum::check_level(int level) const {
    if (level < 0 || level >= levels_) {
        throw InvalidParameter("level index " + std::to_string(level) + " out of range [0, " +
                               std::to_string(levels_) + ")");
    }
}

double Spectrum::energy(int level) const {
    check_level(level);
    return energies_[level];
}

double Spectrum::transition(int i, int j) const { return energy(i) - energy(j); }

double Spectrum::charge_element(int i, int j) const {
    check_level(i);
    check_level(j);
    return eigenvectors_.col(i).dot(charges_.cwiseProduct(eigenvectors_.col(j)));
}

Eigen::MatrixXd Spectrum::charge_matrix(int count) const {
    if (count < 1 || count > levels_) {
        throw InvalidParameter("charge matrix size " + std::to_string(count) + " out of range");
    }
    const auto v = eigenvectors_.leftCols(count);
    Eigen::MatrixXd m = v.transpose() * charges_.asDiagonal() * v;
    return 0.5 * (m + m.transpose());
}

double Spectrum::charge_squared_expectation(int i) const {
    check_level(i);
    return eigenvectors_.col(i).cwiseAbs2().dot(charges_.cwiseAbs2());
}

int default_level_count(const TransmonParams &params) {
    return std::min(params.dimension(), std::max(2, (2 * params.n_cut()) / 3));
}

Spectrum diagonalize(const TransmonParams &params, int levels) {
    const int dim = params.dimension();
    if (levels < 1 || levels > dim) {
        throw InvalidParameter("requested " + std::to_string(levels) + " levels from a " +
                               std::to_string(dim) + "-state charge basis");
    }
    const Eigen::VectorXd n = charge_basis_states(params);
    Eigen::VectorXd diag(dim);
    for (int k = 0; k < dim; ++k) {
        const double q = n[k] - params.n_g();
        diag[k] = 4.0 * params.e_c() * q * q;
    }
    const Eigen::VectorXd sub = Eigen::VectorXd::Constant(dim - 1, -0.5 * params.e_j());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("charge-basis eigensolver did not converge");
    }
    Eigen::MatrixXd vectors = solver.eigenvectors();
    for (int k = 0; k < dim; ++k) fix_phase(vectors.col(k));

    for (int k = 0; k < levels; ++k) {
        const double edge = vectors(0, k) * vectors(0, k) + vectors(dim - 1, k) * vectors(dim - 1, k);
        if (edge > kBoundaryWeightLimit) throw CutoffTooSmall(k, edge);
    }
    return Spectrum(params, solver.eigenvalues(), std::move(vectors), levels);
}

Spectrum diagonalize(const TransmonParams &params) {
    return diagonalize(params, default_level_count(params));
}

double charge_matrix_element(const Spectrum &spectrum, int i, int j) {
    return std::abs(spectrum.charge_element(i, j));
}

ZeroPointScales zero_point_scales(const TransmonParams &params) {
    if (!(params.e_j() > 0.0)) throw InvalidParameter("zero-point scales need e_j > 0");
    const double n_zpf = std::pow(params.e_j() / (32.0 * params.e_c()), 0.25);
    return {n_zpf, 0.5 / n_zpf};
}

}  // namespace hfro
