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

// Undriven transmon in the truncated charge basis.
//
// All energies are frequencies (E/h, in Hz). Levels are indexed by sorted
// energy at the given offset charge; nothing is relabeled across n_g.

#pragma once

#include <Eigen/Dense>

namespace hfro {

inline constexpr int kDefaultChargeCutoff = 40;

class TransmonParams {
  public:
    /// Throws InvalidParameter unless e_c > 0, e_j >= 0 and n_cut >= 1.
    /// n_g is reduced to [0, 1).
    TransmonParams(double e_c, double e_j, double n_g, int n_cut = kDefaultChargeCutoff);

    double e_c() const noexcept { return e_c_; }
    double e_j() const noexcept { return e_j_; }
    double n_g() const noexcept { return n_g_; }
    int n_cut() const noexcept { return n_cut_; }

    /// Number of charge states, 2 n_cut + 1.
    int dimension() const noexcept { return 2 * n_cut_ + 1; }

    TransmonParams with_n_g(double n_g) const { return {e_c_, e_j_, n_g, n_cut_}; }
    TransmonParams with_n_cut(int n_cut) const { return {e_c_, e_j_, n_g_, n_cut}; }

    friend bool operator==(const TransmonParams &, const TransmonParams &) = default;

  private:
    double e_c_;
    double e_j_;
    double n_g_;
    int n_cut_;
};

/// Maps any real offset charge onto [0, 1).
double reduce_offset_charge(double n_g);

/// 4 E_C (N - n_g)^2 - E_J cos(phi) as a dense charge-basis matrix.
Eigen::MatrixXd charge_basis_hamiltonian(const TransmonParams &params);

/// Diagonal charge operator N over the states -n_cut..n_cut.
Eigen::VectorXd charge_basis_states(const TransmonParams &params);

class Spectrum {
  public:
    Spectrum(TransmonParams params, Eigen::VectorXd energies, Eigen::MatrixXd eigenvectors,
             int levels);

    const TransmonParams &params() const noexcept { return params_; }

    /// Number of validated levels (the ones the cutoff check was run on).
    int levels() const noexcept { return levels_; }

    /// All eigenenergies of the truncated problem, ascending, in Hz.
    const Eigen::VectorXd &energies() const noexcept { return energies_; }

    /// Columns are charge-basis eigenvectors, ordered like energies().
    const Eigen::MatrixXd &eigenvectors() const noexcept { return eigenvectors_; }

    double energy(int level) const;

    /// E_i - E_j in Hz.
    double transition(int i, int j) const;

    /// Qubit frequency E_1 - E_0.
    double qubit_frequency() const { return transition(1, 0); }

    /// Signed <i|N|j> under the fixed eigenvector phase convention.
    double charge_element(int i, int j) const;

    /// Charge operator restricted to the first `count` levels.
    Eigen::MatrixXd charge_matrix(int count) const;

    /// <i|N^2|i>.
    double charge_squared_expectation(int i) const;

  private:
    void check_level(int level) const;

    TransmonParams params_;
    Eigen::VectorXd energies_;
    Eigen::MatrixXd eigenvectors_;
    Eigen::VectorXd charges_;
    int levels_;
};

/// Default number of validated levels: two thirds of n_cut, at least 2.
int default_level_count(const TransmonParams &params);

/// Diagonalizes the undriven transmon. The eigenvector phase is fixed so the
/// first charge component above 1e-8 of the largest magnitude is positive.
/// Throws CutoffTooSmall if any of the first `levels` eigenvectors carries more
/// than 1e-6 weight on the two outermost charge states.
Spectrum diagonalize(const TransmonParams &params, int levels);
Spectrum diagonalize(const TransmonParams &params);

/// |<j|N|i>|.
double charge_matrix_element(const Spectrum &spectrum, int i, int j);

struct ZeroPointScales {
    double n_zpf;
    double phi_zpf;
};

/// n_zpf = (E_J / 32 E_C)^(1/4), phi_zpf = 1 / (2 n_zpf). Rejects e_j == 0.
ZeroPointScales zero_point_scales(const TransmonParams &params);

}  // namespace hfro
