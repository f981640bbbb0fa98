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

#pragma once

#include <stdexcept>
#include <string>

namespace hfro {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A parameter violates a documented invariant (negative energy, η ≥ 1, ...).
class InvalidParameter : public Error {
  public:
    using Error::Error;
};

/// Malformed or unknown configuration content.
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// A computation could not produce a trustworthy number.
class NumericalError : public Error {
  public:
    using Error::Error;
};

class IoError : public Error {
  public:
    using Error::Error;
};

/// The charge basis is too small for the requested eigenvectors.
class CutoffTooSmall : public NumericalError {
  public:
    CutoffTooSmall(int level, double boundary_weight)
        : NumericalError("charge cutoff too small: level " + std::to_string(level) +
                         " has weight " + std::to_string(boundary_weight) +
                         " on the outermost charge states"),
          level_(level),
          boundary_weight_(boundary_weight) {}

    int level() const noexcept { return level_; }
    double boundary_weight() const noexcept { return boundary_weight_; }

  private:
    int level_;
    double boundary_weight_;
};

/// A second-order denominator vanished: transition n <-> m is resonant with the resonator.
class DivergenceError : public NumericalError {
  public:
    DivergenceError(int n, int m)
        : NumericalError("dispersive sum diverges: transition " + std::to_string(n) + " <-> " +
                         std::to_string(m) + " is resonant with the resonator"),
          n_(n),
          m_(m) {}

    int n() const noexcept { return n_; }
    int m() const noexcept { return m_; }

  private:
    int n_;
    int m_;
};

/// A closed-form expression was evaluated at (or too near) one of its poles.
class PoleError : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

/// Parameters fall outside the regime a formula is derived for.
class RegimeError : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

/// The time integrator could not meet its unitarity or accuracy target.
class IntegrationFailure : public NumericalError {
  public:
    IntegrationFailure(const std::string &what, double worst_defect)
        : NumericalError(what + " (worst column defect " + std::to_string(worst_defect) + ")"),
          worst_defect_(worst_defect) {}

    double worst_defect() const noexcept { return worst_defect_; }

  private:
    double worst_defect_;
};

}  // namespace hfro
