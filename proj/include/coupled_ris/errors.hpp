// SPDX-License-Identifier: Apache-2.0
//
// coupled-ris: RIS channel optimization with electromagnetic mutual coupling
// Copyright (C) 2026 The coupled-ris Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <stdexcept>
#include <string>

namespace coupled_ris {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// A matrix that must be inverted is singular (estimated condition number above 1e14).
class SingularSystem : public Error {
public:
    using Error::Error;
};

/// Impedance-form data was combined with admittance-form data (or vice versa).
class RepresentationError : public Error {
public:
    using Error::Error;
};

/// The inverse Cayley transform hit an eigenvalue at the pole.
class CayleyPole : public Error {
public:
    using Error::Error;
};

class NotPositiveDefinite : public Error {
public:
    using Error::Error;
};

class GeometryError : public Error {
public:
    using Error::Error;
};

class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, double estimate_abs, double error_bound)
        : Error(what), estimate_abs_(estimate_abs), error_bound_(error_bound) {}

    double estimate_abs() const noexcept { return estimate_abs_; }
    double error_bound() const noexcept { return error_bound_; }

private:
    double estimate_abs_;
    double error_bound_;
};

/// The real part of a coupling matrix has a negative eigenvalue beyond tolerance.
class PassivityError : public Error {
public:
    PassivityError(const std::string& what, double lambda_min, double lambda_max)
        : Error(what), lambda_min_(lambda_min), lambda_max_(lambda_max) {}

    double lambda_min() const noexcept { return lambda_min_; }
    double lambda_max() const noexcept { return lambda_max_; }

private:
    double lambda_min_;
    double lambda_max_;
};

/// A RIS-side channel vector is identically zero; any load is optimal.
class DegenerateChannel : public Error {
public:
    using Error::Error;
};

class AlignmentInfeasible : public Error {
public:
    AlignmentInfeasible(const std::string& what, double residual)
        : Error(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class NonConstantDiagonal : public Error {
public:
    using Error::Error;
};

/// Generic numerical failure (e.g. an input that should be unitary is not).
class NumericalError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// A result file or directory could not be written.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace coupled_ris
