// Copyright 2026 The incompat Authors
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

// Test-only reference computations. Nothing here calls into the code paths
// it is used to check.

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace oracle {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// Eigen's own Hermitian eigensolver, ascending eigenvalues.
inline Eigen::VectorXd eigenvalues(const Matrix& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

inline Matrix random_hermitian(int dim, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> n(0.0, scale);
    Matrix a(dim, dim);
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) a(r, c) = Complex(n(rng), n(rng));
    }
    return 0.5 * (a + a.adjoint());
}

/// Component j of the k-th Fourier vector, straight from the defining sum.
inline Complex fourier_component(int d, int j, int k) {
    return std::polar(1.0 / std::sqrt(static_cast<double>(d)), -2.0 * std::numbers::pi * j * k / d);
}

/// <psi| A (x) B |psi> by explicit index sums over a two-qubit vector.
inline double two_qubit_expectation(const Eigen::Vector4cd& psi, const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
    Complex acc = 0.0;
    for (int i1 = 0; i1 < 2; ++i1)
        for (int j1 = 0; j1 < 2; ++j1)
            for (int i2 = 0; i2 < 2; ++i2)
                for (int j2 = 0; j2 < 2; ++j2)
                    acc += std::conj(psi(2 * i1 + j1)) * a(i1, i2) * b(j1, j2) * psi(2 * i2 + j2);
    return acc.real();
}

inline Eigen::Vector4cd singlet_vector() {
    Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
    psi(1) = 1.0 / std::sqrt(2.0);
    psi(2) = -1.0 / std::sqrt(2.0);
    return psi;
}

/// Observable cos(t) sigma_z + sin(t) sigma_x written out entrywise.
inline Eigen::Matrix2cd spin_zx(double t) {
    Eigen::Matrix2cd s;
    s << std::cos(t), std::sin(t), std::sin(t), -std::cos(t);
    return s;
}

/// Noisy orthogonal qubit spins with uniform noise are compatible iff lambda^2 + mu^2 <= 1.
inline bool qubit_compatible(double lambda, double mu) { return lambda * lambda + mu * mu <= 1.0; }

/// max over a fine angle grid of lambda*2cos(t) + mu*2sin(t) (support function of the disc).
inline double disc_support(double lambda, double mu, int steps = 200000) {
    double best = 0.0;
    for (int i = 0; i < steps; ++i) {
        const double t = 2.0 * std::numbers::pi * i / steps;
        best = std::max(best, std::abs(2.0 * lambda * std::cos(t) + 2.0 * mu * std::sin(t)));
    }
    return best;
}

}  // namespace oracle
