// Copyright 2026 The abstain Authors
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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "abstain/half_int.hpp"
#include "abstain/quadrature.hpp"

// Brute-force ground truth on the full 2^N-dimensional space, for small N.
// Nothing here shares code with the closed forms it is meant to check.

namespace abstain::oracle {

inline constexpr int kMaxOracleCopies = 8;

using Matrix = Eigen::MatrixXd;

struct SpinOperators {
    Matrix jz;
    Matrix casimir;  // J^2 = Jx^2 + Jy^2 + Jz^2
};

/// Total spin operators of N qubits in the computational basis; bit k = 0 is
/// spin up along z for qubit k. Jy is imaginary, so Jy^2 = -B^2 with B real.
inline SpinOperators spin_operators(int copies) {
    const Eigen::Index dim = Eigen::Index{1} << copies;
    Matrix jx = Matrix::Zero(dim, dim);
    Matrix b = Matrix::Zero(dim, dim);
    Matrix jz = Matrix::Zero(dim, dim);
    for (int k = 0; k < copies; ++k) {
        const Eigen::Index bit = Eigen::Index{1} << k;
        for (Eigen::Index i = 0; i < dim; ++i) {
            const bool down = (i & bit) != 0;
            jx(i ^ bit, i) += 0.5;
            // sigma_y = i [[0, -1], [1, 0]]
            if (down) {
                b(i ^ bit, i) -= 0.5;
            } else {
                b(i ^ bit, i) += 0.5;
            }
            jz(i, i) += down ? -0.5 : 0.5;
        }
    }
    Matrix casimir = jx * jx - b * b + jz * jz;
    return {jz, casimir};
}

/// Projectors onto total spin j, built as Lagrange polynomials in J^2 over the
/// eigenvalues j'(j'+1). Ordered by increasing j.
inline std::vector<Matrix> spin_projectors(int copies, const Matrix &casimir) {
    std::vector<double> js;
    for (int twice = copies % 2; twice <= copies; twice += 2) {
        js.push_back(0.5 * twice);
    }
    const Eigen::Index dim = casimir.rows();
    std::vector<Matrix> out;
    for (double j : js) {
        const double lambda = j * (j + 1.0);
        Matrix p = Matrix::Identity(dim, dim);
        for (double other : js) {
            if (other == j) {
                continue;
            }
            const double mu = other * (other + 1.0);
            p = p * ((casimir - mu * Matrix::Identity(dim, dim)) / (lambda - mu));
        }
        out.push_back(std::move(p));
    }
    return out;
}

struct DenseBlockEntry {
    HalfInt j;
    double p;
    double mean_jz;  // NaN when p = 0
};

struct DenseBlockStats {
    int copies;
    double purity;
    std::vector<DenseBlockEntry> entries;
};

inline void check_copies(int copies) {
    if (copies < 1 || copies > kMaxOracleCopies) {
        throw std::domain_error("dense oracle supports 1 <= N <= " + std::to_string(kMaxOracleCopies) + ", got " +
                                std::to_string(copies));
    }
}

/// p_j = tr[P_j rho^N] and <J_z>_j = tr[J_z P_j rho^N] / p_j for
/// rho = (1 + r sigma_z)/2, by explicit matrices.
inline DenseBlockStats oracle_block_stats(int copies, double purity) {
    check_copies(copies);
    if (!(purity >= 0.0 && purity <= 1.0)) {
        throw std::domain_error("purity must lie in [0, 1]");
    }
    const auto ops = spin_operators(copies);
    const auto projectors = spin_projectors(copies, ops.casimir);
    const Eigen::Index dim = ops.jz.rows();

    Eigen::VectorXd rho(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        double w = 1.0;
        for (int k = 0; k < copies; ++k) {
            const bool down = (i >> k) & 1;
            w *= 0.5 * (1.0 + (down ? -purity : purity));
        }
        rho(i) = w;
    }
    const Matrix rho_m = rho.asDiagonal();

    DenseBlockStats stats{copies, purity, {}};
    for (std::size_t b = 0; b < projectors.size(); ++b) {
        const Matrix weighted = projectors[b] * rho_m;
        const double p = weighted.trace();
        const double jz = (ops.jz * weighted).trace();
        const HalfInt j = HalfInt::from_twice(copies % 2 + 2 * static_cast<std::int64_t>(b));
        const double mean = std::abs(p) > 1e-300 ? jz / p : std::numeric_limits<double>::quiet_NaN();
        stats.entries.push_back({j, p, mean});
    }
    return stats;
}

struct ProjectorDiagnostics {
    double idempotence_error;   // max_j |P_j P_j - P_j|
    double orthogonality_error; // max_{j != j'} |P_j P_j'|
    double completeness_error;  // |sum_j P_j - 1|
    std::vector<double> traces; // tr P_j, ordered by j
};

inline ProjectorDiagnostics projector_diagnostics(int copies) {
    check_copies(copies);
    const auto ops = spin_operators(copies);
    const auto projectors = spin_projectors(copies, ops.casimir);
    const Eigen::Index dim = ops.jz.rows();
    ProjectorDiagnostics d{0.0, 0.0, 0.0, {}};
    Matrix sum = Matrix::Zero(dim, dim);
    for (std::size_t a = 0; a < projectors.size(); ++a) {
        sum += projectors[a];
        d.traces.push_back(projectors[a].trace());
        for (std::size_t b = 0; b < projectors.size(); ++b) {
            const Matrix prod = projectors[a] * projectors[b];
            if (a == b) {
                d.idempotence_error = std::max(d.idempotence_error, (prod - projectors[a]).cwiseAbs().maxCoeff());
            } else {
                d.orthogonality_error = std::max(d.orthogonality_error, prod.cwiseAbs().maxCoeff());
            }
        }
    }
    d.completeness_error = (sum - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
    return d;
}

struct ConditionalFidelity {
    double mean;           // integral of t * density
    double normalization;  // integral of density
};

/// Quadrature of the overlap density (2j+1) C(2j, j+m) t^{j+m} (1-t)^{j-m}
/// produced by the block-j covariant POVM on |j m>.
inline ConditionalFidelity oracle_conditional_fidelity_mean(HalfInt j, HalfInt m) {
    if (j.twice() < 0 || j.twice() > 40) {
        throw std::domain_error("conditional fidelity oracle supports 0 <= 2j <= 40");
    }
    if (m > j || m < -j || (j.twice() - m.twice()) % 2 != 0) {
        throw std::domain_error("m = " + m.str() + " is not a magnetic number of j = " + j.str());
    }
    const auto up = static_cast<int>((j + m).twice() / 2);
    const auto down = static_cast<int>((j - m).twice() / 2);
    double binom = 1.0;
    for (int i = 1; i <= down; ++i) {
        binom = binom * (up + i) / i;
    }
    const double scale = static_cast<double>(j.dimension()) * binom;
    const auto density = [=](double t) { return scale * std::pow(t, up) * std::pow(1.0 - t, down); };
    const double norm = integrate(density, 0.0, 1.0, {0.25, 0.5, 0.75}, 1e-13);
    const double mean = integrate([&](double t) { return t * density(t); }, 0.0, 1.0, {0.25, 0.5, 0.75}, 1e-13);
    return {mean, norm};
}

}  // namespace abstain::oracle
