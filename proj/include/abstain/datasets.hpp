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

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "abstain/asymptotics.hpp"
#include "abstain/curve.hpp"
#include "abstain/dense_oracle.hpp"
#include "abstain/montecarlo.hpp"
#include "abstain/protocol.hpp"
#include "abstain/scaling.hpp"
#include "abstain/spin_stats.hpp"

// One builder per CLI subcommand. Each returns the full dataset the command
// prints, so the command line layer only parses flags and picks a writer.

namespace abstain::datasets {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Raised when a Monte Carlo run accepted no samples.
class NoDataError : public NumericalError {
   public:
    using NumericalError::NumericalError;
};

inline std::string str(std::int64_t v) { return std::to_string(v); }

/// F(Q) and the relative gain over a uniform Q grid.
inline CurveSeries gain_curve(std::int64_t copies, double purity, std::int64_t q_steps) {
    const EstimationSetting setting(copies, purity);
    const auto grid = abstention_grid(q_steps);
    std::vector<double> qs, fs, gains;
    for (const auto &pt : abstain::gain_curve(setting, grid)) {
        qs.push_back(pt.q);
        fs.push_back(pt.fidelity);
        gains.push_back(pt.gain);
    }
    CurveSeries out("gain-curve");
    out.param("n", str(copies)).param("r", purity).param("q_steps", str(q_steps));
    out.param("q_crit", critical_abstention(setting));
    out.column("Q", qs).column("F", fs).column("gain", gains);
    return out;
}

/// Plateau gain (any Q >= Q_crit) for N = 1 .. n_max.
inline CurveSeries gain_vs_n(double purity, std::int64_t n_max) {
    std::vector<double> ns, gains, f0s, fmaxs, qcrits, qsgs;
    for (std::int64_t n = 1; n <= n_max; ++n) {
        const EstimationSetting setting(n, purity);
        const SpinSpectrum spec(setting);
        const double f0 = fidelity_no_abstention(spec);
        const double fmax = plateau_fidelity(spec);
        ns.push_back(static_cast<double>(n));
        gains.push_back(plateau_gain(setting));
        f0s.push_back(f0);
        fmaxs.push_back(fmax);
        qcrits.push_back(critical_abstention(setting));
        qsgs.push_back(local_sg_abstention(setting));
    }
    CurveSeries out("gain-vs-n");
    out.param("r", purity).param("n_max", str(n_max));
    out.column("N", ns).column("gain", gains).column("F0", f0s).column("F_plateau", fmaxs);
    out.column("Q_crit", qcrits).column("Q_sg", qsgs);
    return out;
}

/// Effective purity at the given abstention rates.
inline CurveSeries reff(std::int64_t copies, double purity, const std::vector<double> &qs) {
    const EstimationSetting setting(copies, purity);
    std::vector<double> reffs, etas;
    for (double q : qs) {
        const auto e = effective_purity(setting, q);
        reffs.push_back(e.purity);
        etas.push_back(e.error_probability);
    }
    CurveSeries out("reff");
    out.param("n", str(copies)).param("r", purity);
    out.column("Q", qs).column("r_eff", reffs).column("eta_eff", etas);
    return out;
}

/// Exact scaled block density J p_j next to the Stirling and Gaussian
/// approximations, with the acceptance probability of each block at rate q.
inline CurveSeries distribution(std::int64_t copies, double purity, double q) {
    const EstimationSetting setting(copies, purity);
    const SpinSpectrum spec(setting);
    const auto policy = optimal_policy(spec, q);
    const double top = setting.top_block().value();
    const bool approx = purity > 0.0 && purity < 1.0;
    std::vector<double> js, xs, ps, dens, stirling, gauss, deltas, accept;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const auto &row = spec[i];
        const double x = row.j.value() / top;
        js.push_back(row.j.value());
        xs.push_back(x);
        ps.push_back(row.p);
        dens.push_back(density_exact(spec, row.j));
        const bool inside = approx && x > 0.0 && x < 1.0;
        stirling.push_back(inside ? density_approx(setting, x, DensityVariant::kStirling) : kNaN);
        gauss.push_back(inside ? density_approx(setting, x, DensityVariant::kGaussian) : kNaN);
        deltas.push_back(row.delta);
        accept.push_back(1.0 - policy.coefficients[i]);
    }
    CurveSeries out("distribution");
    out.param("n", str(copies)).param("r", purity).param("q", q);
    out.column("j", js).column("x", xs).column("p", ps).column("Jp", dens);
    out.column("stirling", stirling).column("gaussian", gauss).column("delta", deltas).column("accept", accept);
    return out;
}

/// Exact versus asymptotic quantities for a sharp threshold x*.
inline CurveSeries asymptotics(std::int64_t copies, double purity, double x_star) {
    const EstimationSetting setting(copies, purity);
    const SpinSpectrum spec(setting);
    const auto policy = threshold_policy(spec, block_at_or_above(copies, x_star));
    const double f_exact = fidelity_report(spec, policy).fidelity;
    const auto n_eff = effective_copies(spec, policy);
    CurveSeries out("asymptotics");
    out.param("n", str(copies)).param("r", purity).param("x_star", x_star);
    out.column("x_star", {x_star});
    out.column("log_qbar_exact", {policy.log_acceptance});
    out.column("log_qbar_asymptotic", {acceptance_asymptotic(setting, x_star)});
    out.column("F_exact", {f_exact});
    out.column("F_asymptotic", {fidelity_asymptotic(setting, x_star)});
    out.column("N_eff_exact", {n_eff.value_or(kNaN)});
    out.column("N_eff_asymptotic", {effective_copies_asymptotic(setting, x_star)});
    out.column("r_eff_asymptotic", {effective_purity_asymptotic(purity)});
    return out;
}

/// Exact F(Q) at r = a/sqrt(N) next to the limiting law.
inline CurveSeries scaling(double a, std::int64_t copies, std::int64_t q_steps) {
    const double purity = scaling::purity_for(a, copies);
    const SpinSpectrum spec(EstimationSetting(copies, purity));
    std::vector<double> qs = abstention_grid(q_steps);
    std::vector<double> xis, exact, asym;
    for (double q : qs) {
        xis.push_back(scaling::threshold_for_abstention(a, q));
        exact.push_back(fidelity_with_abstention(spec, q).fidelity);
        asym.push_back(scaling::fidelity_scaling(a, q));
    }
    CurveSeries out("scaling");
    out.param("a", a).param("n", str(copies)).param("r", purity).param("q_steps", str(q_steps));
    out.column("Q", qs).column("xi_star", xis).column("exact", exact).column("asymptotic", asym);
    return out;
}

inline CurveSeries montecarlo(std::int64_t copies, double purity, double q, std::int64_t samples, std::uint64_t seed,
                              unsigned threads) {
    const EstimationSetting setting(copies, purity);
    const auto report = mc::estimate(seed, setting, q, samples, threads);
    if (!report.has_data()) {
        throw NoDataError("no accepted runs in " + std::to_string(samples) + " samples");
    }
    CurveSeries out("montecarlo");
    out.param("n", str(copies)).param("r", purity).param("q", q).param("seed", std::to_string(seed));
    out.column("samples", {static_cast<double>(report.samples)});
    out.column("accepted", {static_cast<double>(report.accepted)});
    out.column("empirical_Q", {report.empirical_q});
    out.column("mean_fidelity", {*report.mean_fidelity});
    out.column("stderr", {report.standard_error.value_or(kNaN)});
    out.column("analytic_F", {fidelity_with_abstention(setting, q).fidelity});
    return out;
}

/// Closed-form block statistics against the dense oracle for N <= max_copies.
inline constexpr double kVerifyTolerance = 1e-10;

inline CurveSeries verify(int max_copies) {
    std::vector<double> ns, rs, p_err, jz_err;
    for (int n = 1; n <= max_copies; ++n) {
        for (double r : {0.0, 0.3, 0.5, 0.7, 1.0}) {
            const EstimationSetting setting(n, r);
            const SpinSpectrum spec(setting);
            const auto dense = oracle::oracle_block_stats(n, r);
            double ep = 0.0;
            double ej = 0.0;
            for (std::size_t i = 0; i < spec.size(); ++i) {
                ep = std::max(ep, std::abs(spec[i].p - dense.entries[i].p));
                if (!std::isnan(dense.entries[i].mean_jz)) {
                    ej = std::max(ej, std::abs(spec[i].mean_jz - dense.entries[i].mean_jz));
                }
            }
            ns.push_back(n);
            rs.push_back(r);
            p_err.push_back(ep);
            jz_err.push_back(ej);
        }
    }
    CurveSeries out("verify");
    out.param("max_n", std::to_string(max_copies)).param("tolerance", kVerifyTolerance);
    out.column("N", ns).column("r", rs).column("max_p_error", p_err).column("max_jz_error", jz_err);
    return out;
}

}  // namespace abstain::datasets
