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
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "abstain/datasets.hpp"

namespace abstain::cli {

enum ExitCode : int {
    kOk = 0,
    kUsageError = 2,
    kNumericalFailure = 3,
};

namespace detail {

struct Flags {
    std::int64_t n = 0;
    double r = 0.0;
    std::optional<double> q;
    std::int64_t q_steps = 0;
    std::int64_t n_max = 30;
    double a = 1.0;
    double x_star = 0.0;
    std::int64_t samples = 1000000;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string format = "csv";
    std::string out_path;
};

inline std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    while (!s.empty() && s.back() == ' ') {
        s.pop_back();
    }
    return s;
}

inline void add_output_flags(CLI::App *cmd, Flags &f) {
    cmd->add_option("--format", f.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", f.out_path, "Write to PATH instead of stdout");
}

}  // namespace detail

/// Runs one command line (without the program name). Datasets go to `out`
/// or --out PATH; diagnostics go to `err` as a single line.
inline int execute(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    detail::Flags f;
    CLI::App app{"Optimal qubit state estimation with abstention under depolarizing noise", "abstain"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", kToolVersion);

    std::function<CurveSeries()> build;

    auto *gain_curve = app.add_subcommand("gain-curve", "F(Q) and relative gain over a Q grid");
    gain_curve->add_option("--n", f.n, "Number of copies")->required();
    gain_curve->add_option("--r", f.r, "Purity in [0, 1]")->required();
    gain_curve->add_option("--q-steps", f.q_steps, "Grid points in [0, 1)")->default_val(200);
    detail::add_output_flags(gain_curve, f);
    gain_curve->callback([&] { build = [&] { return datasets::gain_curve(f.n, f.r, f.q_steps); }; });

    auto *gain_vs_n = app.add_subcommand("gain-vs-n", "Plateau gain as a function of N");
    gain_vs_n->add_option("--r", f.r, "Purity in [0, 1]")->required();
    gain_vs_n->add_option("--n-max", f.n_max, "Largest N")->default_val(30);
    detail::add_output_flags(gain_vs_n, f);
    gain_vs_n->callback([&] { build = [&] { return datasets::gain_vs_n(f.r, f.n_max); }; });

    auto *reff = app.add_subcommand("reff", "Effective purity of abstention");
    reff->add_option("--n", f.n, "Number of copies")->required();
    reff->add_option("--r", f.r, "Purity in [0, 1]")->required();
    reff->add_option("--q", f.q, "Single abstention rate in [0, 1)");
    reff->add_option("--q-steps", f.q_steps, "Grid points when --q is absent")->default_val(50);
    detail::add_output_flags(reff, f);
    reff->callback([&] {
        build = [&] {
            const auto qs = f.q ? std::vector<double>{*f.q} : abstention_grid(f.q_steps);
            return datasets::reff(f.n, f.r, qs);
        };
    });

    auto *dist = app.add_subcommand("distribution", "Exact and approximate block densities");
    dist->add_option("--n", f.n, "Number of copies")->required();
    dist->add_option("--r", f.r, "Purity in [0, 1]")->required();
    dist->add_option("--q", f.q, "Abstention rate for the accept column");
    detail::add_output_flags(dist, f);
    dist->callback([&] { build = [&] { return datasets::distribution(f.n, f.r, f.q.value_or(0.0)); }; });

    auto *asym = app.add_subcommand("asymptotics", "Exact versus large-N laws at threshold x*");
    asym->add_option("--n", f.n, "Number of copies")->required();
    asym->add_option("--r", f.r, "Purity in [0, 1]")->required();
    asym->add_option("--x-star", f.x_star, "Scaled threshold j*/J in [0, 1]")->required();
    detail::add_output_flags(asym, f);
    asym->callback([&] { build = [&] { return datasets::asymptotics(f.n, f.r, f.x_star); }; });

    auto *scal = app.add_subcommand("scaling", "Exact F(Q) at r = a/sqrt(N) against the limiting law");
    scal->add_option("--a", f.a, "Noise scaling constant")->required();
    scal->add_option("--n", f.n, "Number of copies")->default_val(1000000);
    scal->add_option("--q-steps", f.q_steps, "Grid points in [0, 1)")->default_val(50);
    detail::add_output_flags(scal, f);
    scal->callback([&] { build = [&] { return datasets::scaling(f.a, f.n, f.q_steps); }; });

    auto *mc = app.add_subcommand("montecarlo", "Simulated protocol runs");
    mc->add_option("--n", f.n, "Number of copies")->required();
    mc->add_option("--r", f.r, "Purity in [0, 1]")->required();
    mc->add_option("--q", f.q, "Abstention rate in [0, 1)")->required();
    mc->add_option("--samples", f.samples, "Number of runs")->default_val(1000000);
    mc->add_option("--seed", f.seed, "RNG seed")->required();
    mc->add_option("--threads", f.threads, "Worker cap (0 = all cores)")->default_val(0);
    detail::add_output_flags(mc, f);
    mc->callback([&] {
        build = [&] { return datasets::montecarlo(f.n, f.r, *f.q, f.samples, f.seed, f.threads); };
    });

    auto *verify = app.add_subcommand("verify", "Check closed forms against dense matrices");
    verify->group("");
    verify->add_option("--n-max", f.n_max, "Largest N (at most 8)")->default_val(6);
    detail::add_output_flags(verify, f);
    bool verify_failed = false;
    verify->callback([&] {
        build = [&] {
            auto series = datasets::verify(static_cast<int>(f.n_max));
            for (const char *col : {"max_p_error", "max_jz_error"}) {
                for (double e : series.values(col)) {
                    verify_failed = verify_failed || !(e <= datasets::kVerifyTolerance);
                }
            }
            return series;
        };
    });

    std::vector<const char *> argv{"abstain"};
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp &) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::CallForVersion &) {
        out << kToolVersion << '\n';
        return kOk;
    } catch (const CLI::ParseError &e) {
        err << "abstain: error: " << detail::one_line(e.what()) << '\n';
        return kUsageError;
    }

    try {
        if (f.q) {
            check_abstention_rate(*f.q);
        }
        const CurveSeries series = build();
        std::ofstream file;
        std::ostream *sink = &out;
        if (!f.out_path.empty()) {
            file.open(f.out_path, std::ios::binary);
            if (!file) {
                err << "abstain: error: cannot open " << f.out_path << '\n';
                return kUsageError;
            }
            sink = &file;
        }
        if (f.format == "json") {
            series.write_json(*sink);
        } else {
            series.write_csv(*sink);
        }
        if (verify_failed) {
            err << "abstain: error: closed forms disagree with the dense oracle beyond "
                << format_real(datasets::kVerifyTolerance) << '\n';
            return kNumericalFailure;
        }
        return kOk;
    } catch (const std::domain_error &e) {
        err << "abstain: error: " << detail::one_line(e.what()) << '\n';
        return kUsageError;
    } catch (const std::invalid_argument &e) {
        err << "abstain: error: " << detail::one_line(e.what()) << '\n';
        return kUsageError;
    } catch (const std::exception &e) {
        err << "abstain: numerical failure: " << detail::one_line(e.what()) << '\n';
        return kNumericalFailure;
    }
}

}  // namespace abstain::cli
