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

#include "abstain/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "json.hpp"

using namespace abstain;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string> &args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::execute(args, out, err);
    return {code, out.str(), err.str()};
}

struct Table {
    std::vector<std::string> meta;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::size_t col(const std::string &name) const {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) {
                return i;
            }
        }
        throw std::out_of_range(name);
    }
};

Table parse_csv(const std::string &text) {
    Table t;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.starts_with("#")) {
            t.meta.push_back(line);
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cells.push_back(cell);
        }
        if (t.header.empty()) {
            t.header = cells;
        } else {
            std::vector<double> row;
            for (const auto &c : cells) {
                row.push_back(std::strtod(c.c_str(), nullptr));
            }
            t.rows.push_back(row);
        }
    }
    return t;
}

}  // namespace

TEST(cli, gain_curve_plateau_band) {
    const auto r = run({"gain-curve", "--n", "6", "--r", "0.3", "--q-steps", "200"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto t = parse_csv(r.out);
    EXPECT_EQ(t.header, (std::vector<std::string>{"Q", "F", "gain"}));
    ASSERT_EQ(t.rows.size(), 200u);
    EXPECT_EQ(t.meta.front(), "# command=gain-curve");
    const double plateau = t.rows.back()[t.col("gain")];
    EXPECT_GE(plateau, 0.13);
    EXPECT_LE(plateau, 0.17);
}

TEST(cli, gain_vs_n_peak) {
    const auto r = run({"gain-vs-n", "--r", "0.3", "--n-max", "30"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto t = parse_csv(r.out);
    std::size_t best = 0;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        if (t.rows[i][t.col("gain")] > t.rows[best][t.col("gain")]) {
            best = i;
        }
    }
    EXPECT_EQ(t.rows[best][t.col("N")], 12.0);
}

TEST(cli, scaling_gap) {
    const auto r = run({"scaling", "--a", "1", "--n", "1000000", "--q-steps", "50"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto t = parse_csv(r.out);
    ASSERT_EQ(t.rows.size(), 50u);
    for (const auto &row : t.rows) {
        EXPECT_LE(std::abs(row[t.col("exact")] - row[t.col("asymptotic")]), 0.01);
    }
}

TEST(cli, reff_single_row) {
    const auto r = run({"reff", "--n", "10", "--r", "0.5", "--q", "0.6"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto t = parse_csv(r.out);
    ASSERT_EQ(t.rows.size(), 1u);
    const double r_eff = t.rows[0][t.col("r_eff")];
    EXPECT_GT(r_eff, 0.5);
    EXPECT_NEAR(t.rows[0][t.col("eta_eff")], 0.75 * (1.0 - r_eff), 1e-15);
}

TEST(cli, json_output_round_trips_full_precision) {
    const auto r = run({"gain-curve", "--n", "2", "--r", "0.5", "--q-steps", "4", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["meta"]["command"], "gain-curve");
    EXPECT_EQ(j["meta"]["params"]["n"], "2");
    EXPECT_EQ(j["columns"]["F"].size(), 4u);
    EXPECT_EQ(j["columns"]["F"][0].get<double>(), 0.625);
    EXPECT_EQ(j["columns"]["F"][1].get<double>(), 17.0 / 26.0);
}

TEST(cli, distribution_has_overlay_columns) {
    const auto r = run({"distribution", "--n", "100", "--r", "0.5", "--q", "0.3"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto t = parse_csv(r.out);
    ASSERT_EQ(t.rows.size(), 51u);
    for (const char *c : {"j", "x", "p", "Jp", "stirling", "gaussian", "delta", "accept"}) {
        EXPECT_NO_THROW(t.col(c));
    }
    EXPECT_TRUE(std::isnan(t.rows[0][t.col("stirling")]));
}

TEST(cli, asymptotics_row) {
    const auto r = run({"asymptotics", "--n", "1000", "--r", "0.5", "--x-star", "0.8"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto t = parse_csv(r.out);
    ASSERT_EQ(t.rows.size(), 1u);
    EXPECT_NEAR(t.rows[0][t.col("N_eff_exact")] / 1600.0, 1.0, 0.01);
    EXPECT_EQ(t.rows[0][t.col("N_eff_asymptotic")], 1600.0);
}

TEST(cli, montecarlo_is_reproducible) {
    const std::vector<std::string> args{"montecarlo", "--n", "6", "--r", "0.3", "--q", "0.8",
                                        "--samples", "100000", "--seed", "5"};
    const auto a = run(args);
    ASSERT_EQ(a.code, 0) << a.err;
    auto more = args;
    more.insert(more.end(), {"--threads", "3"});
    EXPECT_EQ(run(more).out, a.out);
    EXPECT_EQ(run({"montecarlo", "--n", "6", "--r", "0.3", "--q", "0.8"}).code, cli::kUsageError);
}

TEST(cli, montecarlo_no_data_is_numerical_failure) {
    const auto r = run({"montecarlo", "--n", "2", "--r", "0.5", "--q", "0.999999", "--samples", "3", "--seed", "1"});
    EXPECT_EQ(r.code, cli::kNumericalFailure);
    EXPECT_NE(r.err.find("no accepted runs"), std::string::npos);
}

TEST(cli, verify_passes) {
    const auto r = run({"verify", "--n-max", "6"});
    EXPECT_EQ(r.code, 0) << r.err;
}

TEST(cli, usage_errors_exit_two_with_one_line) {
    const std::vector<std::vector<std::string>> bad{
        {"gain-curve", "--n", "6", "--r", "1.5"},
        {"gain-curve", "--n", "6", "--r", "-0.1"},
        {"reff", "--n", "6", "--r", "0.5", "--q", "1"},
        {"reff", "--n", "6", "--r", "0.5", "--q", "-0.2"},
        {"gain-curve", "--n", "6", "--r", "0.5", "--bogus"},
        {"frobnicate"},
        {},
        {"gain-curve", "--n", "0", "--r", "0.5"},
        {"gain-curve", "--n", "6", "--r", "0.5", "--format", "xml"},
    };
    for (const auto &args : bad) {
        const auto r = run(args);
        EXPECT_EQ(r.code, cli::kUsageError) << (args.empty() ? "" : args[0]);
        EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1) << r.err;
        EXPECT_TRUE(r.err.starts_with("abstain: error: ")) << r.err;
        EXPECT_TRUE(r.out.empty());
    }
}

TEST(cli, help_and_version) {
    const auto h = run({"--help"});
    EXPECT_EQ(h.code, 0);
    EXPECT_NE(h.out.find("gain-curve"), std::string::npos);
    EXPECT_EQ(h.out.find("verify"), std::string::npos);
    const auto v = run({"--version"});
    EXPECT_EQ(v.code, 0);
    EXPECT_EQ(v.out, std::string(kToolVersion) + "\n");
}

TEST(cli, out_flag_writes_file) {
    const auto path = std::filesystem::temp_directory_path() / "abstain_cli_test.csv";
    const auto r = run({"gain-vs-n", "--r", "0.5", "--n-max", "5", "--out", path.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    EXPECT_EQ(parse_csv(buf.str()).rows.size(), 5u);
    std::filesystem::remove(path);
}

TEST(cli, binary_exit_codes) {
    const std::string exe = ABSTAIN_CLI_PATH;
    const auto status = [&](const std::string &args) {
        const int raw = std::system((exe + " " + args + " >/dev/null 2>&1").c_str());
        return WEXITSTATUS(raw);
    };
    EXPECT_EQ(status("gain-vs-n --r 0.3 --n-max 4"), 0);
    EXPECT_EQ(status("gain-vs-n --r 2"), 2);
    EXPECT_EQ(status("montecarlo --n 2 --r 0.5 --q 0.999999 --samples 3 --seed 1"), 3);
}
