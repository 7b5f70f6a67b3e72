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
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace abstain {

inline constexpr const char *kToolVersion = "1.0.0";

/// 17 significant digits, '.' decimal separator regardless of locale.
inline std::string format_real(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s(buf);
    std::replace(s.begin(), s.end(), ',', '.');
    return s;
}

/// Named, equal-length columns plus metadata, written as CSV or JSON.
class CurveSeries {
   public:
    explicit CurveSeries(std::string command) : command_(std::move(command)) {}

    CurveSeries &param(const std::string &key, const std::string &value) {
        params_.emplace_back(key, value);
        return *this;
    }
    CurveSeries &param(const std::string &key, double value) { return param(key, format_real(value)); }

    CurveSeries &column(const std::string &name, std::vector<double> values) {
        if (std::find(names_.begin(), names_.end(), name) != names_.end()) {
            throw std::invalid_argument("duplicate column name: " + name);
        }
        if (!columns_.empty() && values.size() != columns_.front().size()) {
            throw std::invalid_argument("column " + name + " has " + std::to_string(values.size()) +
                                        " rows, expected " + std::to_string(columns_.front().size()));
        }
        names_.push_back(name);
        columns_.push_back(std::move(values));
        return *this;
    }

    const std::string &command() const { return command_; }
    const std::vector<std::string> &names() const { return names_; }
    const std::vector<double> &values(const std::string &name) const {
        const auto it = std::find(names_.begin(), names_.end(), name);
        if (it == names_.end()) {
            throw std::out_of_range("no column named " + name);
        }
        return columns_[static_cast<std::size_t>(it - names_.begin())];
    }
    std::size_t rows() const { return columns_.empty() ? 0 : columns_.front().size(); }

    void write_csv(std::ostream &out) const {
        out << "# command=" << command_ << '\n';
        out << "# version=" << kToolVersion << '\n';
        for (const auto &[k, v] : params_) {
            out << "# " << k << '=' << v << '\n';
        }
        for (std::size_t c = 0; c < names_.size(); ++c) {
            out << (c ? "," : "") << names_[c];
        }
        out << '\n';
        for (std::size_t r = 0; r < rows(); ++r) {
            for (std::size_t c = 0; c < columns_.size(); ++c) {
                out << (c ? "," : "") << format_real(columns_[c][r]);
            }
            out << '\n';
        }
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json meta;
        meta["command"] = command_;
        meta["version"] = kToolVersion;
        nlohmann::ordered_json params = nlohmann::ordered_json::object();
        for (const auto &[k, v] : params_) {
            params[k] = v;
        }
        meta["params"] = std::move(params);
        nlohmann::ordered_json cols = nlohmann::ordered_json::object();
        for (std::size_t c = 0; c < names_.size(); ++c) {
            nlohmann::ordered_json arr = nlohmann::ordered_json::array();
            for (double v : columns_[c]) {
                if (std::isfinite(v)) {
                    arr.push_back(v);
                } else {
                    arr.push_back(nullptr);
                }
            }
            cols[names_[c]] = std::move(arr);
        }
        return {{"meta", std::move(meta)}, {"columns", std::move(cols)}};
    }

    void write_json(std::ostream &out) const { out << to_json().dump(2) << '\n'; }

   private:
    std::string command_;
    std::vector<std::pair<std::string, std::string>> params_;
    std::vector<std::string> names_;
    std::vector<std::vector<double>> columns_;
};

}  // namespace abstain
