// Copyright 2026 The qabias Authors
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

#include "qabias/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "qabias/errors.hpp"

namespace qabias {

using nlohmann::json;

namespace {

double number(const json &v) {
    if (v.is_null()) {
        return std::numeric_limits<double>::infinity();
    }
    return v.get<double>();
}

std::string cell(double v) {
    if (std::isinf(v)) {
        return "inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

}  // namespace

std::vector<ReportRow> load_report_rows(const std::filesystem::path &stats_file) {
    std::ifstream in(stats_file);
    if (!in) {
        throw InputError("cannot read stats file " + stats_file.string());
    }
    std::vector<ReportRow> rows;
    try {
        const json doc = json::parse(in);
        for (const json &c : doc.at("cells")) {
            ReportRow r;
            r.source = stats_file.filename().string();
            r.n = c.at("n").get<int>();
            r.m = c.at("m").get<int>();
            r.protocol = c.at("protocol").get<std::string>();
            r.d = c.at("d").is_null() ? "-" : std::to_string(c.at("d").get<int>());
            r.instances = c.at("instances").get<int>();
            r.p_standard = c.at("p_standard").at("mean").get<double>();
            r.p_final = c.at("p_final").at("mean").get<double>();
            r.p_bar = c.at("p_bar").get<double>();
            r.gamma = number(c.at("gamma"));
            r.tau_standard = number(c.at("tau_standard"));
            r.steps = c.at("steps").at("mean").get<double>();
            r.hamming_standard = c.at("hamming_standard").at("mean").get<double>();
            r.hamming_final = c.at("hamming_final").at("mean").get<double>();
            r.p_hardest_standard = c.at("hardest").at("p_standard").get<double>();
            r.p_hardest_final = c.at("hardest").at("p_final").get<double>();
            rows.push_back(std::move(r));
        }
    } catch (const json::exception &e) {
        throw InputError("stats file " + stats_file.string() + " is malformed: " + e.what());
    }
    return rows;
}

std::vector<std::string> trend_warnings(const ReportRow &row) {
    std::vector<std::string> out;
    const std::string where = row.source + " n=" + std::to_string(row.n) + " " + row.protocol +
                              (row.d != "-" ? " d=" + row.d : std::string());
    if (row.protocol != "standard" && row.gamma <= 1.0) {
        out.push_back(where + ": gamma " + cell(row.gamma) + " <= 1");
    }
    if (row.protocol == "antibias" && row.steps >= row.tau_standard) {
        out.push_back(where + ": tau_ab " + cell(row.steps) + " >= tau_st " + cell(row.tau_standard));
    }
    return out;
}

void print_report(const std::vector<ReportRow> &rows, std::ostream &os) {
    const std::vector<std::string> header{"source", "n",     "m",      "protocol", "d",      "inst",
                                          "p_st",   "p_f",   "p_bar",  "gamma",    "tau_st", "steps",
                                          "ham_st", "ham_f", "p_st(q)", "p_f(q)"};
    std::vector<std::vector<std::string>> table{header};
    for (const auto &r : rows) {
        table.push_back({r.source, std::to_string(r.n), std::to_string(r.m), r.protocol, r.d,
                         std::to_string(r.instances), cell(r.p_standard), cell(r.p_final), cell(r.p_bar),
                         cell(r.gamma), cell(r.tau_standard), cell(r.steps), cell(r.hamming_standard),
                         cell(r.hamming_final), cell(r.p_hardest_standard), cell(r.p_hardest_final)});
    }
    std::vector<std::size_t> width(header.size(), 0);
    for (const auto &line : table) {
        for (std::size_t i = 0; i < line.size(); ++i) {
            width[i] = std::max(width[i], line[i].size());
        }
    }
    for (const auto &line : table) {
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (i > 0) {
                os << "  ";
            }
            os << line[i] << std::string(width[i] - line[i].size(), ' ');
        }
        os << '\n';
    }
    for (const auto &r : rows) {
        for (const auto &w : trend_warnings(r)) {
            os << "warning: " << w << '\n';
        }
    }
}

}  // namespace qabias
