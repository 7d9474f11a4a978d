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

#ifndef QABIAS_REPORT_HPP
#define QABIAS_REPORT_HPP

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace qabias {

/// One stats.json cell flattened for display.
struct ReportRow {
    std::string source;
    int n = 0;
    int m = 0;
    std::string protocol;
    std::string d;  // "-" when not biased
    int instances = 0;
    double p_standard = 0.0;
    double p_final = 0.0;
    double p_bar = 0.0;
    double gamma = 0.0;
    double tau_standard = 0.0;
    double steps = 0.0;
    double hamming_standard = 0.0;
    double hamming_final = 0.0;
    double p_hardest_standard = 0.0;
    double p_hardest_final = 0.0;
};

/// Throws InputError naming the file when it cannot be read or parsed.
std::vector<ReportRow> load_report_rows(const std::filesystem::path &stats_file);

/// Trend warnings: gamma <= 1 for any non-standard cell, and tau^ab >= tau^st
/// for antibias cells.
std::vector<std::string> trend_warnings(const ReportRow &row);

/// Aligned table followed by one "warning:" line per flagged row.
void print_report(const std::vector<ReportRow> &rows, std::ostream &os);

}  // namespace qabias

#endif
