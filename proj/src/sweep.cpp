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

#include "qabias/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "qabias/errors.hpp"
#include "qabias/instance_io.hpp"
#include "qabias/rng.hpp"

namespace qabias {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// Domain tags for derive_seed so the instance, guess, and run streams never
// collide.
namespace {
constexpr std::uint64_t kInstanceStream = 0x696e7374616e6365ULL;  // "instance"
constexpr std::uint64_t kGuessStream = 0x6775657373ULL;           // "guess"
}  // namespace

// ---------------------------------------------------------------------------
// SweepSpec

int SweepSpec::clauses_for(int n) const {
    if (!m_per_size.empty()) {
        auto it = m_per_size.find(n);
        if (it == m_per_size.end()) {
            throw InputError("m_rule.per_size has no entry for n=" + std::to_string(n));
        }
        return it->second;
    }
    return static_cast<int>(std::lround(m_ratio * n));
}

bool SweepSpec::has(Protocol p) const { return std::find(protocols.begin(), protocols.end(), p) != protocols.end(); }

void SweepSpec::validate() const {
    if (sizes.empty()) {
        throw InputError("sweep: \"sizes\" must list at least one N");
    }
    std::set<int> seen;
    for (int n : sizes) {
        if (n < 4 || n > kMaxSimulatorSpins) {
            throw InputError("sweep: size " + std::to_string(n) + " outside [4, " +
                             std::to_string(kMaxSimulatorSpins) + "]");
        }
        if (!seen.insert(n).second) {
            throw InputError("sweep: size " + std::to_string(n) + " listed twice");
        }
        const int m = clauses_for(n);
        if (m < 1 || static_cast<std::uint64_t>(m) > triple_count(n)) {
            throw InputError("sweep: m=" + std::to_string(m) + " invalid for n=" + std::to_string(n));
        }
        if (has(Protocol::biased)) {
            for (int d : d_values) {
                if (d < 0 || d > n) {
                    throw InputError("sweep: d=" + std::to_string(d) + " outside [0, " + std::to_string(n) + "]");
                }
            }
        }
    }
    if (m_per_size.empty() && !(m_ratio > 0.0)) {
        throw InputError("sweep: m_rule.ratio must be > 0");
    }
    if (instances_per_size < 0) {
        throw InputError("sweep: instances_per_size must be >= 0");
    }
    if (protocols.empty()) {
        throw InputError("sweep: no protocols");
    }
    if (has(Protocol::biased) && d_values.empty()) {
        throw InputError("sweep: biased protocol needs a non-empty \"d\" list");
    }
    std::set<int> ds(d_values.begin(), d_values.end());
    if (ds.size() != d_values.size()) {
        throw InputError("sweep: \"d\" has repeated values");
    }
    if (!(h > 0.0 && h < 1.0)) {
        throw InputError("sweep: h must lie in (0, 1)");
    }
    if (max_iters < 2) {
        throw InputError("sweep: max_iters must be >= 2");
    }
    if (max_steps < 1) {
        throw InputError("sweep: max_steps must be >= 1");
    }
    if (!(hardest_fraction > 0.0 && hardest_fraction <= 1.0)) {
        throw InputError("sweep: hardest_fraction must lie in (0, 1]");
    }
    if (retry_budget < 1) {
        throw InputError("sweep: retry_budget must be >= 1");
    }
    if (jobs < 0) {
        throw InputError("sweep: jobs must be >= 0");
    }
    (void)schedule();  // throws InputError on a bad schedule
}

std::string SweepSpec::to_json() const {
    ordered_json doc;
    doc["sizes"] = sizes;
    if (m_per_size.empty()) {
        doc["m_rule"] = {{"ratio", m_ratio}};
    } else {
        ordered_json per;
        for (const auto &[n, m] : m_per_size) {
            per[std::to_string(n)] = m;
        }
        doc["m_rule"] = {{"per_size", per}};
    }
    doc["instances_per_size"] = instances_per_size;
    std::vector<std::string> names;
    for (auto p : protocols) {
        names.emplace_back(to_string(p));
    }
    doc["protocols"] = names;
    doc["d"] = d_values;
    doc["h"] = h;
    doc["max_iters"] = max_iters;
    doc["max_steps"] = max_steps;
    doc["hardest_fraction"] = hardest_fraction;
    doc["schedule"] = {{"b0", b0}, {"tau", tau}, {"a", a}, {"dt", schedule().step()}};
    doc["master_seed"] = std::to_string(master_seed);
    doc["retry_budget"] = retry_budget;
    doc["jobs"] = jobs;
    doc["out"] = out.string();
    return doc.dump(2) + "\n";
}

namespace {

template <typename T>
T get_or(const json &doc, const char *key, T fallback) {
    auto it = doc.find(key);
    if (it == doc.end()) {
        return fallback;
    }
    try {
        return it->get<T>();
    } catch (const json::exception &) {
        throw InputError(std::string("sweep: key \"") + key + "\" has the wrong type");
    }
}

std::uint64_t parse_u64(const json &v, const char *key) {
    try {
        if (v.is_string()) {
            const std::string s = v.get<std::string>();
            std::size_t used = 0;
            const auto x = std::stoull(s, &used);
            if (used != s.size()) {
                throw std::invalid_argument(s);
            }
            return x;
        }
        if (v.is_number_unsigned() || v.is_number_integer()) {
            return v.get<std::uint64_t>();
        }
    } catch (const std::exception &) {
    }
    throw InputError(std::string("sweep: key \"") + key + "\" must be an unsigned integer or decimal string");
}

}  // namespace

SweepSpec SweepSpec::from_json(const std::string &text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        throw InputError(std::string("sweep spec: JSON parse error: ") + e.what());
    }
    if (!doc.is_object()) {
        throw InputError("sweep spec: top level must be an object");
    }
    static const std::set<std::string> known{"sizes", "m_rule", "instances_per_size", "protocols", "protocol",
                                             "d", "h", "max_iters", "max_steps", "hardest_fraction", "schedule",
                                             "master_seed", "retry_budget", "jobs", "out"};
    for (const auto &[key, _] : doc.items()) {
        if (!known.count(key)) {
            throw InputError("sweep spec: unknown key \"" + key + "\"");
        }
    }

    SweepSpec spec;
    if (!doc.contains("sizes")) {
        throw InputError("sweep spec: missing key \"sizes\"");
    }
    spec.sizes = get_or<std::vector<int>>(doc, "sizes", {});
    if (auto it = doc.find("m_rule"); it != doc.end()) {
        if (it->contains("ratio")) {
            spec.m_ratio = get_or<double>(*it, "ratio", kDefaultClauseRatio);
        } else if (it->contains("per_size")) {
            for (const auto &[k, v] : (*it)["per_size"].items()) {
                try {
                    spec.m_per_size[std::stoi(k)] = v.get<int>();
                } catch (const std::exception &) {
                    throw InputError("sweep spec: m_rule.per_size entry \"" + k + "\" is invalid");
                }
            }
        } else {
            throw InputError("sweep spec: m_rule needs \"ratio\" or \"per_size\"");
        }
    }
    spec.instances_per_size = get_or<int>(doc, "instances_per_size", spec.instances_per_size);
    if (doc.contains("protocols") && doc.contains("protocol")) {
        throw InputError("sweep spec: give either \"protocol\" or \"protocols\", not both");
    }
    std::vector<std::string> names;
    if (doc.contains("protocol")) {
        names.push_back(get_or<std::string>(doc, "protocol", ""));
    } else if (doc.contains("protocols")) {
        names = get_or<std::vector<std::string>>(doc, "protocols", {});
    }
    if (!names.empty()) {
        spec.protocols.clear();
        for (const auto &name : names) {
            const Protocol p = protocol_from_string(name);
            if (!spec.has(p)) {
                spec.protocols.push_back(p);
            }
        }
    }
    spec.d_values = get_or<std::vector<int>>(doc, "d", spec.d_values);
    spec.h = get_or<double>(doc, "h", spec.h);
    spec.max_iters = get_or<int>(doc, "max_iters", spec.max_iters);
    spec.max_steps = get_or<int>(doc, "max_steps", spec.max_steps);
    spec.hardest_fraction = get_or<double>(doc, "hardest_fraction", spec.hardest_fraction);
    if (auto it = doc.find("schedule"); it != doc.end()) {
        spec.b0 = get_or<double>(*it, "b0", spec.b0);
        spec.tau = get_or<double>(*it, "tau", spec.tau);
        spec.a = get_or<double>(*it, "a", spec.a);
        spec.dt = get_or<double>(*it, "dt", spec.dt);
    }
    if (auto it = doc.find("master_seed"); it != doc.end()) {
        spec.master_seed = parse_u64(*it, "master_seed");
    }
    if (auto it = doc.find("retry_budget"); it != doc.end()) {
        spec.retry_budget = parse_u64(*it, "retry_budget");
    }
    spec.jobs = get_or<int>(doc, "jobs", spec.jobs);
    spec.out = get_or<std::string>(doc, "out", spec.out.string());
    spec.validate();
    return spec;
}

SweepSpec SweepSpec::load(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open sweep spec " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return from_json(buf.str());
    } catch (const InputError &e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// runs.csv

const char *const kRunsCsvHeader =
    "instance_id,n,m,instance_seed,protocol,d,alpha,success_prob,hamming,cost,sample_hamming,sample_cost,"
    "steps_used,terminated_by,run_seed";

std::string format_row(const RunRow &r) {
    char prob[40];
    std::snprintf(prob, sizeof prob, "%.17g", r.success_prob);
    std::ostringstream os;
    os << r.instance_id << ',' << r.n << ',' << r.m << ',' << r.instance_seed << ',' << to_string(r.protocol) << ',';
    if (r.d >= 0) {
        os << r.d;
    } else {
        os << '-';
    }
    os << ',' << r.alpha << ',' << prob << ',' << r.hamming << ',' << r.cost << ',';
    if (r.sample_hamming >= 0) {
        os << r.sample_hamming << ',' << r.sample_cost;
    } else {
        os << "-,-";
    }
    os << ',' << r.steps_used << ',' << to_string(r.terminated_by) << ',' << r.run_seed;
    return os.str();
}

namespace {

std::vector<std::string> split_csv(const std::string &line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) {
        out.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

template <typename T>
T parse_number(const std::string &s, std::size_t line, const char *column) {
    std::istringstream is(s);
    T v{};
    is >> v;
    if (!is || !is.eof()) {
        throw InputError("runs.csv line " + std::to_string(line) + ": column " + column + " has invalid value \"" +
                         s + "\"");
    }
    return v;
}

double parse_double(const std::string &s, std::size_t line, const char *column) {
    char *end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) {
        throw InputError("runs.csv line " + std::to_string(line) + ": column " + column + " has invalid value \"" +
                         s + "\"");
    }
    return v;
}

}  // namespace

RunRow parse_row(const std::string &line, std::size_t line_number) {
    const auto f = split_csv(line);
    if (f.size() != 15) {
        throw InputError("runs.csv line " + std::to_string(line_number) + ": expected 15 columns, found " +
                         std::to_string(f.size()));
    }
    RunRow r;
    r.instance_id = f[0];
    r.n = parse_number<int>(f[1], line_number, "n");
    r.m = parse_number<int>(f[2], line_number, "m");
    r.instance_seed = parse_number<std::uint64_t>(f[3], line_number, "instance_seed");
    r.protocol = protocol_from_string(f[4]);
    r.d = f[5] == "-" ? -1 : parse_number<int>(f[5], line_number, "d");
    r.alpha = parse_number<int>(f[6], line_number, "alpha");
    r.success_prob = parse_double(f[7], line_number, "success_prob");
    r.hamming = parse_number<int>(f[8], line_number, "hamming");
    r.cost = parse_number<std::int64_t>(f[9], line_number, "cost");
    if (f[10] != "-") {
        r.sample_hamming = parse_number<int>(f[10], line_number, "sample_hamming");
        r.sample_cost = parse_number<std::int64_t>(f[11], line_number, "sample_cost");
    }
    r.steps_used = parse_number<int>(f[12], line_number, "steps_used");
    r.terminated_by = termination_from_string(f[13]);
    r.run_seed = parse_number<std::uint64_t>(f[14], line_number, "run_seed");
    return r;
}

std::vector<RunRow> read_runs_csv(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line) || line != kRunsCsvHeader) {
        throw InputError(path.string() + ": missing or unexpected header");
    }
    std::vector<RunRow> rows;
    std::size_t number = 1;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty()) {
            continue;
        }
        rows.push_back(parse_row(line, number));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Per-instance execution

std::uint64_t guess_seed(std::uint64_t master_seed, std::uint64_t instance_seed, int d) {
    return derive_seed({master_seed, kGuessStream, instance_seed, static_cast<std::uint64_t>(d)});
}

std::vector<CellResult> run_instance_cells(const Instance &inst, const SweepSpec &spec) {
    const Annealer annealer(inst, spec.schedule());
    const std::uint64_t seed = spec.master_seed;
    std::vector<CellResult> cells;
    cells.push_back({Protocol::standard, -1, run_standard(annealer, seed)});
    if (spec.has(Protocol::biased)) {
        for (int d : spec.d_values) {
            const SpinConfig guess = flip_d_spins(inst.solution, d, guess_seed(seed, inst.seed, d));
            cells.push_back({Protocol::biased, d, run_biased(annealer, guess, seed)});
        }
    }
    if (spec.has(Protocol::iterative)) {
        cells.push_back({Protocol::iterative, -1, run_iterative(annealer, seed, spec.max_iters)});
    }
    if (spec.has(Protocol::antibias)) {
        cells.push_back({Protocol::antibias, -1, run_antibias(annealer, seed, spec.h, spec.max_steps)});
    }
    return cells;
}

std::vector<RunRow> rows_for_instance(const std::string &id, const Instance &inst,
                                      const std::vector<CellResult> &cells) {
    std::vector<RunRow> rows;
    for (const CellResult &cell : cells) {
        for (const RunRecord &rec : cell.result.records) {
            RunRow r;
            r.instance_id = id;
            r.n = inst.n;
            r.m = inst.m();
            r.instance_seed = inst.seed;
            r.protocol = cell.protocol;
            r.d = cell.d;
            r.alpha = rec.alpha;
            r.success_prob = rec.success_prob;
            r.hamming = rec.hamming_to_solution;
            r.cost = rec.final_cost;
            if (rec.sampled_config) {
                r.sample_hamming = hamming(*rec.sampled_config, inst.solution);
                r.sample_cost = *rec.sampled_cost;
            }
            r.steps_used = cell.result.steps_used();
            r.terminated_by = cell.result.terminated_by;
            r.run_seed = rec.sample_seed;
            rows.push_back(std::move(r));
        }
    }
    return rows;
}

double SizeEnsemble::acceptance_rate() const {
    return attempts > 0 ? static_cast<double>(instances.size()) / static_cast<double>(attempts) : 0.0;
}

std::string instance_id(int n, std::size_t seq) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "n%d_%04zu", n, seq);
    return buf;
}

SizeEnsemble generate_ensemble(const SweepSpec &spec, int n) {
    SizeEnsemble ens;
    ens.n = n;
    ens.m = spec.clauses_for(n);
    const std::uint64_t master = derive_seed({spec.master_seed, kInstanceStream});
    std::uint64_t attempt = 0;
    while (static_cast<int>(ens.instances.size()) < spec.instances_per_size) {
        if (ens.attempts >= spec.retry_budget) {
            throw CapabilityError("instance generation for n=" + std::to_string(n) + ", m=" +
                                  std::to_string(ens.m) + " found only " + std::to_string(ens.instances.size()) +
                                  " unique-solution instances in " + std::to_string(ens.attempts) + " attempts");
        }
        SearchOutcome found = find_instance(n, ens.m, master, attempt, spec.retry_budget - ens.attempts);
        ens.attempts += found.attempts;
        attempt = found.next_attempt;
        if (found.instance) {
            ens.instances.push_back(std::move(*found.instance));
        }
    }
    return ens;
}

// ---------------------------------------------------------------------------
// Aggregation

std::vector<ResultSummary> cell_summaries(const std::vector<RunRow> &rows, int n, Protocol protocol, int d) {
    std::vector<ResultSummary> out;
    const std::string *current = nullptr;
    for (const RunRow &r : rows) {
        if (r.n != n || r.protocol != protocol || r.d != d) {
            continue;
        }
        if (current == nullptr || *current != r.instance_id) {
            out.emplace_back();
            out.back().instance_seed = r.instance_seed;
            out.back().terminated_by = r.terminated_by;
            current = &r.instance_id;
        }
        out.back().runs.push_back(RunSummary{r.success_prob, r.hamming, r.cost});
    }
    return out;
}

std::vector<CellStats> aggregate(const std::vector<RunRow> &rows, double hardest_fraction) {
    // Cells in first-appearance order within each size, sizes ascending.
    std::vector<std::tuple<int, int, Protocol, int>> cells;
    std::set<std::tuple<int, Protocol, int>> seen;
    for (const RunRow &r : rows) {
        if (seen.insert({r.n, r.protocol, r.d}).second) {
            cells.emplace_back(r.n, r.m, r.protocol, r.d);
        }
    }
    std::stable_sort(cells.begin(), cells.end(),
                     [](const auto &a, const auto &b) { return std::get<0>(a) < std::get<0>(b); });

    std::vector<CellStats> out;
    for (const auto &[n, m, protocol, d] : cells) {
        const auto standard = cell_summaries(rows, n, Protocol::standard, -1);
        const auto results = cell_summaries(rows, n, protocol, d);
        CellStats cs;
        cs.n = n;
        cs.m = m;
        cs.protocol = protocol;
        cs.d = d;
        cs.stats = metrics(results, standard, hardest_fraction);
        out.push_back(std::move(cs));
    }
    return out;
}

namespace {

ordered_json number_or_null(double v) {
    if (std::isfinite(v)) {
        return v;
    }
    return nullptr;
}

ordered_json mean_std_json(const MeanStd &ms) {
    return ordered_json{{"mean", ms.mean}, {"std", ms.std}, {"stderr", ms.standard_error()}};
}

ordered_json stats_json(const CellStats &cs) {
    const EnsembleStats &s = cs.stats;
    ordered_json j;
    j["n"] = cs.n;
    j["m"] = cs.m;
    j["protocol"] = std::string(to_string(cs.protocol));
    if (cs.d >= 0) {
        j["d"] = cs.d;
    } else {
        j["d"] = nullptr;
    }
    j["instances"] = s.instances;
    j["p_standard"] = mean_std_json(s.p_standard);
    j["p_final"] = mean_std_json(s.p_final);
    j["p_bar"] = s.p_bar;
    j["gamma"] = number_or_null(s.gamma);
    j["tau_standard"] = number_or_null(s.tau_standard);
    j["tau_standard_infinite"] = s.tau_standard_infinite;
    j["steps"] = mean_std_json(s.steps);
    j["hamming_standard"] = mean_std_json(s.hamming_standard);
    j["hamming_final"] = mean_std_json(s.hamming_final);
    j["cost_standard"] = mean_std_json(s.cost_standard);
    j["cost_final"] = mean_std_json(s.cost_final);
    j["exact_matches_standard"] = s.exact_matches_standard;
    j["exact_matches_final"] = s.exact_matches_final;
    j["step_cap_count"] = s.step_cap_count;
    j["cost_increases"] = s.cost_increases;
    j["hardest"] = {{"fraction", s.hardest.fraction},
                    {"count", s.hardest.count},
                    {"p_standard", s.hardest.p_standard},
                    {"p_bar", s.hardest.p_bar},
                    {"p_final", s.hardest.p_final}};
    return j;
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

std::string stats_to_json(const std::vector<CellStats> &stats, const SweepSpec &spec,
                          const std::vector<SizeEnsemble> &ensembles, const std::vector<std::string> &failures) {
    ordered_json doc;
    ordered_json meta;
    meta["code_version"] = QABIAS_VERSION;
    meta["generated_at"] = utc_timestamp();
    meta["spec"] = ordered_json::parse(spec.to_json());
    ordered_json gen = ordered_json::array();
    for (const auto &e : ensembles) {
        gen.push_back({{"n", e.n},
                       {"m", e.m},
                       {"instances", e.instances.size()},
                       {"attempts", e.attempts},
                       {"acceptance_rate", e.acceptance_rate()}});
    }
    meta["generation"] = gen;
    meta["failures"] = failures;
    doc["metadata"] = meta;
    ordered_json cells = ordered_json::array();
    for (const auto &cs : stats) {
        cells.push_back(stats_json(cs));
    }
    doc["cells"] = cells;
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Plot data

namespace {

void write_text(const std::filesystem::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        throw CapabilityError("write failed for " + path.string());
    }
}

std::string fmt(double v) {
    if (!std::isfinite(v)) {
        return v > 0 ? "inf" : "nan";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

const CellStats *find_cell(const std::vector<CellStats> &stats, int n, Protocol p, int d) {
    for (const auto &cs : stats) {
        if (cs.n == n && cs.protocol == p && cs.d == d) {
            return &cs;
        }
    }
    return nullptr;
}

void write_plot_data(const std::filesystem::path &dir, const SweepSpec &spec, const std::vector<RunRow> &rows,
                     const std::vector<CellStats> &stats) {
    std::vector<int> sizes = spec.sizes;
    std::sort(sizes.begin(), sizes.end());

    if (spec.has(Protocol::biased)) {
        std::ostringstream a, b;
        a << "# n m p_none p_none_se";
        b << "# n m hamming_none hamming_none_se";
        for (int d : spec.d_values) {
            a << " p_d" << d << " p_d" << d << "_se";
            b << " hamming_d" << d << " hamming_d" << d << "_se";
        }
        a << '\n';
        b << '\n';
        for (int n : sizes) {
            const CellStats *st = find_cell(stats, n, Protocol::standard, -1);
            if (st == nullptr) {
                continue;
            }
            a << n << ' ' << st->m << ' ' << fmt(st->stats.p_final.mean) << ' '
              << fmt(st->stats.p_final.standard_error());
            b << n << ' ' << st->m << ' ' << fmt(st->stats.hamming_final.mean) << ' '
              << fmt(st->stats.hamming_final.standard_error());
            for (int d : spec.d_values) {
                const CellStats *c = find_cell(stats, n, Protocol::biased, d);
                a << ' ' << (c ? fmt(c->stats.p_final.mean) : "nan") << ' '
                  << (c ? fmt(c->stats.p_final.standard_error()) : "nan");
                b << ' ' << (c ? fmt(c->stats.hamming_final.mean) : "nan") << ' '
                  << (c ? fmt(c->stats.hamming_final.standard_error()) : "nan");
            }
            a << '\n';
            b << '\n';
        }
        write_text(dir / "fig1a.dat", a.str());
        write_text(dir / "fig1b.dat", b.str());
    }

    if (spec.has(Protocol::iterative)) {
        std::ostringstream a, b;
        a << "# n m gamma p_standard p_standard_std p_iter p_iter_std iterations cost_standard cost_iter "
             "exact_standard exact_iter\n";
        b << "# n instance_seed p_standard p_iter hamming_standard hamming_iter cost_standard cost_iter "
             "iterations\n";
        for (int n : sizes) {
            const CellStats *c = find_cell(stats, n, Protocol::iterative, -1);
            if (c == nullptr) {
                continue;
            }
            const EnsembleStats &s = c->stats;
            a << n << ' ' << c->m << ' ' << fmt(s.gamma) << ' ' << fmt(s.p_standard.mean) << ' '
              << fmt(s.p_standard.std) << ' ' << fmt(s.p_final.mean) << ' ' << fmt(s.p_final.std) << ' '
              << fmt(s.steps.mean) << ' ' << fmt(s.cost_standard.mean) << ' ' << fmt(s.cost_final.mean) << ' '
              << s.exact_matches_standard << ' ' << s.exact_matches_final << '\n';
            const auto st = cell_summaries(rows, n, Protocol::standard, -1);
            const auto it = cell_summaries(rows, n, Protocol::iterative, -1);
            for (std::size_t i = 0; i < std::min(st.size(), it.size()); ++i) {
                b << n << ' ' << it[i].instance_seed << ' ' << fmt(st[i].final_run().success_prob) << ' '
                  << fmt(it[i].final_run().success_prob) << ' ' << st[i].final_run().hamming << ' '
                  << it[i].final_run().hamming << ' ' << st[i].final_run().cost << ' ' << it[i].final_run().cost
                  << ' ' << it[i].steps_used() << '\n';
            }
        }
        write_text(dir / "fig2a.dat", a.str());
        write_text(dir / "fig2b.dat", b.str());
    }

    if (spec.has(Protocol::antibias)) {
        std::ostringstream f3, t1;
        f3 << "# n instance_seed p_standard p_bar p_final steps_used terminated_by\n";
        const int pct = static_cast<int>(std::lround(spec.hardest_fraction * 100));
        t1 << "# n tau_ab tau_st p_bar p_final p_standard p_bar_" << pct << "pct p_final_" << pct
           << "pct p_standard_" << pct << "pct\n";
        for (int n : sizes) {
            const CellStats *c = find_cell(stats, n, Protocol::antibias, -1);
            if (c == nullptr) {
                continue;
            }
            const EnsembleStats &s = c->stats;
            t1 << n << ' ' << fmt(s.steps.mean) << ' ' << fmt(s.tau_standard) << ' ' << fmt(s.p_bar) << ' '
               << fmt(s.p_final.mean) << ' ' << fmt(s.p_standard.mean) << ' ' << fmt(s.hardest.p_bar) << ' '
               << fmt(s.hardest.p_final) << ' ' << fmt(s.hardest.p_standard) << '\n';
            const auto st = cell_summaries(rows, n, Protocol::standard, -1);
            const auto ab = cell_summaries(rows, n, Protocol::antibias, -1);
            for (std::size_t i = 0; i < std::min(st.size(), ab.size()); ++i) {
                double pbar = 0.0;
                for (const auto &r : ab[i].runs) {
                    pbar += r.success_prob;
                }
                pbar /= static_cast<double>(ab[i].runs.size());
                f3 << n << ' ' << ab[i].instance_seed << ' ' << fmt(st[i].final_run().success_prob) << ' '
                   << fmt(pbar) << ' ' << fmt(ab[i].final_run().success_prob) << ' ' << ab[i].steps_used() << ' '
                   << to_string(ab[i].terminated_by) << '\n';
            }
        }
        write_text(dir / "fig3.dat", f3.str());
        write_text(dir / "table1.dat", t1.str());
    }
}

std::size_t expected_cells(const SweepSpec &spec) {
    std::size_t cells = 1;
    if (spec.has(Protocol::biased)) {
        cells += spec.d_values.size();
    }
    cells += spec.has(Protocol::iterative) ? 1 : 0;
    cells += spec.has(Protocol::antibias) ? 1 : 0;
    return cells;
}

// True when `rows` holds every cell of one instance with all of its runs.
bool instance_complete(const std::vector<RunRow> &rows, const SweepSpec &spec) {
    std::map<std::pair<Protocol, int>, std::pair<int, int>> cells;  // -> (rows, steps_used)
    for (const RunRow &r : rows) {
        auto &entry = cells[{r.protocol, r.d}];
        entry.first += 1;
        entry.second = r.steps_used;
    }
    if (cells.size() != expected_cells(spec)) {
        return false;
    }
    for (const auto &[_, counts] : cells) {
        if (counts.first != counts.second) {
            return false;
        }
    }
    return true;
}

std::string spec_fingerprint(const SweepSpec &spec) {
    SweepSpec copy = spec;
    copy.jobs = 0;
    copy.out = "";
    return copy.to_json();
}

}  // namespace

// ---------------------------------------------------------------------------
// Driver

SweepOutcome run_sweep(const SweepSpec &spec, const SweepOptions &options) {
    spec.validate();
    namespace fs = std::filesystem;
    const fs::path dir = spec.out;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw CapabilityError("cannot create output directory " + dir.string() + ": " + ec.message());
    }
    auto say = [&](const std::string &msg) {
        if (options.progress) {
            options.progress(msg);
        }
    };

    // Spec identity guards resume against a directory from a different sweep.
    const fs::path spec_path = dir / "spec.json";
    const std::string fingerprint = spec_fingerprint(spec);
    const fs::path runs_path = dir / "runs.csv";
    if (fs::exists(runs_path)) {
        std::ifstream in(spec_path);
        std::stringstream buf;
        buf << in.rdbuf();
        if (!in || buf.str() != fingerprint) {
            throw InputError(runs_path.string() + " exists but was written by a different sweep spec");
        }
    } else {
        write_text(spec_path, fingerprint);
    }

    std::vector<SizeEnsemble> ensembles;
    struct Task {
        std::string id;
        const Instance *inst;
    };
    for (int n : spec.sizes) {
        ensembles.push_back(generate_ensemble(spec, n));
        say("n=" + std::to_string(n) + ": " + std::to_string(ensembles.back().instances.size()) +
            " instances, acceptance rate " + std::to_string(ensembles.back().acceptance_rate()));
    }
    std::vector<Task> tasks;
    for (const auto &e : ensembles) {
        for (std::size_t i = 0; i < e.instances.size(); ++i) {
            tasks.push_back({instance_id(e.n, i), &e.instances[i]});
        }
    }

    // Keep the complete-instance prefix of an existing runs.csv.
    std::vector<RunRow> kept;
    std::size_t done = 0;
    if (fs::exists(runs_path)) {
        std::vector<RunRow> existing;
        {
            std::ifstream in(runs_path);
            std::string line;
            std::getline(in, line);
            if (line != kRunsCsvHeader) {
                throw InputError(runs_path.string() + ": unexpected header");
            }
            std::size_t number = 1;
            while (std::getline(in, line)) {
                ++number;
                if (in.eof()) {
                    break;  // last line without newline: partial write
                }
                try {
                    existing.push_back(parse_row(line, number));
                } catch (const InputError &) {
                    break;
                }
            }
        }
        std::size_t pos = 0;
        while (pos < existing.size() && done < tasks.size()) {
            std::size_t end = pos;
            while (end < existing.size() && existing[end].instance_id == existing[pos].instance_id) {
                ++end;
            }
            std::vector<RunRow> group(existing.begin() + static_cast<std::ptrdiff_t>(pos),
                                      existing.begin() + static_cast<std::ptrdiff_t>(end));
            // A failed instance leaves a gap; everything after it is rerun.
            if (group.front().instance_id != tasks[done].id ||
                group.front().instance_seed != tasks[done].inst->seed || !instance_complete(group, spec)) {
                break;
            }
            kept.insert(kept.end(), group.begin(), group.end());
            ++done;
            pos = end;
        }
    }
    {
        std::ostringstream os;
        os << kRunsCsvHeader << '\n';
        for (const auto &r : kept) {
            os << format_row(r) << '\n';
        }
        write_text(runs_path, os.str());
    }

    SweepOutcome outcome;
    outcome.instances_total = tasks.size();
    outcome.instances_skipped = done;

    std::size_t limit = tasks.size();
    if (options.stop_after) {
        limit = std::min(limit, done + *options.stop_after);
    }

    // Worker pool; the calling thread is the single appender and writes
    // finished instances strictly in task order.
    struct Slot {
        bool ready = false;
        std::string text;
        std::string failure;
    };
    std::vector<Slot> slots(limit);
    std::mutex mutex;
    std::condition_variable cv;
    std::atomic<std::size_t> next{done};
    const unsigned hw = std::max(1U, std::thread::hardware_concurrency());
    const std::size_t pending = limit - done;
    const std::size_t jobs =
        std::min<std::size_t>(spec.jobs > 0 ? static_cast<std::size_t>(spec.jobs) : hw, std::max<std::size_t>(1, pending));

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= limit) {
                return;
            }
            Slot local;
            try {
                const auto cells = run_instance_cells(*tasks[i].inst, spec);
                std::ostringstream os;
                for (const auto &r : rows_for_instance(tasks[i].id, *tasks[i].inst, cells)) {
                    os << format_row(r) << '\n';
                }
                local.text = os.str();
            } catch (const std::exception &e) {
                local.failure = tasks[i].id + ": " + e.what();
            }
            local.ready = true;
            {
                std::lock_guard<std::mutex> lock(mutex);
                slots[i] = std::move(local);
            }
            cv.notify_all();
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < jobs && pending > 0; ++t) {
        pool.emplace_back(worker);
    }
    {
        std::ofstream out(runs_path, std::ios::binary | std::ios::app);
        for (std::size_t i = done; i < limit; ++i) {
            Slot slot;
            {
                std::unique_lock<std::mutex> lock(mutex);
                cv.wait(lock, [&] { return slots[i].ready; });
                slot = std::move(slots[i]);
            }
            if (!slot.failure.empty()) {
                outcome.failures.push_back(slot.failure);
                say("failed " + slot.failure);
            } else {
                out << slot.text;
                out.flush();
                if (!out) {
                    throw CapabilityError("write failed for " + runs_path.string());
                }
            }
            ++outcome.instances_run;
            say("done " + tasks[i].id + " (" + std::to_string(i + 1) + "/" + std::to_string(tasks.size()) + ")");
        }
    }
    for (auto &t : pool) {
        t.join();
    }

    outcome.complete = limit == tasks.size() && outcome.failures.empty();
    const std::vector<RunRow> rows = read_runs_csv(runs_path);
    outcome.stats = aggregate(rows, spec.hardest_fraction);
    write_text(dir / "stats.json", stats_to_json(outcome.stats, spec, ensembles, outcome.failures));
    write_plot_data(dir, spec, rows, outcome.stats);
    return outcome;
}

}  // namespace qabias
