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

#include "qabias/instance_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qabias/errors.hpp"

namespace qabias {

using nlohmann::json;

std::string instance_to_json(const Instance &inst) {
    std::vector<Clause> sorted = inst.clauses;
    std::sort(sorted.begin(), sorted.end());
    json clauses = json::array();
    for (const Clause &c : sorted) {
        clauses.push_back({c.indices[0], c.indices[1], c.indices[2]});
    }
    // nlohmann::ordered_json keeps the documented key order in the file.
    nlohmann::ordered_json doc;
    doc["n"] = inst.n;
    doc["m"] = inst.m();
    doc["seed"] = std::to_string(inst.seed);
    doc["clauses"] = std::move(clauses);
    doc["solution_bits"] = inst.solution.bits();
    return doc.dump() + "\n";
}

namespace {

const json &require(const json &doc, const char *key) {
    auto it = doc.find(key);
    if (it == doc.end()) {
        throw InputError(std::string("instance: missing key \"") + key + "\"");
    }
    return *it;
}

int require_int(const json &doc, const char *key) {
    const json &v = require(doc, key);
    if (!v.is_number_integer()) {
        throw InputError(std::string("instance: key \"") + key + "\" must be an integer");
    }
    return v.get<int>();
}

}  // namespace

Instance instance_from_json(const std::string &text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        throw InputError(std::string("instance: JSON parse error: ") + e.what());
    }
    if (!doc.is_object()) {
        throw InputError("instance: top level must be an object");
    }

    Instance inst;
    inst.n = require_int(doc, "n");
    const int m = require_int(doc, "m");

    const json &seed = require(doc, "seed");
    if (!seed.is_string()) {
        throw InputError("instance: key \"seed\" must be a decimal string");
    }
    try {
        std::size_t used = 0;
        const std::string s = seed.get<std::string>();
        inst.seed = std::stoull(s, &used);
        if (used != s.size()) {
            throw std::invalid_argument(s);
        }
    } catch (const std::exception &) {
        throw InputError("instance: key \"seed\" is not a valid unsigned 64-bit decimal");
    }

    const json &clauses = require(doc, "clauses");
    if (!clauses.is_array()) {
        throw InputError("instance: key \"clauses\" must be an array");
    }
    for (std::size_t pos = 0; pos < clauses.size(); ++pos) {
        const json &c = clauses[pos];
        if (!c.is_array() || c.size() != 3 || !c[0].is_number_integer() || !c[1].is_number_integer() ||
            !c[2].is_number_integer()) {
            throw InputError("instance: clauses[" + std::to_string(pos) + "] must be an array of 3 integers");
        }
        const int i = c[0].get<int>(), j = c[1].get<int>(), k = c[2].get<int>();
        if (i < 0 || j < 0 || k < 0 || i >= inst.n || j >= inst.n || k >= inst.n || i == j || j == k || i == k) {
            throw InputError("instance: clauses[" + std::to_string(pos) + "] = [" + std::to_string(i) + "," +
                             std::to_string(j) + "," + std::to_string(k) +
                             "] needs three distinct indices in [0, " + std::to_string(inst.n) + ")");
        }
        inst.clauses.push_back(Clause::make(i, j, k));
    }
    if (m != inst.m()) {
        throw InputError("instance: \"m\" is " + std::to_string(m) + " but \"clauses\" has " +
                         std::to_string(inst.m()) + " entries");
    }

    const json &bits = require(doc, "solution_bits");
    if (!bits.is_string()) {
        throw InputError("instance: key \"solution_bits\" must be a string");
    }
    try {
        inst.solution = SpinConfig::from_bits(bits.get<std::string>());
    } catch (const InputError &e) {
        throw InputError(std::string("instance: key \"solution_bits\": ") + e.what());
    }

    validate_structure(inst);
    if (cost_of_config(inst, inst.solution) != 0) {
        throw InputError("instance: \"solution_bits\" does not satisfy every clause");
    }
    return inst;
}

Instance load_instance(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open instance file " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return instance_from_json(buf.str());
    } catch (const InputError &e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

void save_instance(const Instance &inst, const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw CapabilityError("cannot write instance file " + path.string());
    }
    out << instance_to_json(inst);
    if (!out) {
        throw CapabilityError("write failed for " + path.string());
    }
}

}  // namespace qabias
