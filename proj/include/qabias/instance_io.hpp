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

#ifndef QABIAS_INSTANCE_IO_HPP
#define QABIAS_INSTANCE_IO_HPP

#include <filesystem>
#include <string>

#include "qabias/exact_cover.hpp"

namespace qabias {

/// Instance file layout:
///   {"n": int, "m": int, "seed": "<u64 decimal>",
///    "clauses": [[i,j,k], ...], "solution_bits": "0101..."}
/// Clauses are written in lexicographic order; bit m of solution_bits is
/// string position m.
std::string instance_to_json(const Instance &inst);

/// Parses and validates an instance document. Errors are InputError with the
/// offending key (and clause position) in the message. The stored solution
/// must have cost 0; uniqueness is not re-enumerated here.
Instance instance_from_json(const std::string &text);

Instance load_instance(const std::filesystem::path &path);
void save_instance(const Instance &inst, const std::filesystem::path &path);

}  // namespace qabias

#endif
