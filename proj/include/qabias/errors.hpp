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

#ifndef QABIAS_ERRORS_HPP
#define QABIAS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qabias {

/// Bad caller input: malformed files, out-of-range parameters, size mismatches.
class InputError : public std::invalid_argument {
   public:
    explicit InputError(const std::string &what) : std::invalid_argument(what) {}
};

/// The request is well formed but exceeds what the simulator supports
/// (enumeration bounds, dense-matrix size limits, exhausted retry budgets).
class CapabilityError : public std::runtime_error {
   public:
    explicit CapabilityError(const std::string &what) : std::runtime_error(what) {}
};

}  // namespace qabias

#endif
