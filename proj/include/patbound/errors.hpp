// SPDX-License-Identifier: Apache-2.0
//
// patbound: finite-blocklength error bounds for pilot-assisted MIMO links
// Copyright (C) 2026 The patbound authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace patbound
{

//! A configuration violated one or more invariants; all of them are listed.
class ConfigError : public std::invalid_argument
{
public:
    explicit ConfigError(std::vector<std::string> violations)
        : std::invalid_argument(join(violations))
        , violations_(std::move(violations))
    {
    }

    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    static std::string join(const std::vector<std::string>& items)
    {
        std::string out;
        for (const auto& item : items)
        {
            if (!out.empty())
                out += "; ";
            out += item;
        }
        return out;
    }

    std::vector<std::string> violations_;
};

//! Channel estimate with zero norm; cannot be normalized by a combiner.
class DegenerateEstimateError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

//! Monte Carlo statistics unusable for the requested evaluation.
class EstimatorError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

}  // namespace patbound
