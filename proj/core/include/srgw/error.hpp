// Copyright 2026 The srgw-sbm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SRGW_ERROR_HPP_
#define SRGW_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace srgw {

// Bad input: wrong dimensions, out-of-range parameters, malformed files.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// A value left the domain a loss is defined on (e.g. log(0) in the Bernoulli
// NLL). Usually means a connectivity matrix was not clamped upstream.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Exhaustive oracles refuse instances whose K^N enumeration exceeds the guard.
class InstanceTooLarge : public std::length_error {
 public:
  explicit InstanceTooLarge(const std::string& what) : std::length_error(what) {}
};

}  // namespace srgw

#endif  // SRGW_ERROR_HPP_
