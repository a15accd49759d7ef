// Copyright 2026 The mbcredit Authors
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

#ifndef MBCREDIT_ERRORS_HPP_
#define MBCREDIT_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace mbcredit {

// Shapes or dimensions of arguments do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A documented precondition was violated by the caller.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Numerical trouble (NaN/Inf) detected at runtime.
class DiagnosticsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration key, value, or method string.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace internal {

[[noreturn]] inline void ThrowDimension(const std::string& what) {
  throw DimensionError(what);
}

[[noreturn]] inline void ThrowContract(const std::string& what) {
  throw ContractError(what);
}

}  // namespace internal

#define MBCREDIT_CHECK_DIM(cond, msg)                                  \
  do {                                                                 \
    if (!(cond)) ::mbcredit::internal::ThrowDimension(std::string(msg)); \
  } while (0)

#define MBCREDIT_CHECK(cond, msg)                                       \
  do {                                                                  \
    if (!(cond)) ::mbcredit::internal::ThrowContract(std::string(msg)); \
  } while (0)

}  // namespace mbcredit

#endif  // MBCREDIT_ERRORS_HPP_
