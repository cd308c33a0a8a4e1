// Copyright 2026 The urc Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace urc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed numeric input: NaN entries, wrong trace, impure state.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent setup: dimension or channel mismatch, bad class labels.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A structural precondition such as hermiticity or unitarity failed.
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// Requested a mode that the routine does not implement.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// A computation produced a non-finite value.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace urc
