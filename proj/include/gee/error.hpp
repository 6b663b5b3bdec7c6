// Copyright 2026 The GEE Toolkit Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace gee {

// Base of all toolkit errors. The CLI maps each subclass to an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration, missing credentials, invalid flags.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input data: unparseable lines, duplicate ids, corrupt annotations.
class DataError : public Error {
 public:
  using Error::Error;
};

// A completion provider failed after retries, or returned something unusable.
class ProviderError : public Error {
 public:
  ProviderError(const std::string& what, int status, std::string raw = {})
      : Error(what), status_(status), raw_(std::move(raw)) {}

  int status() const noexcept { return status_; }
  // Raw reply text, when the failure is a parse failure of a reply.
  const std::string& raw() const noexcept { return raw_; }

 private:
  int status_;
  std::string raw_;
};

}  // namespace gee
