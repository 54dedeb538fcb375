// Copyright 2026 The cueaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace cueaudit {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or missing user input: dataset files, word lists, CSV rows.
class InputError : public Error {
 public:
  using Error::Error;
};

// Configuration files, prompt templates, CLI flag combinations.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A precondition on an argument was violated by the caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Non-transient provider failure (bad request, auth, malformed payload).
class ProviderError : public Error {
 public:
  using Error::Error;
};

// Retriable provider failure: timeout, rate limit, 5xx.
class TransientError : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

class RetriesExhausted : public ProviderError {
 public:
  RetriesExhausted(const std::string& what, int attempts)
      : ProviderError(what), attempts_(attempts) {}
  int attempts() const { return attempts_; }

 private:
  int attempts_;
};

// A live network call was attempted while running with --offline.
class OfflineViolation : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

class CacheCorruption : public Error {
 public:
  using Error::Error;
};

// Raw judge output did not resolve to exactly one scale label.
class LabelParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace cueaudit
