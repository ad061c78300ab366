// Copyright 2026 The DyadicOT Authors
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

#ifndef DYADICOT_ERROR_H_
#define DYADICOT_ERROR_H_

#include <stdexcept>
#include <string>

namespace dyadicot {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dataset ingestion failures (unknown ids, unreadable files).
class IngestError : public Error {
 public:
  using Error::Error;
};

// Malformed file contents (inconsistent widths, bad numbers, bad headers).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Invalid arguments or violated preconditions.
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

// Transport problems whose marginals cannot be coupled.
class InfeasibleInputError : public Error {
 public:
  using Error::Error;
};

// A metric whose defining ratio or conditional does not exist on the sample.
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

}  // namespace dyadicot

#endif  // DYADICOT_ERROR_H_
