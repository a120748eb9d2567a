// Copyright 2026 The cogroute Authors
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

#ifndef COGROUTE_ERRORS_HPP_
#define COGROUTE_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace cogroute {

// Base of every error raised by the library. The CLI maps any of these to a
// nonzero exit status and prints what().
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed configuration text.
class ParseError : public Error {
 public:
  using Error::Error;
};

// A well-formed value violates a documented invariant. The message names the
// first violated invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// The PU state chain has more than one closed communicating class.
class ReducibleChainError : public Error {
 public:
  using Error::Error;
};

// Footprints leave no free grid point to carry a medial axis.
class NoAxisError : public Error {
 public:
  using Error::Error;
};

// A source cannot reach any CPC station.
class UnreachableError : public Error {
 public:
  using Error::Error;
};

// M/G/1 queue with utilization >= 1.
class InstabilityError : public Error {
 public:
  using Error::Error;
};

// Chosen next hop is not in the chooser's candidate set.
class InvalidActionError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class MissingContinuationError : public Error {
 public:
  using Error::Error;
};

class NonSimplexError : public Error {
 public:
  using Error::Error;
};

// Route realization reached a node without candidates before a CPC.
class DeadEndError : public Error {
 public:
  using Error::Error;
};

}  // namespace cogroute

#endif  // COGROUTE_ERRORS_HPP_
