// Copyright 2026 The Authors.
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

#ifndef DICTSEL_ERRORS_HPP_
#define DICTSEL_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace dictsel {

// Base class for every error raised by the library. Callers that only care
// about "something went wrong" catch this; the subclasses name the failure.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define DICTSEL_DEFINE_ERROR(Name)        \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

DICTSEL_DEFINE_ERROR(RankDeficient);
DICTSEL_DEFINE_ERROR(InvalidGroundSet);
DICTSEL_DEFINE_ERROR(InvalidSide);
DICTSEL_DEFINE_ERROR(DimensionMismatch);
DICTSEL_DEFINE_ERROR(TooLarge);
DICTSEL_DEFINE_ERROR(InvalidConstraint);
DICTSEL_DEFINE_ERROR(InfeasibleState);
DICTSEL_DEFINE_ERROR(UnsupportedConstraint);
DICTSEL_DEFINE_ERROR(InsufficientPatches);
DICTSEL_DEFINE_ERROR(IoError);
DICTSEL_DEFINE_ERROR(ParseError);
DICTSEL_DEFINE_ERROR(SchemaVersionMismatch);
DICTSEL_DEFINE_ERROR(ConfigError);
DICTSEL_DEFINE_ERROR(InvalidArgument);

#undef DICTSEL_DEFINE_ERROR

}  // namespace dictsel

#endif  // DICTSEL_ERRORS_HPP_
