// Copyright 2026 The lmax Authors
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

namespace lmax {

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Two grid objects that must share a GridDomain do not.
class DomainMismatch : public InvalidArgument {
 public:
  DomainMismatch() : InvalidArgument("grid objects live on different domains") {}
};

/// An operation that needs a nonzero function received f = 0.
class EmptyFunction : public InvalidArgument {
 public:
  EmptyFunction() : InvalidArgument("function vanishes identically") {}
};

}  // namespace lmax
