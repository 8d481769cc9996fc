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

#include "lmax/errors.hpp"
#include "lmax/grid.hpp"
#include "lmax/lorentz.hpp"
#include "lmax/maximal.hpp"
#include "lmax/random.hpp"
#include "lmax/rearrange.hpp"
#include "lmax/verify.hpp"
#include "lmax/weight_classes.hpp"
#include "lmax/weights.hpp"
