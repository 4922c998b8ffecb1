// Copyright 2026 The nvrepeater Authors
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

#include "benchmarks.hpp"
#include "channel_models.hpp"
#include "composite_schemes.hpp"
#include "experiment_stats.hpp"
#include "keyrate.hpp"
#include "mc_oracle.hpp"
#include "nv_memory.hpp"
#include "optimizer.hpp"
#include "parameter_file.hpp"
#include "single_photon.hpp"
#include "state_algebra.hpp"
