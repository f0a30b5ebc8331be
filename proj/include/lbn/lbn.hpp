// Copyright 2026 The LBN Authors
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

// Umbrella header.

#pragma once

#include "lbn/belief_prop.hpp"
#include "lbn/error.hpp"
#include "lbn/exact_oracle.hpp"
#include "lbn/factor_graph.hpp"
#include "lbn/grounding.hpp"
#include "lbn/harness.hpp"
#include "lbn/logic.hpp"
#include "lbn/slot_grammar.hpp"
