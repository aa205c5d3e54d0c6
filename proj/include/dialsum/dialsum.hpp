// Copyright 2026 The dialsum Authors.
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

#include "dialsum/analysis.hpp"
#include "dialsum/cleaning.hpp"
#include "dialsum/core.hpp"
#include "dialsum/objective.hpp"
#include "dialsum/parallel.hpp"
#include "dialsum/pipeline.hpp"
#include "dialsum/principal.hpp"
#include "dialsum/records.hpp"
#include "dialsum/text_metrics.hpp"
