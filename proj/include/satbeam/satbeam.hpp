// SPDX-License-Identifier: Apache-2.0
//
// satbeam - fixed on-board beam generation for multibeam satellite payloads
// Copyright (C) 2026 The satbeam authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "satbeam/core.hpp"
#include "satbeam/channel_model.hpp"
#include "satbeam/beam_design.hpp"
#include "satbeam/link_processing.hpp"
#include "satbeam/metrics.hpp"
#include "satbeam/scenario.hpp"
#include "satbeam/harness.hpp"
#include "satbeam/matrix_io.hpp"
#include "satbeam/validation.hpp"
