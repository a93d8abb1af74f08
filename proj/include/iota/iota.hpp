/*
 * Copyright 2026 The iota-sim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Umbrella header. Everything except io/ is free of third-party includes.

#pragma once

#include "iota/butterfly/all_reduce.hpp"
#include "iota/butterfly/analytics.hpp"
#include "iota/butterfly/plan.hpp"
#include "iota/clasp/clasp.hpp"
#include "iota/error.hpp"
#include "iota/incentives/ledger.hpp"
#include "iota/incentives/stability.hpp"
#include "iota/kernel/blob_store.hpp"
#include "iota/kernel/codec.hpp"
#include "iota/kernel/event_queue.hpp"
#include "iota/kernel/network.hpp"
#include "iota/kernel/rng.hpp"
#include "iota/model/data.hpp"
#include "iota/model/mlp.hpp"
#include "iota/model/payload.hpp"
#include "iota/model/reference.hpp"
#include "iota/orchestrator/protocol.hpp"
#include "iota/orchestrator/scenario.hpp"
#include "iota/validator/validator.hpp"
