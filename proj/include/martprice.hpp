// Copyright 2026 The martprice Authors
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

#pragma once

#include "martprice/arbitrage.hpp"
#include "martprice/bsm.hpp"
#include "martprice/embedding.hpp"
#include "martprice/errors.hpp"
#include "martprice/experiment.hpp"
#include "martprice/io.hpp"
#include "martprice/linalg.hpp"
#include "martprice/lp.hpp"
#include "martprice/market.hpp"
#include "martprice/pinv.hpp"
#include "martprice/rng.hpp"
#include "martprice/simplex.hpp"
#include "martprice/zsg.hpp"
