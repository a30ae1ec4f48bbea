// Copyright 2026 The sfc-nfp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NFP_NFP_HPP
#define NFP_NFP_HPP

#include "nfp/csv.hpp"
#include "nfp/dependency.hpp"
#include "nfp/errors.hpp"
#include "nfp/fixture.hpp"
#include "nfp/flow_table.hpp"
#include "nfp/match.hpp"
#include "nfp/policy.hpp"
#include "nfp/queueing.hpp"
#include "nfp/scenario.hpp"
#include "nfp/simulator.hpp"
#include "nfp/vnf_kind.hpp"

#endif  // NFP_NFP_HPP
