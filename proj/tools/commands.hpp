// Copyright 2026 The lgmle Authors
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

#ifndef LGMLE_TOOLS_COMMANDS_HPP_
#define LGMLE_TOOLS_COMMANDS_HPP_

#include "config.hpp"

namespace lgmle::cli {

// Each command returns the process exit code; library errors propagate.
int cmd_schedule(const Overrides& overrides, bool verify_lemma1);
int cmd_simulate(const Overrides& overrides);
int cmd_loglik(const Overrides& overrides);
int cmd_fit(const Overrides& overrides);
int cmd_risk(const Overrides& overrides);
int cmd_diagnose(const Overrides& overrides);

}  // namespace lgmle::cli

#endif  // LGMLE_TOOLS_COMMANDS_HPP_
