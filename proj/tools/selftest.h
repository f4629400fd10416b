/* Copyright 2026 The GateCNN Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef GATECNN_TOOLS_SELFTEST_H_
#define GATECNN_TOOLS_SELFTEST_H_

#include <ostream>

namespace gatecnn::tools {

/// Quick oracle and invariant checks; prints one line per check and returns
/// true when all pass.
bool run_selftest(std::ostream& out);

}  // namespace gatecnn::tools

#endif  // GATECNN_TOOLS_SELFTEST_H_
