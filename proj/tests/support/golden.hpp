/*
 * Copyright 2026 The avxsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace avxsim::testing {

struct GoldenSummary {
    int listings = 0;
    int functions = 0;
    std::vector<std::string> mismatches;
};

// Parses every listing named in <dir>/expected.json and compares per-function
// counts and the skipped-line count against the hand counts stored there.
GoldenSummary check_golden_corpus(const std::filesystem::path& dir);

} // namespace avxsim::testing
