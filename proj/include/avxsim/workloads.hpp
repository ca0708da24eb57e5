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

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "avxsim/program.hpp"

namespace avxsim {

/// Instruction set the TLS library was built for.
enum class SimdVariant : std::uint8_t { SSE4 = 0, AVX2 = 1, AVX512 = 2 };

inline constexpr std::array<SimdVariant, 3> kAllVariants = {SimdVariant::SSE4, SimdVariant::AVX2,
                                                            SimdVariant::AVX512};

std::string_view to_string(SimdVariant v);
std::optional<SimdVariant> parse_variant(std::string_view text);

/// Segment kind the crypto section of a request runs as.
SegmentKind crypto_segment_kind(SimdVariant v);

/// Closed-loop HTTPS server: every connection issues its next request as soon
/// as the previous one finished.
///
/// The cycle budgets are fitted (see docs/calibration.md); the crypto figures
/// for AVX2 and AVX-512 follow from the SSE4 one through the measured
/// "openssl speed" gains and the respective license frequencies.
struct WebWorkloadParams {
    SimdVariant simd_variant = SimdVariant::AVX512;
    /// Crypto cycles per request, indexed by SimdVariant.
    std::array<std::int64_t, 3> crypto_cycles{260'753, 80'716, 48'226};
    /// Compression and server logic per request.
    std::int64_t scalar_cycles = 12'170'889;
    int n_server_cores = 12;
    int avx_core_count = 2;
    int n_connections = 240;
    /// Requests per connection program before it wraps around.
    int requests_per_program = 16;
    /// Per-request cycle jitter, as a fraction (uniform in [1 - j, 1 + j]).
    double jitter = 0.1;

    /// Throws ConfigError (field path relative to the workload section).
    void validate() const;
};

struct MicrobenchParams {
    int n_threads = 26;
    int n_cores = 12;
    /// Share of every loop iteration marked as AVX.
    double avx_fraction = 0.05;
    std::int64_t loop_cycles = 1'000'000;

    void validate() const;
};

std::vector<TaskSpec> gen_web(const WebWorkloadParams& params, std::uint64_t seed);
std::vector<TaskSpec> gen_microbench(const MicrobenchParams& params, std::uint64_t seed);

/// Same tasks with every SetKind removed.
std::vector<TaskSpec> strip_kind_changes(const std::vector<TaskSpec>& tasks);

struct TraceWorkload {
    std::vector<TaskSpec> tasks;
    std::vector<std::string> warnings;
};

/// Parses the line-oriented program format:
///
///   task <name> [ratio=<r>] [arrival=<ns>] [loop]
///   compute <scalar|avx1|avx2demand> <cycles> [label]
///   setkind <scalar|avx>
///   endunit
///   repeat <n>  ...  end
///
/// Entries before the first task line form a task named "main". `#` starts a
/// comment. Syntax errors throw ParseError with the line number.
/// Program invariant violations are warnings, or ParseError when `strict`.
TraceWorkload parse_trace(std::string_view text, bool strict = false);
TraceWorkload load_trace(const std::filesystem::path& path, bool strict = false);

/// Inverse of parse_trace (repeat blocks are not reconstructed).
std::string serialize_trace(const std::vector<TaskSpec>& tasks);

} // namespace avxsim
