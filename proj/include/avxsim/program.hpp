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

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "avxsim/freqmodel.hpp"
#include "avxsim/time.hpp"

namespace avxsim {

/// Declared classification of a task. Untyped tasks never called
/// with_avx()/without_avx().
enum class TaskKind : std::uint8_t { Scalar = 0, Avx = 1, Untyped = 2 };

std::string_view to_string(TaskKind kind);

/// What a compute segment asks of the frequency model.
enum class SegmentKind : std::uint8_t { ScalarDense, AvxL1, AvxL2 };

std::string_view to_string(SegmentKind kind);

/// The license level an AVX-heavy segment demands; nullopt for scalar work.
std::optional<FrequencyLevel> demand_of(SegmentKind kind);

struct Compute {
    SegmentKind kind = SegmentKind::ScalarDense;
    std::int64_t cycles = 0;
    /// Section label used for throttle attribution. Empty means "use the
    /// segment kind name".
    std::string label;

    std::string_view effective_label() const;
    bool operator==(const Compute&) const = default;
};

/// with_avx() / without_avx(). Only Scalar and Avx are valid targets.
struct SetKind {
    TaskKind kind = TaskKind::Scalar;
    bool operator==(const SetKind&) const = default;
};

/// One work unit (request, loop iteration) completed.
struct EndUnit {
    bool operator==(const EndUnit&) const = default;
};

using ProgramEntry = std::variant<Compute, SetKind, EndUnit>;

struct Program {
    std::vector<ProgramEntry> entries;
    /// Closed-loop programs start over when they reach the end.
    bool loop = false;

    std::int64_t total_cycles() const;
    bool operator==(const Program&) const = default;
};

/// A task as a workload describes it, before the scheduler owns it.
struct TaskSpec {
    std::string name;
    double priority_ratio = 1.0;
    std::shared_ptr<const Program> program;
    SimTime arrival{};
};

/// Structural checks. Returns human-readable warnings for soft violations
/// (AVX-heavy work outside a with_avx bracket, zero-cycle segments).
std::vector<std::string> validate_program(const Program& program);

/// Copy of `program` with every SetKind removed (annotations disabled).
Program strip_kind_changes(const Program& program);

} // namespace avxsim
