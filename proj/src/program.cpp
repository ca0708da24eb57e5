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
#include "avxsim/program.hpp"

namespace avxsim {

std::string_view to_string(TaskKind kind) {
    switch (kind) {
    case TaskKind::Scalar: return "scalar";
    case TaskKind::Avx: return "avx";
    case TaskKind::Untyped: return "untyped";
    }
    return "?";
}

std::string_view to_string(SegmentKind kind) {
    switch (kind) {
    case SegmentKind::ScalarDense: return "scalar";
    case SegmentKind::AvxL1: return "avx1";
    case SegmentKind::AvxL2: return "avx2demand";
    }
    return "?";
}

std::optional<FrequencyLevel> demand_of(SegmentKind kind) {
    switch (kind) {
    case SegmentKind::ScalarDense: return std::nullopt;
    case SegmentKind::AvxL1: return FrequencyLevel::L1;
    case SegmentKind::AvxL2: return FrequencyLevel::L2;
    }
    return std::nullopt;
}

std::string_view Compute::effective_label() const {
    return label.empty() ? to_string(kind) : std::string_view{label};
}

std::int64_t Program::total_cycles() const {
    std::int64_t sum = 0;
    for (const auto& e : entries)
        if (const auto* c = std::get_if<Compute>(&e)) sum += c->cycles;
    return sum;
}

std::vector<std::string> validate_program(const Program& program) {
    std::vector<std::string> warnings;
    TaskKind declared = TaskKind::Untyped;
    for (std::size_t i = 0; i < program.entries.size(); ++i) {
        const auto& e = program.entries[i];
        if (const auto* sk = std::get_if<SetKind>(&e)) {
            declared = sk->kind;
        } else if (const auto* c = std::get_if<Compute>(&e)) {
            if (c->cycles <= 0)
                warnings.push_back("entry " + std::to_string(i) + ": compute segment with " +
                                   std::to_string(c->cycles) + " cycles");
            if (demand_of(c->kind) && declared != TaskKind::Avx)
                warnings.push_back("entry " + std::to_string(i) +
                                   ": AVX-heavy segment outside a setkind avx section "
                                   "(missing annotation?)");
        }
    }
    return warnings;
}

Program strip_kind_changes(const Program& program) {
    Program out;
    out.loop = program.loop;
    for (const auto& e : program.entries)
        if (!std::holds_alternative<SetKind>(e)) out.entries.push_back(e);
    return out;
}

} // namespace avxsim
