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
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "avxsim/report.hpp"

namespace avxsim {

enum class VectorWidth : std::uint8_t { None, Wide256, Wide512 };

struct InstructionClass {
    VectorWidth width = VectorWidth::None;
    bool heavy = false;
    bool operator==(const InstructionClass&) const = default;
};

struct Instruction {
    std::string mnemonic;
    std::string operands;
};

struct DisasmFunction {
    std::string name;
    std::string source; // listing the function came from
    std::vector<Instruction> instructions;
    std::int64_t total = 0;
    std::int64_t wide256 = 0;
    std::int64_t wide512 = 0;
    std::int64_t heavy256 = 0;
    std::int64_t heavy512 = 0;
};

struct DisasmListing {
    std::vector<DisasmFunction> functions;
    /// Lines that were neither headers nor decodable instructions.
    std::int64_t skipped_lines = 0;
};

/// Multiply and FMA mnemonic stems.
std::vector<std::string> default_heavy_stems();

InstructionClass classify_instruction(std::string_view mnemonic, std::string_view operands,
                                      const std::vector<std::string>& heavy_stems = default_heavy_stems());

/// Parses objdump-style listings (AT&T or Intel syntax). Throws Error("not a
/// disassembly listing") when no function header is found.
DisasmListing parse_disassembly(std::string_view text,
                                const std::vector<std::string>& heavy_stems = default_heavy_stems());

struct RatioRow {
    std::string function;
    std::string source;
    std::int64_t total = 0;
    std::int64_t wide256 = 0;
    std::int64_t wide512 = 0;
    std::int64_t heavy512 = 0;
    double ratio = 0.0;
    bool heavy = false; // contains at least one heavy wide instruction
};

struct RatioReport {
    std::vector<RatioRow> rows;

    /// Rows with ratio >= min_ratio, order kept.
    RatioReport filtered(double min_ratio) const;
    std::string to_text() const;
    nlohmann::ordered_json to_json() const;
};

/// Rows sorted by descending ratio, then name (then source). Functions without
/// instructions are dropped.
RatioReport ratio_report(const std::vector<DisasmFunction>& functions);

/// Flame-graph input: `task;label cycles`, highest count first, then
/// lexicographic. Empty table gives empty text.
std::string emit_folded(const std::vector<AttributionRecord>& attribution);

} // namespace avxsim
