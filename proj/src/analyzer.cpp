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
#include "avxsim/analyzer.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <optional>
#include <sstream>
#include <tuple>

#include "avxsim/error.hpp"

namespace avxsim {

namespace {

bool is_hex(char c) { return std::isxdigit(static_cast<unsigned char>(c)) != 0; }
bool is_word(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> tokens(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        const std::size_t b = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i > b) out.push_back(s.substr(b, i - b));
    }
    return out;
}

// "0000000000401126 <main>:" -> "main"
std::optional<std::string> function_header(std::string_view line) {
    line = trim(line);
    if (line.size() < 4 || line.back() != ':') return std::nullopt;
    std::size_t i = 0;
    while (i < line.size() && is_hex(line[i])) ++i;
    if (i == 0 || i >= line.size() || line[i] != ' ') return std::nullopt;
    const std::size_t lt = line.find('<', i);
    const std::size_t gt = line.rfind('>');
    if (lt == std::string_view::npos || gt == std::string_view::npos || gt < lt || gt + 2 != line.size())
        return std::nullopt;
    if (trim(line.substr(i, lt - i)).size() != 0) return std::nullopt;
    return std::string(line.substr(lt + 1, gt - lt - 1));
}

bool is_byte_token(std::string_view t) { return t.size() == 2 && is_hex(t[0]) && is_hex(t[1]); }

bool is_prefix(std::string_view t) {
    static constexpr std::string_view kPrefixes[] = {
        "rep",  "repz", "repnz", "repe", "repne", "lock",   "notrack", "bnd", "data16", "data32", "addr16",
        "addr32", "cs", "ds",    "es",   "fs",    "gs",     "ss",      "xacquire", "xrelease", "{evex}",
        "{vex}", "{vex2}", "{vex3}", "rex", "rex.w", "rex.W"};
    if (std::find(std::begin(kPrefixes), std::end(kPrefixes), t) != std::end(kPrefixes)) return true;
    // rex.R, rex.WB and friends
    return t.starts_with("rex.");
}

// Drops symbolic references ("<memcpy+0x10>") and trailing comments so that
// register names inside symbols never count.
std::string strip_annotations(std::string_view ops) {
    if (const auto hash = ops.find('#'); hash != std::string_view::npos) ops = ops.substr(0, hash);
    std::string out;
    int depth = 0;
    for (char c : ops) {
        if (c == '<') ++depth;
        else if (c == '>' && depth > 0) --depth;
        else if (depth == 0) out += c;
    }
    return std::string(trim(out));
}

bool names_register(std::string_view ops, std::string_view reg, bool att) {
    for (std::size_t p = ops.find(reg); p != std::string_view::npos; p = ops.find(reg, p + 1)) {
        const std::size_t after = p + reg.size();
        if (after >= ops.size() || !std::isdigit(static_cast<unsigned char>(ops[after]))) continue;
        if (att) {
            if (p > 0 && ops[p - 1] == '%') return true;
        } else if (p == 0 || !is_word(ops[p - 1])) {
            std::size_t e = after;
            while (e < ops.size() && std::isdigit(static_cast<unsigned char>(ops[e]))) ++e;
            if (e == ops.size() || !is_word(ops[e])) return true;
        }
    }
    return false;
}

} // namespace

std::vector<std::string> default_heavy_stems() {
    return {"vfmadd", "vfmsub", "vfnmadd", "vfnmsub", "vmul", "vpmul"};
}

InstructionClass classify_instruction(std::string_view mnemonic, std::string_view operands,
                                      const std::vector<std::string>& heavy_stems) {
    const std::string ops = strip_annotations(operands);
    const bool att = ops.find('%') != std::string::npos;
    InstructionClass cls;
    if (names_register(ops, "zmm", att))
        cls.width = VectorWidth::Wide512;
    else if (names_register(ops, "ymm", att))
        cls.width = VectorWidth::Wide256;
    if (cls.width != VectorWidth::None) {
        for (const auto& stem : heavy_stems)
            if (mnemonic.starts_with(stem)) cls.heavy = true;
    }
    return cls;
}

DisasmListing parse_disassembly(std::string_view text, const std::vector<std::string>& heavy_stems) {
    DisasmListing out;
    DisasmFunction* current = nullptr;
    bool saw_header = false;

    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const std::string_view raw = text.substr(pos, nl - pos);
        pos = nl + 1;
        const std::string_view line = trim(raw);
        if (line.empty()) continue;

        if (auto name = function_header(line)) {
            saw_header = true;
            out.functions.push_back(DisasmFunction{*name, {}, {}, 0, 0, 0, 0, 0});
            current = &out.functions.back();
            continue;
        }

        // "401126:\t55\tpush %rbp"
        const std::size_t colon = line.find(':');
        bool addr_ok = colon != std::string_view::npos && colon > 0;
        for (std::size_t i = 0; addr_ok && i < colon; ++i) addr_ok = is_hex(line[i]);
        if (!addr_ok || current == nullptr) {
            ++out.skipped_lines;
            continue;
        }
        auto tok = tokens(line.substr(colon + 1));
        std::size_t i = 0;
        while (i < tok.size() && is_byte_token(tok[i])) ++i;
        while (i + 1 < tok.size() && is_prefix(tok[i])) ++i;
        // "(bad)" and ".byte 0xff" are data in the text section, not code.
        if (i >= tok.size() || tok[i] == "(bad)" || tok[i] == "..." || tok[i].front() == '.' || is_prefix(tok[i])) {
            ++out.skipped_lines;
            continue;
        }
        Instruction ins;
        ins.mnemonic = std::string(tok[i]);
        // Operands: the original text after the mnemonic, so internal spacing
        // (Intel "QWORD PTR [rax]") survives.
        const char* mn_end = tok[i].data() + tok[i].size();
        ins.operands = std::string(trim(std::string_view(mn_end, static_cast<std::size_t>(line.data() + line.size() - mn_end))));

        const auto cls = classify_instruction(ins.mnemonic, ins.operands, heavy_stems);
        ++current->total;
        if (cls.width == VectorWidth::Wide256) {
            ++current->wide256;
            if (cls.heavy) ++current->heavy256;
        } else if (cls.width == VectorWidth::Wide512) {
            ++current->wide512;
            if (cls.heavy) ++current->heavy512;
        }
        current->instructions.push_back(std::move(ins));
    }
    if (!saw_header) throw Error("not a disassembly listing (no function headers found)");
    return out;
}

RatioReport ratio_report(const std::vector<DisasmFunction>& functions) {
    RatioReport rep;
    for (const auto& f : functions) {
        if (f.total == 0) continue;
        RatioRow r;
        r.function = f.name;
        r.source = f.source;
        r.total = f.total;
        r.wide256 = f.wide256;
        r.wide512 = f.wide512;
        r.heavy512 = f.heavy512;
        r.ratio = static_cast<double>(f.wide256 + f.wide512) / static_cast<double>(f.total);
        r.heavy = f.heavy256 + f.heavy512 > 0;
        rep.rows.push_back(std::move(r));
    }
    std::stable_sort(rep.rows.begin(), rep.rows.end(), [](const RatioRow& a, const RatioRow& b) {
        if (a.ratio != b.ratio) return a.ratio > b.ratio;
        return std::tie(a.function, a.source) < std::tie(b.function, b.source);
    });
    return rep;
}

RatioReport RatioReport::filtered(double min_ratio) const {
    RatioReport out;
    for (const auto& r : rows)
        if (r.ratio >= min_ratio) out.rows.push_back(r);
    return out;
}

std::string RatioReport::to_text() const {
    std::size_t width = 8;
    for (const auto& r : rows) width = std::max(width, r.function.size());
    std::ostringstream os;
    char buf[128];
    std::snprintf(buf, sizeof buf, " %8s %8s %8s %8s %7s %5s  ", "total", "ymm", "zmm", "heavy512", "ratio", "heavy");
    os << std::string("function") << std::string(width - 8, ' ') << buf << "source\n";
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, " %8lld %8lld %8lld %8lld %7.4f %5s  ", static_cast<long long>(r.total),
                      static_cast<long long>(r.wide256), static_cast<long long>(r.wide512),
                      static_cast<long long>(r.heavy512), r.ratio, r.heavy ? "yes" : "no");
        os << r.function << std::string(width - r.function.size(), ' ') << buf << r.source << '\n';
    }
    return os.str();
}

nlohmann::ordered_json RatioReport::to_json() const {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json j;
        j["function"] = r.function;
        j["source"] = r.source;
        j["total"] = r.total;
        j["wide256"] = r.wide256;
        j["wide512"] = r.wide512;
        j["heavy512"] = r.heavy512;
        j["ratio"] = r.ratio;
        j["heavy"] = r.heavy;
        arr.push_back(std::move(j));
    }
    return arr;
}

std::string emit_folded(const std::vector<AttributionRecord>& attribution) {
    std::vector<std::pair<std::string, std::int64_t>> lines;
    for (const auto& a : attribution)
        if (a.cycles > 0) lines.emplace_back(a.task + ";" + a.label, a.cycles);
    std::sort(lines.begin(), lines.end(), [](const auto& x, const auto& y) {
        return x.second != y.second ? x.second > y.second : x.first < y.first;
    });
    std::string out;
    for (const auto& [stack, n] : lines) out += stack + " " + std::to_string(n) + "\n";
    return out;
}

} // namespace avxsim
