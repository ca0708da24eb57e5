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
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "avxsim/analyzer.hpp"
#include "avxsim/engine.hpp"
#include "avxsim/error.hpp"
#include "avxsim/workloads.hpp"
#include "golden.hpp"

using namespace avxsim;

namespace {

const std::filesystem::path kCorpus = std::filesystem::path(AVXSIM_SOURCE_DIR) / "tests" / "data" / "disasm";

std::string listing_of(int wide, int total) {
    std::ostringstream os;
    os << "0000000000401000 <f>:\n";
    for (int i = 0; i < total; ++i)
        os << "  401" << 100 + i << ":\t62 f1 fd 48 d4 c1\t"
           << (i < wide ? "vpaddq %zmm1,%zmm0,%zmm0" : "add    %rbx,%rax") << "\n";
    return os.str();
}

DisasmFunction counted(const std::string& name, int wide, int total) {
    DisasmListing l = parse_disassembly(listing_of(wide, total));
    DisasmFunction f = l.functions.at(0);
    f.name = name;
    return f;
}

} // namespace

TEST_CASE("analyzer: register-name classification") {
    CHECK(classify_instruction("vpaddq", "%zmm0,%zmm1,%zmm2") == InstructionClass{VectorWidth::Wide512, false});
    CHECK(classify_instruction("vfmadd231pd", "%zmm3,%zmm4,%zmm5") == InstructionClass{VectorWidth::Wide512, true});
    CHECK(classify_instruction("mov", "%rax,%rbx") == InstructionClass{VectorWidth::None, false});
    CHECK(classify_instruction("vmulps", "%ymm1,%ymm2,%ymm3") == InstructionClass{VectorWidth::Wide256, true});
    CHECK(classify_instruction("vpaddd", "ymm0, ymm1, zmm2") == InstructionClass{VectorWidth::Wide512, false});
    // Multiplies on xmm registers are not wide, so not heavy either.
    CHECK(classify_instruction("vmulpd", "%xmm1,%xmm2,%xmm3") == InstructionClass{VectorWidth::None, false});
    CHECK(classify_instruction("frobnicate", "%zmm0") == InstructionClass{VectorWidth::Wide512, false});
    CHECK(classify_instruction("vpxord", "-0x40(%rsp),%zmm1,%zmm1").width == VectorWidth::Wide512);
}

TEST_CASE("analyzer: custom heavy stems") {
    const std::vector<std::string> stems{"vpxor"};
    CHECK(classify_instruction("vpxord", "%zmm0,%zmm1,%zmm1", stems).heavy);
    CHECK_FALSE(classify_instruction("vfmadd231ps", "%zmm0,%zmm1,%zmm1", stems).heavy);
}

TEST_CASE("analyzer: one function with ten instructions") {
    const DisasmListing l = parse_disassembly(listing_of(3, 10));
    REQUIRE(l.functions.size() == 1);
    CHECK(l.functions[0].name == "f");
    CHECK(l.functions[0].total == 10);
    CHECK(l.functions[0].wide512 == 3);
    CHECK(l.functions[0].wide256 == 0);
}

TEST_CASE("analyzer: inputs that are not listings") {
    CHECK_THROWS_AS(parse_disassembly(""), Error);
    CHECK_THROWS_AS(parse_disassembly("hello\nworld\n"), Error);
    std::ifstream in(kCorpus / "not_a_listing.txt");
    std::ostringstream ss;
    ss << in.rdbuf();
    REQUIRE_FALSE(ss.str().empty());
    CHECK_THROWS_AS(parse_disassembly(ss.str()), Error);
}

TEST_CASE("analyzer: golden corpus matches the hand counts") {
    const auto sum = testing::check_golden_corpus(kCorpus);
    CHECK(sum.listings >= 5);
    CHECK(sum.functions >= 12);
    for (const auto& m : sum.mismatches) MESSAGE(m);
    CHECK(sum.mismatches.empty());
}

TEST_CASE("analyzer: crafted corpus ratios and order") {
    std::ifstream in(kCorpus / "crafted_att.s");
    std::ostringstream ss;
    ss << in.rdbuf();
    const DisasmListing l = parse_disassembly(ss.str());
    const RatioReport r = ratio_report(l.functions);
    REQUIRE(r.rows.size() == 3);
    CHECK(r.rows[0].ratio == doctest::Approx(1.0));
    CHECK(r.rows[1].ratio == doctest::Approx(0.25));
    CHECK(r.rows[2].ratio == doctest::Approx(0.0));
    CHECK(r.rows[0].function == "poly1305_blocks_avx512");
    CHECK(r.rows[0].heavy);
    CHECK_FALSE(r.rows[2].heavy);

    const RatioReport hi = r.filtered(0.5);
    REQUIRE(hi.rows.size() == 1);
    CHECK(hi.rows[0].function == "poly1305_blocks_avx512");
}

TEST_CASE("analyzer: ratio report edge cases") {
    SUBCASE("all wide") {
        const RatioReport r = ratio_report({counted("a", 10, 40), counted("b", 50, 50)});
        REQUIRE(r.rows.size() == 2);
        CHECK(r.rows[0].function == "b");
        CHECK(r.rows[0].ratio == 1.0);
    }
    SUBCASE("ties sort by name") {
        const RatioReport r = ratio_report({counted("zz", 1, 2), counted("aa", 2, 4)});
        CHECK(r.rows[0].function == "aa");
        CHECK(r.rows[1].function == "zz");
    }
    SUBCASE("empty functions are dropped") {
        DisasmFunction empty;
        empty.name = "stub";
        const RatioReport r = ratio_report({empty, counted("x", 0, 3)});
        REQUIRE(r.rows.size() == 1);
        CHECK(r.rows[0].function == "x");
    }
    SUBCASE("text and json agree on row count") {
        const RatioReport r = ratio_report({counted("a", 1, 4), counted("b", 0, 4)});
        CHECK(r.to_json().size() == 2);
        CHECK(r.to_text().find("a") != std::string::npos);
    }
}

TEST_CASE("analyzer: folded stacks") {
    CHECK(emit_folded({{"t1", "ssl", 12345}}) == "t1;ssl 12345\n");
    CHECK(emit_folded({}).empty());
    const std::string out = emit_folded({{"b", "x", 5}, {"a", "y", 5}, {"c", "z", 9}});
    CHECK(out == "c;z 9\na;y 5\nb;x 5\n");
}

// The grant window (500 us) is far longer than one TLS section (~25 us), so
// most THROTTLE cycles land in the scalar code that follows. TLS still has to
// stand out by throttle density.
TEST_CASE("analyzer: web run throttle points at TLS and folds to the counter") {
    SimConfig c;
    c.sched.policy = Policy::Baseline;
    c.run.horizon = SimTime::from_ms(400);
    c.run.warmup = SimTime::from_ms(50);
    WebWorkloadParams p;
    p.simd_variant = SimdVariant::AVX512;
    const SimReport r = run_simulation(c, gen_web(p, 1));
    REQUIRE(r.throttle_cycles() > 0);

    std::istringstream in(emit_folded(r.attribution));
    std::int64_t total = 0, ssl = 0;
    for (std::string line; std::getline(in, line);) {
        const auto sp = line.rfind(' ');
        const std::int64_t n = std::stoll(line.substr(sp + 1));
        total += n;
        if (line.substr(0, sp).ends_with(";ssl")) ssl += n;
    }
    CHECK(total == r.throttle_cycles());
    const double tls_share_of_work =
        static_cast<double>(p.crypto_cycles[2]) / static_cast<double>(p.crypto_cycles[2] + p.scalar_cycles);
    const double tls_share_of_throttle = static_cast<double>(ssl) / static_cast<double>(total);
    CHECK(tls_share_of_throttle > 5.0 * tls_share_of_work);
}
