#include <gtest/gtest.h>

#include <random>
#include <set>
#include <string>

#include "gfcx/core/error.hpp"
#include "gfcx/core/gc_code.hpp"
#include "gfcx/core/phone.hpp"
#include "support/code_oracle.hpp"

namespace gfcx {
namespace {

using testing::reference_accepts;

Errc error_of(std::string_view raw)
{
    try {
        validate_code(raw);
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an error for '" << raw << "'";
    return Errc::Io;
}

TEST(GcCodeTest, AcceptsMixedCaseExample)
{
    const auto code = validate_code("Wa10");
    EXPECT_EQ(code.text(), "Wa10");
}

TEST(GcCodeTest, LengthBounds)
{
    EXPECT_EQ(error_of("A"), Errc::TooShort);
    EXPECT_EQ(error_of(""), Errc::TooShort);
    EXPECT_EQ(error_of("ABCDEFG"), Errc::TooLong);
    EXPECT_NO_THROW(validate_code("ab"));
    EXPECT_NO_THROW(validate_code("abcdef"));
}

TEST(GcCodeTest, ReservedDelimiterReportsOffset)
{
    try {
        validate_code("a:b");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::BadCharacter);
        ASSERT_TRUE(e.has_position());
        EXPECT_EQ(e.position(), 1u);
    }
    EXPECT_EQ(error_of("a|"), Errc::BadCharacter);
    EXPECT_EQ(error_of("\"ab"), Errc::BadCharacter);
    EXPECT_EQ(error_of("a b"), Errc::BadCharacter);
    EXPECT_EQ(error_of("ab\x7f"), Errc::BadCharacter);
    EXPECT_EQ(error_of("\xc3\xa9x"), Errc::BadCharacter);
}

TEST(GcCodeTest, CaseSensitive)
{
    EXPECT_NE(validate_code("Wa10"), validate_code("wa10"));
}

TEST(GcCodeTest, AlphabetHas91Symbols)
{
    int n = 0;
    for (int c = 0; c < 256; ++c)
        n += is_code_byte(static_cast<unsigned char>(c));
    EXPECT_EQ(n, 91);
    EXPECT_EQ(kCodeAlphabetSize, 91u);
}

TEST(GcCodeTest, RandomizedAgreesWithReference)
{
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> len(0, 8);
    std::uniform_int_distribution<int> byte(0, 255);
    for (int i = 0; i < 20000; ++i) {
        std::string s(static_cast<std::size_t>(len(rng)), ' ');
        for (auto& c : s)
            c = static_cast<char>(rng() % 4 == 0 ? byte(rng) : 0x21 + static_cast<int>(rng() % 94));
        EXPECT_EQ(is_valid_code(s), reference_accepts(s)) << s;
        bool threw = false;
        try {
            validate_code(s);
        } catch (const Error&) {
            threw = true;
        }
        EXPECT_EQ(!threw, reference_accepts(s));
    }
}

TEST(PhoneNumberTest, ParsesAndMasks)
{
    const auto p = parse_phone("+15550001111");
    EXPECT_EQ(p.text(), "+15550001111");
    EXPECT_EQ(p.masked(), "+*********11");
    EXPECT_THROW(parse_phone("15550001111"), Error);
    EXPECT_THROW(parse_phone("+123456"), Error);
    EXPECT_THROW(parse_phone("+1234567890123456"), Error);
    EXPECT_THROW(parse_phone("++1234567"), Error);
    EXPECT_NO_THROW(parse_phone("+1234567"));
}

} // namespace
} // namespace gfcx
