#include <gtest/gtest.h>

#include <random>

#include "gfcx/core/error.hpp"
#include "gfcx/exchange/message.hpp"
#include "support/message_gen.hpp"

namespace gfcx::exchange {
namespace {

Id128 sequential_id()
{
    Id128 id;
    for (std::size_t i = 0; i < 16; ++i)
        id.bytes[i] = static_cast<std::uint8_t>(i);
    return id;
}

Errc decode_error(std::string_view bytes)
{
    try {
        decode_message(bytes);
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::Io;
}

TEST(CodecTest, RequestGoldenBytes)
{
    const std::string expected_payload =
        std::string("\x00\x01\x02\x03\x04\x05\x06\x07\x08\x09\x0a\x0b\x0c\x0d\x0e\x0f", 16) + std::string("\x04Wa10\x00", 6);
    const std::string expected = std::string("GFCX\x01\x01\x00\x00\x00\x16", 10) + expected_payload;
    const auto bytes = encode_message(Request{sequential_id(), validate_code("Wa10"), std::nullopt});
    EXPECT_EQ(bytes, expected);
    EXPECT_NE(to_frame(Request{sequential_id(), validate_code("Wa10"), std::nullopt}).payload.find("\x04Wa10"), std::string::npos);
}

TEST(CodecTest, RequestWithRequesterCode)
{
    const auto bytes = encode_message(Request{sequential_id(), validate_code("Wa10"), validate_code("Gg")});
    EXPECT_EQ(bytes.substr(10 + 16), std::string("\x04Wa10\x01\x02Gg", 9));
}

TEST(CodecTest, FrameErrors)
{
    const auto good = encode_message(Ack{sequential_id()});
    auto bad_magic = good;
    bad_magic[3] = 'Y';
    EXPECT_EQ(decode_error(bad_magic), Errc::BadMagic);

    // version gate fires before the payload is looked at
    auto bad_version = std::string("GFCX\x02\x01\xff\xff\xff\xff", 10);
    EXPECT_EQ(decode_error(bad_version), Errc::UnsupportedVersion);

    EXPECT_EQ(decode_error(good.substr(0, good.size() - 1)), Errc::Truncated);
    EXPECT_EQ(decode_error(good.substr(0, 7)), Errc::Truncated);

    auto unknown = good;
    unknown[5] = 0x7F;
    EXPECT_EQ(decode_error(unknown), Errc::UnknownMsgType);

    EXPECT_EQ(decode_error(std::string("GFCX\x01\x01\x00\x01\x00\x00", 10)), Errc::PayloadTooLarge);
    EXPECT_EQ(decode_error(good + "x"), Errc::MalformedPayload);

    Frame huge{kResponse, std::string(kMaxPayload + 1, 'x')};
    try {
        encode_frame(huge);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::PayloadTooLarge);
    }
}

TEST(CodecTest, PayloadGrammarErrors)
{
    // REQUEST with an invalid code inside
    std::string payload(16, '\0');
    payload += std::string("\x01" "A" "\x00", 3);
    EXPECT_EQ(decode_error(encode_frame(Frame{kRequest, payload})), Errc::MalformedPayload);
    // bad presence flag
    payload = std::string(16, '\0') + std::string("\x02" "ab" "\x07", 4);
    EXPECT_EQ(decode_error(encode_frame(Frame{kRequest, payload})), Errc::MalformedPayload);
    // bytes32 length beyond the payload
    payload = std::string(16, '\0') + std::string("\x00\x00\x01\x00", 4);
    EXPECT_EQ(decode_error(encode_frame(Frame{kResponse, payload})), Errc::Truncated);
}

TEST(CodecTest, RoundTripRandomMessages)
{
    std::mt19937_64 rng(99);
    for (int i = 0; i < 100'000; ++i) {
        const auto m = testing::random_message(rng);
        const auto bytes = encode_message(m);
        ASSERT_EQ(decode_message(bytes), m);
        ASSERT_EQ(encode_message(decode_message(bytes)), bytes);
    }
}

TEST(CodecTest, FuzzNeverEscapesAsNonLibraryError)
{
    std::mt19937_64 rng(1234);
    std::size_t accepted = 0;
    for (int i = 0; i < 100'000; ++i) {
        std::string bytes;
        if (i % 2 == 0) {
            bytes = encode_message(testing::random_message(rng));
            const int flips = 1 + static_cast<int>(rng() % 4);
            for (int k = 0; k < flips; ++k)
                bytes[rng() % bytes.size()] = static_cast<char>(rng());
            if (rng() % 4 == 0)
                bytes.resize(rng() % (bytes.size() + 1));
        } else {
            bytes.resize(rng() % 48);
            for (auto& c : bytes)
                c = static_cast<char>(rng());
            if (rng() % 2)
                bytes.replace(0, std::min<std::size_t>(bytes.size(), 5), std::string("GFCX\x01", 5));
        }
        try {
            decode_message(bytes);
            ++accepted;
        } catch (const Error&) {
        }
    }
    EXPECT_GT(accepted, 0u);
}

TEST(CodecTest, StreamPeek)
{
    const auto bytes = encode_message(Ack{sequential_id()});
    EXPECT_FALSE(peek_frame_length(std::string_view(bytes).substr(0, 3)));
    EXPECT_FALSE(peek_frame_length(std::string_view(bytes).substr(0, 9)));
    EXPECT_EQ(peek_frame_length(bytes), bytes.size());
    EXPECT_THROW(peek_frame_length("GFCY"), Error);
}

} // namespace
} // namespace gfcx::exchange
