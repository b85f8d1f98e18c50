#include <gtest/gtest.h>

#include <string>

#include "glyphguide/aux_stream.hpp"
#include "glyphguide/errors.hpp"
#include "glyphguide/guidance.hpp"
#include "test_support.hpp"

namespace glyphguide {
namespace {

std::vector<std::uint8_t> from_hex(const std::string& hex) {
    std::vector<std::uint8_t> out;
    for (std::size_t i = 0; i < hex.size(); i += 2) out.push_back(static_cast<std::uint8_t>(std::stoi(hex.substr(i, 2), nullptr, 16)));
    return out;
}

Polygon rect(double x0, double y0, double x1, double y1) { return Polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}); }

AuxPayload two_words() {
    return {640, 480,
            {{rect(10, 20, 110, 50), "HELLO"}, {Polygon({{300, 400}, {305, 398}, {302, 410}}), "\xC3\xA9!"}}};
}

std::string decode_error_of(const std::vector<std::uint8_t>& bytes) {
    try {
        decode_aux(bytes);
    } catch (const DecodeError& e) {
        return e.what();
    }
    return "";
}

// Body bytes and container bytes produced by an independent serializer
// (Python zlib, raw DEFLATE, level 9).
TEST(AuxGolden, TwoWordBody) {
    EXPECT_EQ(serialize_aux_body(two_words()),
              from_hex("8005e00302040a14c80100003cc701000548454c4c4f03ac0290030a03051803c3a921"));
}

TEST(AuxGolden, TwoWordContainer) {
    const auto golden = from_hex(
        "5442415801260000006b607dc0ccc4c22572829181c1e6382303ab87ab8f8f3ff31aa609cc5cccac12cc87572a0200");
    EXPECT_EQ(encode_aux(two_words()), golden);
    EXPECT_EQ(decode_aux(golden), two_words());
}

TEST(AuxGolden, EmptyPayload) {
    const AuxPayload empty{256, 256, {}};
    EXPECT_EQ(serialize_aux_body(empty), from_hex("8002800200"));
    const auto golden = from_hex("5442415801070000006b606a60620000");
    EXPECT_EQ(encode_aux(empty), golden);
    EXPECT_LT(golden.size(), 32u);
    EXPECT_EQ(decode_aux(golden), empty);
}

TEST(AuxStream, RandomRoundtrip) {
    Rng rng(31);
    for (int i = 0; i < 500; ++i) {
        const AuxPayload p = testing::random_payload(rng);
        EXPECT_EQ(decode_aux(encode_aux(p)), p);
    }
}

TEST(AuxStream, RecordOrderIsSignificant) {
    AuxPayload a = two_words(), b = two_words();
    std::swap(b.records[0], b.records[1]);
    EXPECT_NE(encode_aux(a), encode_aux(b));
}

TEST(AuxStream, ValidatesBeforeEncoding) {
    AuxPayload p = two_words();
    p.records[0].polygon = Polygon({{0.5, 0}, {10, 0}, {10, 10}});
    EXPECT_THROW(encode_aux(p), ValidationError);
    p = two_words();
    p.records[1].text = "";
    EXPECT_THROW(encode_aux(p), ValidationError);
    p.records[1].text = std::string(256, 'a');
    EXPECT_THROW(encode_aux(p), ValidationError);
    p.records[1].text = "\xFF";
    EXPECT_THROW(encode_aux(p), ValidationError);
    p = two_words();
    p.records[0].polygon = rect(0, 0, 65536, 4);
    EXPECT_THROW(encode_aux(p), ValidationError);
    p = two_words();
    p.image_width = 0;
    EXPECT_THROW(encode_aux(p), ValidationError);
}

TEST(AuxStream, BadMagic) {
    auto bytes = encode_aux(two_words());
    bytes[0] = 'X';
    EXPECT_EQ(decode_error_of(bytes), "bad magic");
}

TEST(AuxStream, UnsupportedVersion) {
    auto bytes = encode_aux(two_words());
    bytes[4] = 2;
    EXPECT_NE(decode_error_of(bytes).find("version"), std::string::npos);
}

TEST(AuxStream, TruncationIsAllOrNothing) {
    const auto bytes = encode_aux(two_words());
    for (std::size_t cut = 0; cut < bytes.size(); ++cut) {
        const std::vector<std::uint8_t> prefix(bytes.begin(), bytes.begin() + static_cast<long>(cut));
        EXPECT_THROW(decode_aux(prefix), DecodeError) << "cut at " << cut;
    }
}

TEST(AuxStream, TrailingBytesRejected) {
    auto bytes = encode_aux(two_words());
    bytes.push_back(0);
    EXPECT_THROW(decode_aux(bytes), DecodeError);
}

// Frames a hand-built body so body-level checks can be exercised.
std::vector<std::uint8_t> frame(const std::vector<std::uint8_t>& body) {
    std::vector<std::uint8_t> compressed;
    // Stored (uncompressed) DEFLATE block: BFINAL=1, BTYPE=00, LEN, NLEN.
    compressed.push_back(0x01);
    const auto len = static_cast<std::uint16_t>(body.size());
    compressed.push_back(static_cast<std::uint8_t>(len & 0xFF));
    compressed.push_back(static_cast<std::uint8_t>(len >> 8));
    compressed.push_back(static_cast<std::uint8_t>(~len & 0xFF));
    compressed.push_back(static_cast<std::uint8_t>((~len >> 8) & 0xFF));
    compressed.insert(compressed.end(), body.begin(), body.end());
    std::vector<std::uint8_t> out = {'T', 'B', 'A', 'X', 1};
    const auto clen = static_cast<std::uint32_t>(compressed.size());
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(clen >> (8 * i)));
    out.insert(out.end(), compressed.begin(), compressed.end());
    return out;
}

TEST(AuxStream, StoredBlockDecodes) {
    EXPECT_EQ(decode_aux(frame(serialize_aux_body(two_words()))), two_words());
}

TEST(AuxStream, BodyErrorsNameTheField) {
    // Varint with eleven continuation bytes overflows 64 bits.
    std::vector<std::uint8_t> overflow(11, 0xFF);
    overflow.push_back(0x01);
    EXPECT_NE(decode_error_of(frame(overflow)).find("image width"), std::string::npos);

    auto body = serialize_aux_body(two_words());
    auto bad_utf8 = body;
    bad_utf8[bad_utf8.size() - 3] = 0xFF;  // first byte of "é"
    EXPECT_NE(decode_error_of(frame(bad_utf8)).find("record[1].text"), std::string::npos);

    auto cut = body;
    cut.pop_back();
    EXPECT_NE(decode_error_of(frame(cut)).find("record[1].text"), std::string::npos);

    auto negative = serialize_aux_body({64, 64, {{Polygon({{0, 0}, {4, 0}, {4, 4}}), "a"}}});
    negative[6] = 0x09;  // first dx: zigzag(-5), vertex leaves the coordinate range
    EXPECT_NE(decode_error_of(frame(negative)).find("record[0].x"), std::string::npos);
}

TEST(AuxFilter, KeepRule) {
    // 120 and 1000 px^2 per character at T = 150.
    const AuxPayload p{1000, 1000, {{rect(0, 0, 60, 10), "HELLO"}, {rect(0, 100, 100, 150), "HELLO"}}};
    const AuxPayload kept = filter_records(p, FilterConfig{150});
    ASSERT_EQ(kept.records.size(), 1u);
    EXPECT_EQ(kept.records[0], p.records[0]);
    // Boundary: exactly T is kept.
    const AuxPayload edge{100, 100, {{rect(0, 0, 15, 10), "a"}}};
    EXPECT_EQ(filter_records(edge, FilterConfig{150}).records.size(), 1u);
    EXPECT_EQ(filter_records(edge, FilterConfig{149.999}).records.size(), 0u);
}

TEST(AuxFilter, EmptyAndSpaceOnly) {
    const AuxPayload empty{10, 10, {}};
    EXPECT_EQ(filter_records(empty, {}), empty);
    const AuxPayload spaces{10, 10, {{rect(0, 0, 2, 2), "  "}}};
    EXPECT_TRUE(filter_records(spaces, {}).records.empty());
    EXPECT_THROW(filter_records(empty, FilterConfig{0}), ValidationError);
}

TEST(AuxFilter, IdempotentAndMonotone) {
    Rng rng(32);
    for (int i = 0; i < 50; ++i) {
        AuxPayload p{512, 512, {}};
        for (int k = 0; k < 10; ++k) {
            const int x = rng.integer(0, 400), y = rng.integer(0, 400);
            p.records.push_back({rect(x, y, x + rng.integer(4, 100), y + rng.integer(4, 40)),
                                 testing::random_text(rng, static_cast<std::size_t>(rng.integer(1, 8)))});
        }
        const double t1 = rng.uniform(10, 400), t2 = t1 + rng.uniform(0, 400);
        const AuxPayload a = filter_records(p, FilterConfig{t1});
        const AuxPayload b = filter_records(p, FilterConfig{t2});
        EXPECT_EQ(filter_records(a, FilterConfig{t1}), a);
        for (const AuxRecord& r : a.records) EXPECT_NE(std::find(b.records.begin(), b.records.end(), r), b.records.end());
        EXPECT_LE(aux_bpp(transmit_aux(a), 512, 512), aux_bpp(transmit_aux(p), 512, 512));
    }
}

TEST(AuxBpp, Arithmetic) {
    EXPECT_EQ(aux_bpp(0, 10, 10), 0.0);
    EXPECT_DOUBLE_EQ(aux_bpp(1310, 1024, 1024), 8.0 * 1310 / (1024.0 * 1024.0));
    EXPECT_NEAR(aux_bpp(1310, 1024, 1024), 0.009994, 1e-6);
    EXPECT_THROW(aux_bpp(1, 0, 10), ValidationError);
}

TEST(AuxBpp, TwentyWordsOnMegapixelCanvas) {
    Rng rng(33);
    AuxPayload p{1024, 1024, {}};
    for (int i = 0; i < 20; ++i) {
        const int x = rng.integer(0, 900), y = rng.integer(0, 1000);
        p.records.push_back({rect(x, y, x + 50, y + 12), testing::random_text(rng, 5)});
    }
    EXPECT_LE(aux_bpp(encode_aux(p), 1024, 1024), 0.004);
}

TEST(AuxTransmit, EmptyPayloadSendsNothing) {
    const AuxPayload empty{320, 200, {}};
    EXPECT_TRUE(transmit_aux(empty).empty());
    EXPECT_EQ(receive_aux({}, 320, 200), empty);
    EXPECT_EQ(receive_aux(transmit_aux(two_words()), 1, 1), two_words());
}

TEST(AuxTransmit, EmptyStreamRendersZeroGuidance) {
    const AuxPayload decoded = decode_aux(encode_aux(AuxPayload{48, 32, {}}));
    EXPECT_EQ(render_guidance(decoded, 32, 48).glyphs().count(), 0u);
}

}  // namespace
}  // namespace glyphguide
