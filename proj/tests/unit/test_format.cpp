#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <random>

#include "espp/data/format.hpp"

using namespace espp;

namespace {

Dataset random_dataset(std::mt19937_64& rng) {
    std::uniform_int_distribution<std::uint32_t> ch(1, 40), st(1, 30), ns(0, 12), nc(1, 6);
    Dataset d;
    d.channels = ch(rng);
    d.steps = st(rng);
    d.n_classes = static_cast<std::uint16_t>(nc(rng));
    const auto n = ns(rng);
    std::bernoulli_distribution on(std::uniform_real_distribution<double>(0.0, 0.4)(rng));
    for (std::uint32_t i = 0; i < n; ++i) {
        Sample s;
        s.label = static_cast<ClassId>(std::uniform_int_distribution<int>(0, d.n_classes - 1)(rng));
        for (std::uint32_t t = 0; t < d.steps; ++t)
            for (std::uint32_t c = 0; c < d.channels; ++c)
                if (on(rng)) s.events.push_back({static_cast<std::uint16_t>(t), c});
        d.samples.push_back(std::move(s));
    }
    return d;
}

std::vector<std::byte> single_event_file() {
    Dataset d{4, 3, 2, {Sample{1, {{0, 0}}}}};
    return encode_espk(d);
}

void put_u16(std::vector<std::byte>& b, std::size_t at, std::uint16_t v) {
    b[at] = std::byte(v & 0xFF);
    b[at + 1] = std::byte(v >> 8);
}

void put_u32(std::vector<std::byte>& b, std::size_t at, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b[at + i] = std::byte((v >> (8 * i)) & 0xFF);
}

}  // namespace

TEST_CASE("ESPK: empty dataset round-trips") {
    Dataset d{700, 100, 20, {}};
    const auto bytes = encode_espk(d);
    CHECK(bytes.size() == kEspkHeaderSize);
    CHECK(decode_espk(bytes) == d);
}

TEST_CASE("ESPK: single event file size and layout") {
    const auto bytes = single_event_file();
    CHECK(bytes.size() == kEspkHeaderSize + 2 + 4 + 6);
    CHECK(std::memcmp(bytes.data(), "ESPK", 4) == 0);
    CHECK(std::to_integer<int>(bytes[4]) == 1);  // version, little-endian
    CHECK(std::to_integer<int>(bytes[5]) == 0);
    CHECK(std::to_integer<int>(bytes[6]) == 4);  // channels
    CHECK(std::to_integer<int>(bytes[10]) == 3); // steps
    CHECK(std::to_integer<int>(bytes[14]) == 1); // n_samples
    CHECK(std::to_integer<int>(bytes[18]) == 2); // n_classes
    CHECK(std::to_integer<int>(bytes[20]) == 1); // label
    CHECK(std::to_integer<int>(bytes[22]) == 1); // n_events
}

TEST_CASE("ESPK: random round-trips are bit-exact") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto d = random_dataset(rng);
        const auto bytes = encode_espk(d);
        const auto back = decode_espk(bytes);
        REQUIRE(back == d);
        REQUIRE(encode_espk(back) == bytes);
    }
}

TEST_CASE("ESPK: save/load through the filesystem") {
    std::mt19937_64 rng(1);
    const auto d = random_dataset(rng);
    const auto path = std::filesystem::temp_directory_path() / "espp_format_test.espk";
    save_espk(d, path);
    CHECK(load_espk(path) == d);
    std::filesystem::remove(path);
    CHECK_THROWS(load_espk(path));
}

TEST_CASE("ESPK: malformed files are rejected with an offset") {
    const auto good = single_event_file();

    SUBCASE("bad magic") {
        auto b = good;
        b[0] = std::byte('X');
        try {
            decode_espk(b);
            FAIL("accepted bad magic");
        } catch (const FormatError& e) {
            CHECK(e.offset() == 0);
            CHECK(std::string(e.what()).find("magic") != std::string::npos);
        }
    }
    SUBCASE("bad version") {
        auto b = good;
        put_u16(b, 4, 7);
        CHECK_THROWS_AS(decode_espk(b), FormatError);
    }
    SUBCASE("every truncation") {
        for (std::size_t n = 0; n < good.size(); ++n) {
            std::vector<std::byte> b(good.begin(), good.begin() + static_cast<std::ptrdiff_t>(n));
            CHECK_THROWS_AS(decode_espk(b), FormatError);
        }
    }
    SUBCASE("trailing bytes") {
        auto b = good;
        b.push_back(std::byte{0});
        CHECK_THROWS_AS(decode_espk(b), FormatError);
    }
    SUBCASE("event out of range") {
        auto b = good;
        put_u32(b, 28, 4);  // ch == channels
        try {
            decode_espk(b);
            FAIL("accepted out-of-range channel");
        } catch (const FormatError& e) {
            CHECK(e.offset() == 26);
        }
        auto c = good;
        put_u16(c, 26, 3);  // t == steps
        CHECK_THROWS_AS(decode_espk(c), FormatError);
    }
    SUBCASE("label out of range") {
        auto b = good;
        put_u16(b, 20, 2);
        CHECK_THROWS_AS(decode_espk(b), FormatError);
    }
    SUBCASE("unsorted and duplicate events") {
        Dataset d{4, 3, 2, {Sample{0, {{0, 1}, {1, 0}}}}};
        auto b = encode_espk(d);
        // Swap the two events: (1,0) then (0,1).
        put_u16(b, 26, 1);
        put_u32(b, 28, 0);
        put_u16(b, 32, 0);
        put_u32(b, 34, 1);
        try {
            decode_espk(b);
            FAIL("accepted unsorted events");
        } catch (const FormatError& e) {
            CHECK(e.offset() == 32);
            CHECK(std::string(e.what()).find("sorted") != std::string::npos);
        }
        put_u16(b, 32, 1);
        put_u32(b, 34, 0);  // duplicate of the first
        CHECK_THROWS_WITH_AS(decode_espk(b), doctest::Contains("duplicate"), FormatError);
    }
    SUBCASE("absurd sample count") {
        auto b = good;
        put_u32(b, 14, 0xFFFFFFFFu);
        CHECK_THROWS_AS(decode_espk(b), FormatError);
    }
}

TEST_CASE("ESPK: encoder refuses invalid datasets") {
    CHECK_THROWS(encode_espk(Dataset{4, 3, 2, {Sample{0, {{1, 0}, {0, 1}}}}}));
    CHECK_THROWS(encode_espk(Dataset{4, 3, 2, {Sample{0, {{0, 4}}}}}));
    CHECK_THROWS(encode_espk(Dataset{4, 3, 2, {Sample{2, {}}}}));
}

TEST_CASE("ESPK checksum is stable and content-sensitive") {
    const auto a = single_event_file();
    auto b = a;
    b.back() = std::byte{1};
    CHECK(espk_checksum(a) == espk_checksum(single_event_file()));
    CHECK(espk_checksum(a) != espk_checksum(b));
}
