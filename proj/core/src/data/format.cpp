#include "espp/data/format.hpp"

#include <cstring>
#include <fstream>
#include <iterator>

namespace espp {

FormatError::FormatError(std::size_t offset, const std::string& what)
    : std::runtime_error("ESPK byte " + std::to_string(offset) + ": " + what), offset_(offset) {}

namespace {

class Writer {
public:
    explicit Writer(std::vector<std::byte>& out) : out_(out) {}

    template <typename T>
    void put(T value) {
        for (std::size_t i = 0; i < sizeof(T); ++i)
            out_.push_back(static_cast<std::byte>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF));
    }
    void put_bytes(const char* s, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) out_.push_back(static_cast<std::byte>(s[i]));
    }

private:
    std::vector<std::byte>& out_;
};

class Reader {
public:
    explicit Reader(std::span<const std::byte> in) : in_(in) {}

    template <typename T>
    T get(const char* field) {
        if (in_.size() - pos_ < sizeof(T)) throw FormatError(pos_, std::string("truncated while reading ") + field);
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i)
            v |= static_cast<std::uint64_t>(std::to_integer<std::uint8_t>(in_[pos_ + i])) << (8 * i);
        pos_ += sizeof(T);
        return static_cast<T>(v);
    }
    std::size_t pos() const noexcept { return pos_; }
    std::size_t remaining() const noexcept { return in_.size() - pos_; }
    std::span<const std::byte> peek(std::size_t n) const { return in_.subspan(pos_, n); }
    void skip(std::size_t n) { pos_ += n; }

private:
    std::span<const std::byte> in_;
    std::size_t pos_ = 0;
};

void check_sample(const Sample& s, const Dataset& d, std::size_t index) {
    const auto where = "sample " + std::to_string(index) + ": ";
    if (s.label >= d.n_classes) throw std::invalid_argument(where + "label >= n_classes");
    for (std::size_t k = 0; k < s.events.size(); ++k) {
        const auto& e = s.events[k];
        if (e.t >= d.steps || e.ch >= d.channels) throw std::invalid_argument(where + "event out of range");
        if (k > 0 && !(s.events[k - 1] < e)) throw std::invalid_argument(where + "events not strictly sorted");
    }
}

}  // namespace

std::vector<std::byte> encode_espk(const Dataset& d) {
    if (d.samples.size() > UINT32_MAX) throw std::invalid_argument("too many samples for ESPK");
    std::size_t total = kEspkHeaderSize;
    for (std::size_t i = 0; i < d.samples.size(); ++i) {
        check_sample(d.samples[i], d, i);
        total += kEspkSampleHeaderSize + kEspkEventSize * d.samples[i].events.size();
    }

    std::vector<std::byte> out;
    out.reserve(total);
    Writer w(out);
    w.put_bytes("ESPK", 4);
    w.put<std::uint16_t>(kEspkVersion);
    w.put<std::uint32_t>(d.channels);
    w.put<std::uint32_t>(d.steps);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(d.samples.size()));
    w.put<std::uint16_t>(d.n_classes);
    for (const auto& s : d.samples) {
        w.put<std::uint16_t>(s.label);
        w.put<std::uint32_t>(static_cast<std::uint32_t>(s.events.size()));
        for (const auto& e : s.events) {
            w.put<std::uint16_t>(e.t);
            w.put<std::uint32_t>(e.ch);
        }
    }
    return out;
}

Dataset decode_espk(std::span<const std::byte> bytes) {
    Reader r(bytes);
    if (bytes.size() < 4) throw FormatError(0, "truncated magic");
    if (std::memcmp(bytes.data(), "ESPK", 4) != 0) throw FormatError(0, "bad magic (expected \"ESPK\")");
    r.skip(4);
    const auto version_at = r.pos();
    const auto version = r.get<std::uint16_t>("version");
    if (version != kEspkVersion)
        throw FormatError(version_at, "unsupported version " + std::to_string(version));

    Dataset d;
    d.channels = r.get<std::uint32_t>("channels");
    d.steps = r.get<std::uint32_t>("steps");
    const auto n_samples = r.get<std::uint32_t>("n_samples");
    d.n_classes = r.get<std::uint16_t>("n_classes");
    if (d.steps > 65536u) throw FormatError(10, "steps exceeds u16 timestamp range");

    // Each sample needs at least its 6-byte header; reject impossible counts before allocating.
    if (static_cast<std::uint64_t>(n_samples) * kEspkSampleHeaderSize > r.remaining())
        throw FormatError(r.pos(), "n_samples inconsistent with payload size");
    d.samples.reserve(n_samples);

    for (std::uint32_t i = 0; i < n_samples; ++i) {
        Sample s;
        const auto label_at = r.pos();
        s.label = r.get<std::uint16_t>("label");
        if (s.label >= d.n_classes)
            throw FormatError(label_at, "sample " + std::to_string(i) + " label " + std::to_string(s.label) +
                                            " >= n_classes");
        const auto n_events = r.get<std::uint32_t>("n_events");
        if (static_cast<std::uint64_t>(n_events) * kEspkEventSize > r.remaining())
            throw FormatError(r.pos(), "sample " + std::to_string(i) + " truncated event payload");
        s.events.reserve(n_events);
        for (std::uint32_t k = 0; k < n_events; ++k) {
            const auto at = r.pos();
            Event e;
            e.t = r.get<std::uint16_t>("event t");
            e.ch = r.get<std::uint32_t>("event ch");
            if (e.t >= d.steps) throw FormatError(at, "event t " + std::to_string(e.t) + " >= steps");
            if (e.ch >= d.channels) throw FormatError(at, "event ch " + std::to_string(e.ch) + " >= channels");
            if (!s.events.empty() && !(s.events.back() < e))
                throw FormatError(at, s.events.back() == e ? "duplicate event" : "events not sorted by (t, ch)");
            s.events.push_back(e);
        }
        d.samples.push_back(std::move(s));
    }
    if (r.remaining() != 0) throw FormatError(r.pos(), "trailing bytes after last sample");
    return d;
}

void save_espk(const Dataset& data, const std::filesystem::path& path) {
    const auto bytes = encode_espk(data);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

Dataset load_espk(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_espk(std::as_bytes(std::span(raw)));
}

std::uint64_t espk_checksum(std::span<const std::byte> bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (auto b : bytes) {
        h ^= std::to_integer<std::uint8_t>(b);
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace espp
