#include "manifest.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "espp/data/format.hpp"

namespace espp::cli {

std::string format_checksum(std::uint64_t h) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

std::vector<std::byte> read_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + p.string());
    std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::vector<std::byte> out(raw.size());
    std::memcpy(out.data(), raw.data(), raw.size());
    return out;
}

}  // namespace

ManifestCheck check_manifest(const std::filesystem::path& manifest_path) {
    ManifestCheck out;
    nlohmann::json m;
    try {
        std::ifstream in(manifest_path);
        if (!in) throw std::runtime_error("cannot open " + manifest_path.string());
        m = nlohmann::json::parse(in);
    } catch (const std::exception& e) {
        out.errors.push_back(std::string("manifest: ") + e.what());
        return out;
    }
    auto err = [&](const std::string& s) { out.errors.push_back(s); };

    if (m.value("format", "") != "espp-conversion-manifest") err("manifest: format is not 'espp-conversion-manifest'");
    if (m.value("version", 0) != 1) err("manifest: unsupported version");
    if (!m.contains("splits") || !m["splits"].is_object() || m["splits"].empty()) {
        err("manifest: no splits");
        return out;
    }
    const auto dir = manifest_path.parent_path();
    for (const auto& [name, split] : m["splits"].items()) {
        const std::string where = "split '" + name + "': ";
        try {
            const auto bytes = read_bytes(dir / split.at("file").get<std::string>());
            const auto data = decode_espk(bytes);
            if (m.contains("channels") && m["channels"].get<std::uint32_t>() != data.channels)
                err(where + "channels " + std::to_string(data.channels) + " != manifest " + m["channels"].dump());
            if (m.contains("steps") && m["steps"].get<std::uint32_t>() != data.steps)
                err(where + "steps " + std::to_string(data.steps) + " != manifest " + m["steps"].dump());
            if (m.contains("n_classes") && m["n_classes"].get<std::uint16_t>() != data.n_classes)
                err(where + "classes " + std::to_string(data.n_classes) + " != manifest " + m["n_classes"].dump());
            const auto n = split.at("n_samples").get<std::size_t>();
            if (n != data.size())
                err(where + "file has " + std::to_string(data.size()) + " samples, manifest says " + std::to_string(n));
            if (split.contains("event_counts")) {
                const auto counts = split["event_counts"].get<std::vector<std::size_t>>();
                if (counts.size() != data.size()) {
                    err(where + "event_counts has " + std::to_string(counts.size()) + " entries");
                } else {
                    std::size_t bad = 0;
                    for (std::size_t i = 0; i < counts.size(); ++i)
                        if (counts[i] != data.samples[i].events.size()) {
                            if (bad == 0)
                                err(where + "sample " + std::to_string(i) + " has " +
                                    std::to_string(data.samples[i].events.size()) + " events, manifest says " +
                                    std::to_string(counts[i]));
                            ++bad;
                        }
                    if (bad > 1) err(where + std::to_string(bad) + " samples with mismatched event counts in total");
                }
            }
            const auto sum = format_checksum(espk_checksum(bytes));
            if (split.contains("checksum") && split["checksum"].get<std::string>() != sum)
                err(where + "checksum " + sum + " != manifest " + split["checksum"].get<std::string>());
            out.notes.push_back(where + std::to_string(data.size()) + " samples, " + std::to_string(data.channels) +
                                " channels, " + std::to_string(data.steps) + " steps, " + sum);
        } catch (const FormatError& e) {
            err(where + "byte " + std::to_string(e.offset()) + ": " + e.what());
        } catch (const std::exception& e) {
            err(where + e.what());
        }
    }
    return out;
}

}  // namespace espp::cli
