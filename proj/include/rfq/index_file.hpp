#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "range_index.hpp"
#include "serialize.hpp"

namespace rfq {

enum class InputFormat : std::uint8_t { bytes = 0, u32le = 1, tokens = 2 };

inline InputFormat parse_format(std::string_view name) {
    if (name == "bytes") return InputFormat::bytes;
    if (name == "u32le") return InputFormat::u32le;
    if (name == "tokens") return InputFormat::tokens;
    throw ConfigError("unknown input format '" + std::string(name) + "' (bytes, u32le, tokens)");
}

inline const char* format_name(InputFormat f) {
    switch (f) {
        case InputFormat::bytes: return "bytes";
        case InputFormat::u32le: return "u32le";
        case InputFormat::tokens: return "tokens";
    }
    return "?";
}

// Bijection between the input's own symbols and the dense alphabet [1..sigma]. Dense ids
// follow the natural order of the originals: byte value, integer value, or token text.
class SymbolRemap {
   public:
    SymbolRemap() = default;

    // returns the remap and the dense sequence
    static std::pair<SymbolRemap, std::vector<std::uint32_t>> encode(std::string_view data, InputFormat format) {
        SymbolRemap m;
        m.format_ = format;
        std::vector<std::uint32_t> s;
        if (format == InputFormat::tokens) {
            std::vector<std::string_view> tokens;
            for (std::size_t k = 0; k < data.size();) {
                while (k < data.size() && is_space(data[k])) ++k;
                std::size_t start = k;
                while (k < data.size() && !is_space(data[k])) ++k;
                if (k > start) tokens.push_back(data.substr(start, k - start));
            }
            std::vector<std::string_view> sorted(tokens);
            std::sort(sorted.begin(), sorted.end());
            sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
            m.labels_.assign(sorted.begin(), sorted.end());
            s.reserve(tokens.size());
            for (auto t : tokens) s.push_back(dense(sorted, t));
            return {std::move(m), std::move(s)};
        }
        std::vector<std::uint32_t> raw;
        if (format == InputFormat::bytes) {
            for (char c : data) raw.push_back(static_cast<unsigned char>(c));
        } else {
            if (data.size() % 4) throw FormatError("u32le input length " + std::to_string(data.size()) + " is not a multiple of 4");
            Reader r(data);
            while (!r.done()) raw.push_back(r.get<std::uint32_t>());
        }
        std::vector<std::uint32_t> sorted(raw);
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        for (auto v : sorted) m.labels_.push_back(format == InputFormat::bytes ? std::string(1, static_cast<char>(v)) : std::to_string(v));
        s.reserve(raw.size());
        for (auto v : raw) s.push_back(dense(sorted, v));
        return {std::move(m), std::move(s)};
    }

    InputFormat format() const { return format_; }
    std::uint32_t sigma() const { return static_cast<std::uint32_t>(labels_.size()); }

    const std::string& label(std::uint32_t a) const {
        if (a == 0 || a > labels_.size()) throw NotFoundError("symbol " + std::to_string(a) + " not in the alphabet");
        return labels_[a - 1];
    }

    // printable form: bytes outside the graphic ASCII range become \xHH
    std::string display(std::uint32_t a) const {
        const std::string& l = label(a);
        if (format_ != InputFormat::bytes) return l;
        unsigned char c = static_cast<unsigned char>(l[0]);
        if (c > 0x20 && c < 0x7f && c != '\\') return l;
        char buf[5];
        std::snprintf(buf, sizeof buf, "\\x%02x", c);
        return buf;
    }

    void save(Writer& w) const {
        w.put<std::uint8_t>(static_cast<std::uint8_t>(format_));
        w.put<std::uint64_t>(labels_.size());
        for (auto& l : labels_) {
            w.put<std::uint32_t>(static_cast<std::uint32_t>(l.size()));
            w.put_bytes(l);
        }
    }

    static SymbolRemap load(Reader& r) {
        SymbolRemap m;
        auto f = r.get<std::uint8_t>();
        if (f > 2) throw FormatError("input format tag");
        m.format_ = static_cast<InputFormat>(f);
        auto count = r.get<std::uint64_t>();
        if (count > r.remaining() / 4) throw FormatError("remap table length exceeds payload");
        for (std::uint64_t k = 0; k < count; ++k) {
            auto len = r.get<std::uint32_t>();
            m.labels_.emplace_back(r.get_bytes(len));
        }
        return m;
    }

    bool operator==(const SymbolRemap&) const = default;

   private:
    static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

    template <class T>
    static std::uint32_t dense(const std::vector<T>& sorted, const T& v) {
        return static_cast<std::uint32_t>(std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin()) + 1;
    }

    InputFormat format_ = InputFormat::bytes;
    std::vector<std::string> labels_;
};

// On-disk index: magic and header, the index sections, then the remap table.
struct IndexFile {
    static constexpr std::string_view magic = "RFQI";
    static constexpr std::uint16_t version = 1;

    SymbolRemap remap;
    RangeIndex index;

    static IndexFile build(std::string_view data, InputFormat format, const IndexConfig& cfg) {
        auto [remap, s] = SymbolRemap::encode(data, format);
        if (s.empty()) throw FormatError("empty input: no symbols to index");
        IndexFile f;
        f.index = RangeIndex(s, std::max<std::uint32_t>(remap.sigma(), 1), cfg);
        f.remap = std::move(remap);
        return f;
    }

    std::string serialize() const {
        Writer w, rm;
        w.put_magic(magic, version);
        w.put<std::uint64_t>(index.size());
        w.put<std::uint32_t>(index.sigma());
        w.put<std::uint8_t>(static_cast<std::uint8_t>(remap.format()));
        index.save(w);
        remap.save(rm);
        w.put_section(section_tag("REMP"), rm);
        return w.bytes();
    }

    static IndexFile parse(std::string_view data) {
        Reader r(data);
        r.expect_magic(magic, version);
        auto n = r.get<std::uint64_t>();
        auto sigma = r.get<std::uint32_t>();
        auto format = r.get<std::uint8_t>();
        IndexFile f;
        f.index = RangeIndex::load(r);
        auto rm = r.section(section_tag("REMP"));
        f.remap = SymbolRemap::load(rm);
        if (!r.done()) throw FormatError("trailing bytes after the index");
        if (f.index.size() != n || f.index.sigma() != sigma) throw FormatError("header disagrees with the index");
        if (static_cast<std::uint8_t>(f.remap.format()) != format) throw FormatError("header disagrees with the remap table");
        if (f.remap.sigma() != sigma && !(n == 0 && f.remap.sigma() == 0)) throw FormatError("remap table size differs from the alphabet");
        return f;
    }

    void save(const std::string& path) const { write_file(path, serialize()); }
    static IndexFile load(const std::string& path) { return parse(read_file(path)); }
};

}  // namespace rfq
