#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "common.hpp"

namespace rfq {

// Little-endian byte sink. Sections are tagged and length-prefixed so a reader
// can validate or skip them.
class Writer {
   public:
    template <class T>
        requires std::is_integral_v<T> || std::is_floating_point_v<T>
    void put(T v) {
        char raw[sizeof(T)];
        std::memcpy(raw, &v, sizeof(T));
        buf_.append(raw, sizeof(T));
    }

    void put_bytes(std::string_view bytes) { buf_.append(bytes); }

    void put_magic(std::string_view magic, std::uint16_t version) {
        put_bytes(magic);
        put(version);
    }

    template <class T>
        requires std::is_integral_v<T>
    void put_vector(const std::vector<T>& v) {
        put<std::uint64_t>(v.size());
        if (!v.empty()) buf_.append(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(T));
    }

    void put_section(std::uint32_t tag, const Writer& body) {
        put(tag);
        put<std::uint64_t>(body.buf_.size());
        buf_.append(body.buf_);
    }

    const std::string& bytes() const { return buf_; }

   private:
    std::string buf_;
};

class Reader {
   public:
    Reader() = default;
    explicit Reader(std::string_view data) : data_(data) {}

    template <class T>
        requires std::is_integral_v<T> || std::is_floating_point_v<T>
    T get() {
        need(sizeof(T));
        T v;
        std::memcpy(&v, data_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }

    std::string_view get_bytes(std::size_t len) {
        need(len);
        auto out = data_.substr(pos_, len);
        pos_ += len;
        return out;
    }

    std::uint16_t expect_magic(std::string_view magic, std::uint16_t max_version) {
        if (get_bytes(magic.size()) != magic) throw FormatError("bad magic, expected " + std::string(magic));
        auto version = get<std::uint16_t>();
        if (version == 0 || version > max_version)
            throw FormatError("unsupported " + std::string(magic) + " version " + std::to_string(version));
        return version;
    }

    template <class T>
        requires std::is_integral_v<T>
    std::vector<T> get_vector() {
        auto count = get<std::uint64_t>();
        if (count > remaining() / sizeof(T)) throw FormatError("vector length exceeds payload");
        std::vector<T> v(count);
        if (count) std::memcpy(v.data(), data_.data() + pos_, count * sizeof(T));
        pos_ += count * sizeof(T);
        return v;
    }

    Reader section(std::uint32_t tag) {
        auto got = get<std::uint32_t>();
        if (got != tag) throw FormatError("unexpected section tag " + std::to_string(got));
        auto len = get<std::uint64_t>();
        if (len > remaining()) throw FormatError("section length exceeds payload");
        return Reader(get_bytes(len));
    }

    std::size_t remaining() const { return data_.size() - pos_; }
    bool done() const { return pos_ == data_.size(); }

   private:
    void need(std::size_t len) const {
        if (len > remaining()) throw FormatError("truncated input");
    }

    std::string_view data_;
    std::size_t pos_ = 0;
};

constexpr std::uint32_t section_tag(const char (&s)[5]) {
    return static_cast<std::uint32_t>(static_cast<unsigned char>(s[0])) |
           static_cast<std::uint32_t>(static_cast<unsigned char>(s[1])) << 8 |
           static_cast<std::uint32_t>(static_cast<unsigned char>(s[2])) << 16 |
           static_cast<std::uint32_t>(static_cast<unsigned char>(s[3])) << 24;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open " + path);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw std::ios_base::failure("cannot read " + path);
    return data;
}

inline void write_file(const std::string& path, std::string_view data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::ios_base::failure("cannot create " + path);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw std::ios_base::failure("cannot write " + path);
}

}  // namespace rfq
