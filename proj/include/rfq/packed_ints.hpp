#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "common.hpp"
#include "serialize.hpp"

namespace rfq {

// Fixed-width unsigned integers packed back to back; a value may straddle two words.
class PackedInts {
   public:
    PackedInts() = default;
    PackedInts(std::uint64_t size, unsigned width)
        : size_(size), width_(width == 0 ? 1 : width), words_(bits::ceil_div(size_ * width_, 64) + 1, 0) {
        if (width_ > 64) throw ConfigError("packed width above 64");
    }

    template <class Vec>
    static PackedInts from(const Vec& values) {
        std::uint64_t mx = 0;
        for (auto v : values) mx = std::max<std::uint64_t>(mx, static_cast<std::uint64_t>(v));
        PackedInts p(values.size(), bits::width_for(mx));
        for (std::uint64_t i = 0; i < values.size(); ++i) p.set(i, static_cast<std::uint64_t>(values[i]));
        return p;
    }

    std::uint64_t get(std::uint64_t i) const {
        std::uint64_t bit = i * width_;
        std::uint64_t w = bit >> 6;
        unsigned off = bit & 63;
        std::uint64_t v = words_[w] >> off;
        if (off + width_ > 64) v |= words_[w + 1] << (64 - off);
        return v & bits::low_mask(width_);
    }

    void set(std::uint64_t i, std::uint64_t v) {
        const std::uint64_t mask = bits::low_mask(width_);
        v &= mask;
        std::uint64_t bit = i * width_;
        std::uint64_t w = bit >> 6;
        unsigned off = bit & 63;
        words_[w] = (words_[w] & ~(mask << off)) | (v << off);
        if (off + width_ > 64) {
            unsigned spill = 64 - off;
            words_[w + 1] = (words_[w + 1] & ~(mask >> spill)) | (v >> spill);
        }
    }

    std::uint64_t operator[](std::uint64_t i) const { return get(i); }
    std::uint64_t size() const { return size_; }
    unsigned width() const { return width_; }
    bool empty() const { return size_ == 0; }

    std::uint64_t size_in_bits() const { return 64 * words_.size() + 128; }

    void save(Writer& w) const {
        w.put(size_);
        w.put<std::uint8_t>(static_cast<std::uint8_t>(width_));
        w.put_vector(words_);
    }

    static PackedInts load(Reader& r) {
        PackedInts p;
        p.size_ = r.get<std::uint64_t>();
        p.width_ = r.get<std::uint8_t>();
        p.words_ = r.get_vector<std::uint64_t>();
        if (p.width_ == 0 || p.width_ > 64 || p.words_.size() != bits::ceil_div(p.size_ * p.width_, 64) + 1)
            throw FormatError("packed array shape mismatch");
        return p;
    }

    bool operator==(const PackedInts&) const = default;

   private:
    std::uint64_t size_ = 0;
    unsigned width_ = 1;
    std::vector<std::uint64_t> words_ = std::vector<std::uint64_t>(1, 0);
};

}  // namespace rfq
