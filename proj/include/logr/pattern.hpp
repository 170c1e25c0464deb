#pragma once

#include <bit>
#include <cstdint>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <vector>

#include "logr/errors.hpp"

namespace logr {

// Fixed-width binary feature vector. A pattern is any feature subset; a
// query is a pattern that denotes a logged statement.
class Pattern {
public:
    Pattern() = default;
    explicit Pattern(std::size_t width)
        : width_(width), words_((width + 63) / 64, 0) {}

    Pattern(std::size_t width, std::initializer_list<std::size_t> set_ids)
        : Pattern(width) {
        for (std::size_t id : set_ids) set(id);
    }

    std::size_t width() const { return width_; }

    bool test(std::size_t i) const {
        return (words_[i / 64] >> (i % 64)) & 1u;
    }
    void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
    void reset(std::size_t i) {
        words_[i / 64] &= ~(std::uint64_t{1} << (i % 64));
    }

    std::size_t count() const {
        std::size_t c = 0;
        for (auto w : words_) c += std::popcount(w);
        return c;
    }
    bool none() const {
        for (auto w : words_)
            if (w) return false;
        return true;
    }

    // true iff every set bit of this is set in q.
    bool contained_in(const Pattern& q) const {
        check_width(q);
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & ~q.words_[i]) return false;
        return true;
    }

    std::size_t hamming(const Pattern& other) const {
        check_width(other);
        std::size_t c = 0;
        for (std::size_t i = 0; i < words_.size(); ++i)
            c += std::popcount(words_[i] ^ other.words_[i]);
        return c;
    }

    Pattern operator|(const Pattern& other) const {
        check_width(other);
        Pattern r = *this;
        for (std::size_t i = 0; i < words_.size(); ++i)
            r.words_[i] |= other.words_[i];
        return r;
    }

    bool operator==(const Pattern& other) const {
        return width_ == other.width_ && words_ == other.words_;
    }
    bool operator!=(const Pattern& other) const { return !(*this == other); }

    // Total order: width first, then numeric on the feature mask, so
    // patterns enumerate as 0b00, 0b01, 0b10, ... ("bits ascending").
    bool operator<(const Pattern& other) const {
        if (width_ != other.width_) return width_ < other.width_;
        for (std::size_t i = words_.size(); i-- > 0;)
            if (words_[i] != other.words_[i])
                return words_[i] < other.words_[i];
        return false;
    }

    std::vector<std::size_t> set_ids() const {
        std::vector<std::size_t> ids;
        ids.reserve(count());
        for (std::size_t i = 0; i < width_; ++i)
            if (test(i)) ids.push_back(i);
        return ids;
    }

    // Low word as mask; valid only when width <= 64.
    std::uint64_t as_mask() const {
        if (width_ > 64) throw TooManyFeatures(width_, 64);
        return words_.empty() ? 0 : words_[0];
    }

    static Pattern from_mask(std::size_t width, std::uint64_t mask) {
        Pattern p(width);
        if (!p.words_.empty()) p.words_[0] = mask;
        return p;
    }

    static Pattern unit(std::size_t width, std::size_t id) {
        Pattern p(width);
        p.set(id);
        return p;
    }

    std::size_t hash() const {
        std::size_t h = std::hash<std::size_t>{}(width_);
        for (auto w : words_) h ^= std::hash<std::uint64_t>{}(w) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        return h;
    }

private:
    void check_width(const Pattern& other) const {
        if (width_ != other.width_) throw WidthMismatch(other.width_, width_);
    }

    std::size_t width_ = 0;
    std::vector<std::uint64_t> words_;
};

// Free-function form of the containment test: every set bit of b is set in q.
inline bool contains(const Pattern& q, const Pattern& b) {
    return b.contained_in(q);
}

struct PatternHash {
    std::size_t operator()(const Pattern& p) const { return p.hash(); }
};

}  // namespace logr
