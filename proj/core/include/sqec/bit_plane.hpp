#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace sqec {

// A rows x cols grid of bits with one 64-bit word per row (cols <= 64).
// Bit c of words_[r] is cell (r, c). All bulk operations are word-parallel,
// which is what makes the simulation path vectorised: a single XOR moves a
// whole row of cells at once.
class BitPlane {
public:
    BitPlane() = default;
    BitPlane(int rows, int cols) : rows_(rows), cols_(cols), words_(rows, 0) {
        if (rows < 1 || cols < 1 || cols > 64)
            throw std::invalid_argument("BitPlane: need 1 <= rows and 1 <= cols <= 64");
        col_mask_ = (cols == 64) ? ~0ULL : ((1ULL << cols) - 1);
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    bool get(int r, int c) const { return (words_[r] >> c) & 1ULL; }
    void set(int r, int c, bool v) {
        if (v) words_[r] |= (1ULL << c);
        else   words_[r] &= ~(1ULL << c);
    }
    void toggle(int r, int c) { words_[r] ^= (1ULL << c); }

    void clear() { for (auto& w : words_) w = 0; }

    bool any() const {
        for (auto w : words_) if (w) return true;
        return false;
    }
    int count() const {
        int n = 0;
        for (auto w : words_) n += __builtin_popcountll(w);
        return n;
    }

    BitPlane& operator^=(const BitPlane& o) {
        for (int r = 0; r < rows_; ++r) words_[r] ^= o.words_[r];
        return *this;
    }
    BitPlane& operator&=(const BitPlane& o) {
        for (int r = 0; r < rows_; ++r) words_[r] &= o.words_[r];
        return *this;
    }
    BitPlane& operator|=(const BitPlane& o) {
        for (int r = 0; r < rows_; ++r) words_[r] |= o.words_[r];
        return *this;
    }
    friend BitPlane operator^(BitPlane a, const BitPlane& b) { a ^= b; return a; }
    friend BitPlane operator&(BitPlane a, const BitPlane& b) { a &= b; return a; }
    friend BitPlane operator|(BitPlane a, const BitPlane& b) { a |= b; return a; }
    friend bool operator==(const BitPlane& a, const BitPlane& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.words_ == b.words_;
    }

    // result(r + dr, c + dc) = src(r, c); bits translated outside the grid are dropped.
    static BitPlane translated(const BitPlane& src, int dr, int dc) {
        BitPlane out(src.rows_, src.cols_);
        for (int r = 0; r < src.rows_; ++r) {
            int tr = r + dr;
            if (tr < 0 || tr >= src.rows_) continue;
            std::uint64_t w = src.words_[r];
            w = (dc >= 0) ? (w << dc) : (w >> -dc);
            out.words_[tr] = w & out.col_mask_;
        }
        return out;
    }

    // this(r + dr, c + dc) ^= src(r, c)
    void xor_translated(const BitPlane& src, int dr, int dc) {
        for (int r = 0; r < src.rows_; ++r) {
            int tr = r + dr;
            if (tr < 0 || tr >= rows_) continue;
            std::uint64_t w = src.words_[r];
            w = (dc >= 0) ? (w << dc) : (w >> -dc);
            words_[tr] ^= w & col_mask_;
        }
    }

    void for_each_set(const std::function<void(int, int)>& fn) const {
        for (int r = 0; r < rows_; ++r) {
            std::uint64_t w = words_[r];
            while (w) {
                int c = __builtin_ctzll(w);
                fn(r, c);
                w &= w - 1;
            }
        }
    }

    std::uint64_t word(int r) const { return words_[r]; }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::uint64_t col_mask_ = 0;
    std::vector<std::uint64_t> words_;
};

}  // namespace sqec
