#pragma once
// codec.hpp - a small bit-level LZ77 codec, the default compressed-length proxy.
//
// Stream layout: gamma(n + 1) header, then tokens until n bits are produced.
//   literal: 0 b
//   match:   1 gamma(offset) gamma(length - kMinMatch + 1)    (offset >= 1; overlap allowed)
// Overlapping matches make long runs cost O(log run) bits.

#include <concepts>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "cantor.hpp"

namespace layerwise {

/// Anything with lossless encode / decode over words.
template <class C>
concept LosslessCodec = requires(const C& c, const Word& w) {
    { c.encode(w) } -> std::convertible_to<Word>;
    { c.decode(w) } -> std::convertible_to<Word>;
    { c.name() } -> std::convertible_to<std::string>;
};

namespace detail {

inline void put_gamma(Word& out, std::uint64_t v) {  // v >= 1
    int bits = 0;
    while ((v >> bits) > 1) ++bits;
    for (int i = 0; i < bits; ++i) out.push_back(0);
    for (int i = bits; i >= 0; --i) out.push_back(static_cast<int>((v >> i) & 1U));
}

inline std::size_t gamma_size(std::uint64_t v) {
    std::size_t bits = 0;
    while ((v >> bits) > 1) ++bits;
    return 2 * bits + 1;
}

class BitReader {
public:
    explicit BitReader(const Word& w) : w_(w) {}
    int next() {
        if (pos_ >= w_.size()) fail(ErrorCode::CompressorNotLossless, "truncated code stream");
        return w_[pos_++];
    }
    std::uint64_t gamma() {
        int zeros = 0;
        while (next() == 0) {
            if (++zeros > 62) fail(ErrorCode::CompressorNotLossless, "gamma code too long");
        }
        std::uint64_t v = 1;
        for (int i = 0; i < zeros; ++i) v = (v << 1) | static_cast<std::uint64_t>(next());
        return v;
    }
    [[nodiscard]] bool done() const { return pos_ == w_.size(); }

private:
    const Word& w_;
    std::size_t pos_ = 0;
};

}  // namespace detail

class LzCodec {
public:
    static constexpr std::size_t kMinMatch = 2;
    static constexpr std::size_t kWindow = 4096;
    static constexpr std::size_t kKeyBits = 10;     // hash key: the next kKeyBits bits
    static constexpr std::size_t kCandidates = 32;  // most recent positions tried per key

    [[nodiscard]] std::string name() const { return "lz77-bits"; }

    [[nodiscard]] Word encode(const Word& w) const {
        Word out;
        detail::put_gamma(out, w.size() + 1);
        std::unordered_map<std::uint32_t, std::vector<std::size_t>> chains;
        auto key_at = [&](std::size_t i) {
            std::uint32_t k = 0;
            for (std::size_t j = 0; j < kKeyBits; ++j) k = (k << 1) | static_cast<std::uint32_t>(w[i + j]);
            return k;
        };
        auto remember = [&](std::size_t i) {
            if (i + kKeyBits <= w.size()) chains[key_at(i)].push_back(i);
        };
        std::size_t i = 0;
        while (i < w.size()) {
            std::size_t best_len = 0;
            std::size_t best_off = 0;
            // offset 1 catches runs even before the key table is warm
            for (std::size_t off = 1; off <= 2 && off <= i; ++off) {
                std::size_t len = 0;
                while (i + len < w.size() && w[i + len] == w[i + len - off]) ++len;
                if (len > best_len) {
                    best_len = len;
                    best_off = off;
                }
            }
            if (i + kKeyBits <= w.size()) {
                if (auto it = chains.find(key_at(i)); it != chains.end()) {
                    const auto& cands = it->second;
                    std::size_t tried = 0;
                    for (auto c = cands.rbegin(); c != cands.rend() && tried < kCandidates; ++c, ++tried) {
                        if (i - *c > kWindow) break;
                        std::size_t len = 0;
                        while (i + len < w.size() && w[i + len] == w[*c + len]) ++len;
                        if (len > best_len) {
                            best_len = len;
                            best_off = i - *c;
                        }
                    }
                }
            }
            const bool use_match = best_len >= kMinMatch &&
                                   1 + detail::gamma_size(best_off) + detail::gamma_size(best_len - kMinMatch + 1) <
                                       2 * best_len;
            if (use_match) {
                out.push_back(1);
                detail::put_gamma(out, best_off);
                detail::put_gamma(out, best_len - kMinMatch + 1);
                for (std::size_t j = 0; j < best_len; ++j) remember(i + j);
                i += best_len;
            } else {
                out.push_back(0);
                out.push_back(w[i]);
                remember(i);
                ++i;
            }
        }
        return out;
    }

    [[nodiscard]] Word decode(const Word& code) const {
        detail::BitReader in(code);
        const std::uint64_t n = in.gamma() - 1;
        Word out;
        while (out.size() < n) {
            if (in.next() == 0) {
                out.push_back(in.next());
                continue;
            }
            const std::uint64_t off = in.gamma();
            const std::uint64_t len = in.gamma() + kMinMatch - 1;
            if (off > out.size() || out.size() + len > n) fail(ErrorCode::CompressorNotLossless, "bad match token");
            for (std::uint64_t j = 0; j < len; ++j) out.push_back(out[out.size() - off]);
        }
        if (!in.done()) fail(ErrorCode::CompressorNotLossless, "trailing bits after code stream");
        return out;
    }
};

/// Codelength of w, checking decode(encode(w)) == w.
template <LosslessCodec C>
std::size_t checked_clen(const C& codec, const Word& w) {
    const Word code = codec.encode(w);
    if (codec.decode(code) != w) fail(ErrorCode::CompressorNotLossless, codec.name() + " failed round trip");
    return code.size();
}

}  // namespace layerwise
