#pragma once
// cantor.hpp - finite words, pull-based bit streams, cylinder unions and their exact measure.

#include <sodium.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iterator>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dyadic.hpp"
#include "error.hpp"

namespace layerwise {

/// Finite binary string; stored as ASCII '0'/'1'.
class Word {
public:
    Word() = default;
    explicit Word(std::string_view bits) : bits_(bits) {
        if (bits_.find_first_not_of("01") != std::string::npos) {
            fail(ErrorCode::ParseError, "word contains a symbol other than 0/1: " + std::string(bits));
        }
    }

    static Word repeat(int bit, std::size_t count) { return Word(std::string(count, bit ? '1' : '0'), Trusted{}); }
    static Word zeros(std::size_t count) { return repeat(0, count); }
    static Word ones(std::size_t count) { return repeat(1, count); }
    /// Big-endian binary digits of value, padded to `width`.
    static Word binary(std::uint64_t value, std::size_t width) {
        std::string s(width, '0');
        for (std::size_t i = 0; i < width; ++i) {
            if ((value >> (width - 1 - i)) & 1U) s[i] = '1';
        }
        return Word(std::move(s), Trusted{});
    }

    [[nodiscard]] std::size_t size() const noexcept { return bits_.size(); }
    [[nodiscard]] bool empty() const noexcept { return bits_.empty(); }
    [[nodiscard]] int operator[](std::size_t i) const { return bits_[i] == '1' ? 1 : 0; }
    [[nodiscard]] const std::string& str() const noexcept { return bits_; }

    void push_back(int bit) { bits_.push_back(bit ? '1' : '0'); }
    Word& operator+=(const Word& o) {
        bits_ += o.bits_;
        return *this;
    }
    friend Word operator+(Word a, const Word& b) { return a += b; }

    [[nodiscard]] Word prefix(std::size_t n) const { return Word(bits_.substr(0, n), Trusted{}); }
    [[nodiscard]] Word substr(std::size_t from, std::size_t count) const {
        return Word(bits_.substr(from, count), Trusted{});
    }
    [[nodiscard]] bool is_prefix_of(const Word& o) const {
        return size() <= o.size() && std::equal(bits_.begin(), bits_.end(), o.bits_.begin());
    }
    [[nodiscard]] std::size_t count_ones() const {
        return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), '1'));
    }
    [[nodiscard]] Word sibling() const {
        std::string s = bits_;
        s.back() = s.back() == '1' ? '0' : '1';
        return Word(std::move(s), Trusted{});
    }

    /// Dyadic value 0.b1 b2 ... bm.
    [[nodiscard]] Dyadic as_fraction() const {
        if (empty()) return {};
        return Dyadic(mpz_class(bits_, 2), static_cast<std::int64_t>(size()));
    }

    friend bool operator==(const Word&, const Word&) = default;
    /// Shortlex order: length first, then lexicographic.
    friend bool operator<(const Word& a, const Word& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a.bits_ < b.bits_;
    }

private:
    struct Trusted {};
    Word(std::string bits, Trusted) : bits_(std::move(bits)) {}

    std::string bits_;
};

/// Packs bits big-endian within each byte, zero-padding the last byte.
inline std::vector<unsigned char> pack_bytes(const Word& w) {
    std::vector<unsigned char> out((w.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i]) out[i / 8] |= static_cast<unsigned char>(0x80U >> (i % 8));
    }
    return out;
}

inline std::string to_hex(const Word& w) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    for (std::size_t i = 0; i < w.size(); i += 4) {
        unsigned v = 0;
        for (std::size_t j = 0; j < 4; ++j) v = (v << 1) | (i + j < w.size() ? static_cast<unsigned>(w[i + j]) : 0U);
        out.push_back(digits[v]);
    }
    return out;
}

inline void ensure_sodium() {
    static const int status = sodium_init();
    if (status < 0) fail(ErrorCode::InvalidArgument, "libsodium initialisation failed");
}

/// Lowercase hex SHA-256 of the byte string (length prefix folded in so bit length matters).
inline std::string sha256_hex(const Word& w) {
    ensure_sodium();
    std::vector<unsigned char> bytes = pack_bytes(w);
    const std::uint64_t n = w.size();
    for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<unsigned char>(n >> (8 * i)));
    std::array<unsigned char, crypto_hash_sha256_BYTES> digest{};
    crypto_hash_sha256(digest.data(), bytes.data(), bytes.size());
    std::string out(2 * digest.size() + 1, '\0');
    sodium_bin2hex(out.data(), out.size(), digest.data(), digest.size());
    out.pop_back();
    return out;
}

enum class Origin { File, Hex, SeededPrng, Transducer, Word, Function };

constexpr std::string_view to_string(Origin o) noexcept {
    switch (o) {
    case Origin::File: return "file";
    case Origin::Hex: return "hex";
    case Origin::SeededPrng: return "seeded-prng";
    case Origin::Transducer: return "transducer";
    case Origin::Word: return "word";
    case Origin::Function: return "function";
    }
    return "unknown";
}

/// Pull-based binary sequence with an append-only cache. Copies share the cache and the
/// source, so a copy is another handle on the same sequence, never an independent reader.
class BitStream {
public:
    /// Yields the next bit, or nullopt when a finite source runs dry.
    using Source = std::function<std::optional<int>()>;

    BitStream(Source source, Origin origin, std::string tag = {})
        : state_(std::make_shared<State>(State{std::move(source), {}, origin, std::move(tag)})) {}

    /// Bit i; pulls from the source as needed. SourceExhausted past the end of a finite source.
    [[nodiscard]] int bit(std::size_t i) const {
        pull_to(i + 1);
        return state_->cache[i];
    }
    [[nodiscard]] Word prefix(std::size_t n) const {
        pull_to(n);
        return state_->cache.prefix(n);
    }
    [[nodiscard]] bool available(std::size_t n) const {
        try {
            pull_to(n);
            return true;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::SourceExhausted) throw;
            return false;
        }
    }
    [[nodiscard]] const Word& cached() const noexcept { return state_->cache; }
    [[nodiscard]] Origin origin() const noexcept { return state_->origin; }
    [[nodiscard]] const std::string& tag() const noexcept { return state_->tag; }

    // ----- factories

    /// The finite word w followed by SourceExhausted.
    static BitStream finite(const Word& w) {
        return BitStream([w, i = std::size_t{0}]() mutable -> std::optional<int> {
            if (i >= w.size()) return std::nullopt;
            return w[i++];
        }, Origin::Word, "finite");
    }
    /// head followed by cycle repeated forever (cycle nonempty).
    static BitStream periodic(const Word& head, const Word& cycle) {
        if (cycle.empty()) fail(ErrorCode::InvalidArgument, "periodic stream needs a nonempty cycle");
        return BitStream([head, cycle, i = std::size_t{0}]() mutable -> std::optional<int> {
            const std::size_t k = i++;
            if (k < head.size()) return head[k];
            return cycle[(k - head.size()) % cycle.size()];
        }, Origin::Word, head.str() + "(" + cycle.str() + ")*");
    }
    /// bit(i) = f(i).
    static BitStream from_function(std::function<int(std::size_t)> f, std::string tag) {
        return BitStream([f = std::move(f), i = std::size_t{0}]() mutable -> std::optional<int> {
            return f(i++) ? 1 : 0;
        }, Origin::Function, std::move(tag));
    }
    /// Hex digits, each expanded big-endian into 4 bits. ParseError on a non-hex symbol.
    static BitStream from_hex(std::string_view hex) {
        Word w;
        for (const char c : hex) {
            int v = 0;
            if (c >= '0' && c <= '9') v = c - '0';
            else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
            else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
            else fail(ErrorCode::ParseError, std::string("not a hex digit: ") + c);
            for (int b = 3; b >= 0; --b) w.push_back((v >> b) & 1);
        }
        BitStream s = finite(w);
        s.state_->origin = Origin::Hex;
        s.state_->tag = std::string(hex);
        return s;
    }
    /// Raw bytes of a file, big-endian bit order within each byte.
    static BitStream from_file(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) fail(ErrorCode::ParseError, "cannot open bit file " + path);
        const std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        Word w;
        for (const char c : bytes) {
            const auto v = static_cast<unsigned char>(c);
            for (int b = 7; b >= 0; --b) w.push_back((v >> b) & 1);
        }
        BitStream s = finite(w);
        s.state_->origin = Origin::File;
        s.state_->tag = path;
        return s;
    }
    /// ChaCha20 keystream: key = seed little-endian zero-padded to 32 bytes, zero nonce,
    /// bits big-endian within each keystream byte.
    static BitStream seeded(std::uint64_t seed) {
        ensure_sodium();
        struct Prng {
            std::array<unsigned char, crypto_stream_chacha20_KEYBYTES> key{};
            std::array<unsigned char, 64> block{};
            std::uint64_t block_index = 0;
            std::size_t bit_in_block = 512;
        };
        auto g = std::make_shared<Prng>();
        for (int i = 0; i < 8; ++i) g->key[static_cast<std::size_t>(i)] = static_cast<unsigned char>(seed >> (8 * i));
        return BitStream([g]() -> std::optional<int> {
            if (g->bit_in_block == 512) {
                static const std::array<unsigned char, 64> zeros{};
                static const std::array<unsigned char, crypto_stream_chacha20_NONCEBYTES> nonce{};
                crypto_stream_chacha20_xor_ic(g->block.data(), zeros.data(), zeros.size(), nonce.data(),
                                              g->block_index++, g->key.data());
                g->bit_in_block = 0;
            }
            const std::size_t i = g->bit_in_block++;
            return (g->block[i / 8] >> (7 - i % 8)) & 1;
        }, Origin::SeededPrng, "seed:" + std::to_string(seed));
    }
    /// w followed by the whole of tail.
    static BitStream concat(const Word& w, const BitStream& tail, Origin origin = Origin::Transducer) {
        return BitStream([w, tail, i = std::size_t{0}]() mutable -> std::optional<int> {
            const std::size_t k = i++;
            if (k < w.size()) return w[k];
            if (!tail.available(k - w.size() + 1)) return std::nullopt;
            return tail.bit(k - w.size());
        }, origin, w.str().size() <= 16 ? w.str() + "+" + tail.tag() : "prefix+" + tail.tag());
    }

private:
    struct State {
        Source source;
        Word cache;
        Origin origin;
        std::string tag;
    };

    void pull_to(std::size_t n) const {
        while (state_->cache.size() < n) {
            const std::optional<int> b = state_->source();
            if (!b) fail(ErrorCode::SourceExhausted, "bit source ended at " + std::to_string(state_->cache.size()));
            state_->cache.push_back(*b);
        }
    }

    std::shared_ptr<State> state_;
};

/// result(i) = p(i + n).
inline BitStream shift(const BitStream& p, std::size_t n) {
    return BitStream([p, i = n]() mutable -> std::optional<int> {
        if (!p.available(i + 1)) return std::nullopt;
        return p.bit(i++);
    }, p.origin(), p.tag() + ">>" + std::to_string(n));
}

/// A union of cylinders, either a finite word list or a deterministic enumeration.
class CylinderUnion {
public:
    /// i-th word of an enumerated union, nullopt past the end.
    using Enumerator = std::function<std::optional<Word>(std::size_t)>;

    CylinderUnion() = default;
    explicit CylinderUnion(std::vector<Word> words, bool normalized = false)
        : words_(std::move(words)), normalized_(normalized) {}
    CylinderUnion(std::initializer_list<std::string_view> words) {
        for (const auto w : words) words_.emplace_back(w);
    }
    static CylinderUnion enumerated(Enumerator e) {
        CylinderUnion u;
        u.enumerate_ = std::move(e);
        return u;
    }

    [[nodiscard]] bool is_finite() const noexcept { return !enumerate_; }
    [[nodiscard]] bool is_normalized() const noexcept { return normalized_; }
    /// The finite word list. InvalidArgument for an enumerated union.
    [[nodiscard]] const std::vector<Word>& words() const& {
        if (enumerate_) fail(ErrorCode::InvalidArgument, "enumerated union has no finite word list");
        return words_;
    }
    [[nodiscard]] std::vector<Word> words() && {
        if (enumerate_) fail(ErrorCode::InvalidArgument, "enumerated union has no finite word list");
        return std::move(words_);
    }
    [[nodiscard]] std::optional<Word> word(std::size_t i) const {
        if (enumerate_) return enumerate_(i);
        if (i < words_.size()) return words_[i];
        return std::nullopt;
    }

private:
    std::vector<Word> words_;
    Enumerator enumerate_;
    bool normalized_ = false;
};

/// Same set, prefix-free, siblings merged exhaustively, shortlex order.
inline CylinderUnion normalize(const CylinderUnion& u) {
    std::set<Word> s(u.words().begin(), u.words().end());
    bool changed = true;
    while (changed) {
        changed = false;
        // drop words with a proper prefix in the set
        for (auto it = s.begin(); it != s.end();) {
            bool covered = false;
            for (std::size_t k = 0; k < it->size() && !covered; ++k) covered = s.count(it->prefix(k)) > 0;
            it = covered ? s.erase(it) : std::next(it);
        }
        // merge w0, w1 into w; longest words first so merges cascade upward in one sweep
        std::vector<Word> order(s.rbegin(), s.rend());
        for (const Word& w : order) {
            if (w.empty() || !s.count(w)) continue;
            const Word sib = w.sibling();
            if (s.count(sib)) {
                s.erase(w);
                s.erase(sib);
                s.insert(w.prefix(w.size() - 1));
                changed = true;
            }
        }
    }
    return CylinderUnion(std::vector<Word>(s.begin(), s.end()), true);
}

/// Exact Lebesgue measure of a finite union.
inline Dyadic measure(const CylinderUnion& u) {
    const CylinderUnion n = u.is_normalized() ? u : normalize(u);
    Dyadic total;
    for (const Word& w : n.words()) total += Dyadic::pow2(-static_cast<std::int64_t>(w.size()));
    return total;
}

inline CylinderUnion unite(const CylinderUnion& a, const CylinderUnion& b) {
    std::vector<Word> w = a.words();
    w.insert(w.end(), b.words().begin(), b.words().end());
    return CylinderUnion(std::move(w));
}

struct Membership {
    std::optional<Word> witness;  // set iff inside
    std::size_t words_examined = 0;
    std::size_t bits_read = 0;

    [[nodiscard]] bool inside() const noexcept { return witness.has_value(); }
};

/// Semidecides p in U. Examines words 0..fuel-1 in enumeration order, skipping any longer
/// than fuel; reads at most fuel bits of p.
inline Membership member(const CylinderUnion& u, const BitStream& p, std::size_t fuel) {
    Membership m;
    for (std::size_t i = 0; i < fuel; ++i) {
        const std::optional<Word> w = u.word(i);
        if (!w) break;
        ++m.words_examined;
        if (w->size() > fuel || !p.available(w->size())) continue;
        m.bits_read = std::max(m.bits_read, w->size());
        if (w->is_prefix_of(p.prefix(w->size()))) {
            m.witness = *w;
            return m;
        }
    }
    return m;
}

/// One word per line, ASCII 0/1; '#' starts a comment; blank lines ignored.
inline CylinderUnion parse_words(std::string_view text) {
    std::vector<Word> out;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        const std::string body = line.substr(first, last - first + 1);
        // the empty word is written as a lone "-"
        out.emplace_back(body == "-" ? std::string_view{} : std::string_view(body));
    }
    return CylinderUnion(std::move(out));
}

inline std::string format_words(const CylinderUnion& u) {
    std::string out;
    for (const Word& w : u.words()) out += (w.empty() ? "-" : w.str()) + "\n";
    return out;
}

}  // namespace layerwise
