#include "annsim/core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace annsim {

namespace {

int hex_value(char ch) {
    if (ch >= '0' && ch <= '9') return ch - '0';
    if (ch >= 'a' && ch <= 'f') return ch - 'a' + 10;
    if (ch >= 'A' && ch <= 'F') return ch - 'A' + 10;
    return -1;
}

}  // namespace

BitVector::BitVector(std::size_t bits) : size_(bits), words_(words_for(bits), 0) {}

BitVector BitVector::from_bits(std::string_view bits) {
    BitVector v(bits.size());
    for (std::size_t pos = 0; pos < bits.size(); ++pos) {
        const char ch = bits[pos];
        if (ch != '0' && ch != '1') throw std::invalid_argument("bit string contains non-binary character");
        v.set(bits.size() - 1 - pos, ch == '1');
    }
    return v;
}

BitVector BitVector::from_hex(std::string_view hex, std::size_t bits) {
    if (hex.size() != (bits + 3) / 4) {
        throw std::invalid_argument("hex string has " + std::to_string(hex.size()) + " digits, expected " +
                                    std::to_string((bits + 3) / 4));
    }
    BitVector v(bits);
    for (std::size_t pos = 0; pos < hex.size(); ++pos) {
        const int nibble = hex_value(hex[pos]);
        if (nibble < 0) throw std::invalid_argument("invalid hex digit");
        const std::size_t base = 4 * (hex.size() - 1 - pos);
        for (int b = 0; b < 4; ++b) {
            if (!((nibble >> b) & 1)) continue;
            if (base + b >= bits) throw std::invalid_argument("hex value sets bits beyond the dimension");
            v.set(base + b, true);
        }
    }
    return v;
}

BitVector BitVector::from_words(std::span<const Word> words, std::size_t bits) {
    if (words.size() != words_for(bits)) throw std::invalid_argument("word count does not match bit width");
    BitVector v(bits);
    std::copy(words.begin(), words.end(), v.words_.begin());
    v.clear_padding();
    return v;
}

void BitVector::set(std::size_t i, bool value) {
    const Word mask = Word{1} << (i % kWordBits);
    if (value) {
        words_[i / kWordBits] |= mask;
    } else {
        words_[i / kWordBits] &= ~mask;
    }
}

std::size_t BitVector::popcount() const {
    std::size_t total = 0;
    for (Word w : words_) total += static_cast<std::size_t>(std::popcount(w));
    return total;
}

bool BitVector::padding_clear() const {
    const std::size_t tail = size_ % kWordBits;
    if (tail == 0 || words_.empty()) return true;
    return (words_.back() >> tail) == 0;
}

void BitVector::clear_padding() {
    const std::size_t tail = size_ % kWordBits;
    if (tail != 0 && !words_.empty()) words_.back() &= (Word{1} << tail) - 1;
}

BitVector& BitVector::operator^=(const BitVector& other) {
    if (other.size_ != size_) throw DimensionMismatch("xor of bit vectors with different widths");
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
    return *this;
}

std::string BitVector::to_hex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    const std::size_t digits = (size_ + 3) / 4;
    std::string out(digits, '0');
    for (std::size_t k = 0; k < digits; ++k) {
        const std::size_t base = 4 * k;
        unsigned nibble = 0;
        for (std::size_t b = 0; b < 4 && base + b < size_; ++b) nibble |= static_cast<unsigned>(get(base + b)) << b;
        out[digits - 1 - k] = kDigits[nibble];
    }
    return out;
}

std::string BitVector::to_bits() const {
    std::string out(size_, '0');
    for (std::size_t i = 0; i < size_; ++i) out[size_ - 1 - i] = get(i) ? '1' : '0';
    return out;
}

std::size_t BitVectorHash::operator()(const BitVector& v) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ v.size();
    for (auto w : v.words()) {
        h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
}

std::size_t hamming_dist(const BitVector& a, const BitVector& b) {
    if (a.size() != b.size()) {
        throw DimensionMismatch("hamming_dist: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()) +
                                " bits");
    }
    const auto wa = a.words();
    const auto wb = b.words();
    std::size_t dist = 0;
    for (std::size_t w = 0; w < wa.size(); ++w) dist += static_cast<std::size_t>(std::popcount(wa[w] ^ wb[w]));
    return dist;
}

Database::Database(std::size_t dim, std::vector<Point> points) : dim_(dim), points_(std::move(points)) {
    if (dim_ == 0) throw std::invalid_argument("database dimension must be positive");
    if (points_.empty()) throw std::invalid_argument("database must contain at least one point");
    std::unordered_set<Point, BitVectorHash> seen;
    seen.reserve(points_.size());
    for (const auto& p : points_) {
        if (p.size() != dim_) throw DimensionMismatch("database point has wrong dimension");
        if (!p.padding_clear()) throw std::invalid_argument("database point has bits set beyond its dimension");
        if (!seen.insert(p).second) throw std::invalid_argument("database points must be distinct");
    }
}

std::size_t Database::index_of(const Point& p) const {
    const auto it = std::find(points_.begin(), points_.end(), p);
    return static_cast<std::size_t>(it - points_.begin());
}

Database read_database(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw std::invalid_argument("database file is empty");
    std::size_t dim = 0;
    std::size_t count = 0;
    {
        std::istringstream hs(header);
        std::string dtok;
        std::string ntok;
        hs >> dtok >> ntok;
        if (dtok.rfind("d=", 0) != 0 || ntok.rfind("n=", 0) != 0) {
            throw std::invalid_argument("database header must read `d=<dim> n=<count>`");
        }
        dim = std::stoull(dtok.substr(2));
        count = std::stoull(ntok.substr(2));
    }
    std::vector<Point> points;
    points.reserve(count);
    std::string line;
    while (points.size() < count && std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        points.push_back(Point::from_hex(line, dim));
    }
    if (points.size() != count) {
        throw std::invalid_argument("database file declares " + std::to_string(count) + " points but holds " +
                                    std::to_string(points.size()));
    }
    return Database(dim, std::move(points));
}

void write_database(std::ostream& out, const Database& db) {
    out << "d=" << db.dim() << " n=" << db.size() << '\n';
    for (const auto& p : db) out << p.to_hex() << '\n';
}

int scale_count(std::size_t d, double alpha) {
    if (d < 2) throw std::invalid_argument("scale_count needs d >= 2");
    if (!(alpha > 1.0)) throw std::invalid_argument("scale_count needs alpha > 1");
    // Smallest I with alpha^I >= d. The relative slack absorbs rounding in
    // alpha = sqrt(gamma) so that exact powers are not pushed up a scale.
    const double target = static_cast<double>(d) * (1.0 - 1e-12);
    int scales = 0;
    double power = 1.0;
    while (power < target) {
        power *= alpha;
        ++scales;
    }
    return scales;
}

bool exceeds_fraction(std::size_t count, std::size_t total, std::size_t n, double s) {
    if (!(s > 0.0)) throw std::invalid_argument("fraction exponent s must be positive");
    if (count == 0) return false;
    if (total == 0) return true;
    const double lhs = std::log(static_cast<double>(count)) + std::log(static_cast<double>(n)) / s;
    const double rhs = std::log(static_cast<double>(total));
    return lhs > rhs + 1e-12;
}

double effective_alpha(double gamma) {
    if (!(gamma > 1.0)) throw std::invalid_argument("approximation ratio gamma must exceed 1");
    return std::sqrt(std::min(gamma, 4.0));
}

std::string_view to_string(ThresholdRule rule) {
    switch (rule) {
        case ThresholdRule::midpoint:
            return "midpoint";
        case ThresholdRule::closed_form:
            return "closed-form";
    }
    return "?";
}

ThresholdRule parse_threshold_rule(std::string_view name) {
    if (name == "midpoint") return ThresholdRule::midpoint;
    if (name == "closed-form") return ThresholdRule::closed_form;
    throw std::invalid_argument("unknown threshold rule: " + std::string(name));
}

Params Params::make(std::size_t n, std::size_t d, double gamma, int k, double c1, double c2, double c,
                    std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("n must be at least 1");
    if (k < 1) throw std::invalid_argument("round budget k must be at least 1");
    if (!(c1 > 0.0) || !(c2 > 0.0)) throw std::invalid_argument("row factors c1, c2 must be positive");
    if (!(c > 2.0)) throw std::invalid_argument("exponent constant c must exceed 2");
    Params p;
    p.n = n;
    p.d = d;
    p.gamma = gamma;
    p.alpha = effective_alpha(gamma);
    p.k = k;
    p.c1 = c1;
    p.c2 = c2;
    p.c = c;
    p.scales = scale_count(d, p.alpha);
    p.seed = seed;
    return p;
}

}  // namespace annsim
