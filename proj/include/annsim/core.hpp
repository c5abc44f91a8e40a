#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace annsim {

/// Thrown when two bit vectors of different widths meet in one operation.
class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Fixed-width packed bit vector. Bit i lives in word i/64 at position i%64;
/// bits at positions >= size() are always zero.
class BitVector {
public:
    using Word = std::uint64_t;
    static constexpr std::size_t kWordBits = 64;

    BitVector() = default;
    explicit BitVector(std::size_t bits);

    static std::size_t words_for(std::size_t bits) { return (bits + kWordBits - 1) / kWordBits; }

    /// Bit string, leftmost character is the highest index (same order as hex).
    static BitVector from_bits(std::string_view bits);
    /// Lowercase or uppercase hex, most-significant nibble first. Must not set
    /// bits beyond `bits`.
    static BitVector from_hex(std::string_view hex, std::size_t bits);
    static BitVector from_words(std::span<const Word> words, std::size_t bits);

    std::size_t size() const { return size_; }
    std::span<const Word> words() const { return words_; }
    std::span<Word> mutable_words() { return words_; }

    bool get(std::size_t i) const { return (words_[i / kWordBits] >> (i % kWordBits)) & 1u; }
    void set(std::size_t i, bool value);
    void flip(std::size_t i) { words_[i / kWordBits] ^= Word{1} << (i % kWordBits); }

    std::size_t popcount() const;
    /// True when every bit past size() is zero.
    bool padding_clear() const;
    void clear_padding();

    BitVector& operator^=(const BitVector& other);

    std::string to_hex() const;
    std::string to_bits() const;

    friend bool operator==(const BitVector&, const BitVector&) = default;
    friend auto operator<=>(const BitVector&, const BitVector&) = default;

private:
    std::size_t size_ = 0;
    std::vector<Word> words_;
};

struct BitVectorHash {
    std::size_t operator()(const BitVector& v) const noexcept;
};

/// Number of positions where a and b differ.
std::size_t hamming_dist(const BitVector& a, const BitVector& b);

/// Query and database points: d-bit vectors.
using Point = BitVector;

/// Ordered collection of distinct points of one dimension.
class Database {
public:
    Database(std::size_t dim, std::vector<Point> points);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return points_.size(); }
    const Point& operator[](std::size_t i) const { return points_[i]; }
    std::span<const Point> points() const { return points_; }
    auto begin() const { return points_.begin(); }
    auto end() const { return points_.end(); }

    /// Index of p in the database, or size() when absent.
    std::size_t index_of(const Point& p) const;

private:
    std::size_t dim_;
    std::vector<Point> points_;
};

/// Reads the text database format: a `d=<dim> n=<count>` header line, then
/// one point per line as ceil(d/4) hex digits, most-significant nibble first.
Database read_database(std::istream& in);
void write_database(std::ostream& out, const Database& db);

/// Largest scale index ceil(log_alpha d).
int scale_count(std::size_t d, double alpha);

/// count > n^(-1/s) * total, decided in the log domain. Values within a
/// relative 1e-12 of equality count as not exceeding.
bool exceeds_fraction(std::size_t count, std::size_t total, std::size_t n, double s);

/// sqrt(min(gamma, 4)); gamma must exceed 1.
double effective_alpha(double gamma);

enum class ThresholdRule {
    /// Midpoint between the near and far separation rates.
    midpoint,
    /// The closed form of `delta_threshold`, used verbatim.
    closed_form,
};

std::string_view to_string(ThresholdRule rule);
ThresholdRule parse_threshold_rule(std::string_view name);

/// Instance-wide parameters shared by the table side and the query side.
struct Params {
    std::size_t n = 0;
    std::size_t d = 0;
    double gamma = 4.0;
    double alpha = 2.0;
    int k = 1;
    double c1 = 8.0;
    double c2 = 8.0;
    double c = 4.0;
    int scales = 0;  ///< I = ceil(log_alpha d)
    std::uint64_t seed = 0;
    ThresholdRule threshold = ThresholdRule::midpoint;

    /// Fills alpha and scales from gamma and d and validates the rest.
    static Params make(std::size_t n, std::size_t d, double gamma, int k, double c1 = 8.0,
                       double c2 = 8.0, double c = 4.0, std::uint64_t seed = 0);
};

}  // namespace annsim
