#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string_view>
#include <vector>

#include "annsim/core.hpp"
#include "annsim/randomness.hpp"

namespace annsim {

enum class SketchRole { main, aux };

std::string_view to_string(SketchRole role);

/// GF(2) product of a sketch matrix with a point.
using SketchVector = BitVector;

/// rows x dim Boolean matrix with i.i.d. Bernoulli(1/(4 alpha^scale)) entries.
/// Stored column-major so that M*p is the XOR of the columns selected by p.
class SketchMatrix {
public:
    SketchMatrix(std::size_t rows, std::size_t dim, int scale, SketchRole role);

    std::size_t rows() const { return rows_; }
    std::size_t dim() const { return dim_; }
    int scale() const { return scale_; }
    SketchRole role() const { return role_; }

    bool get(std::size_t row, std::size_t col) const {
        return (columns_[col * col_words_ + row / 64] >> (row % 64)) & 1u;
    }
    void set(std::size_t row, std::size_t col, bool value);
    void set_column_word(std::size_t col, std::size_t word, std::uint64_t bits) {
        columns_[col * col_words_ + word] = bits;
    }

    /// Fraction of one entries.
    double density() const;

    /// Row r of the matrix as a dim-bit vector.
    BitVector row(std::size_t r) const;

    SketchVector apply(const Point& p) const;

    friend bool operator==(const SketchMatrix&, const SketchMatrix&) = default;

private:
    std::size_t rows_;
    std::size_t dim_;
    int scale_;
    SketchRole role_;
    std::size_t col_words_;
    std::vector<std::uint64_t> columns_;
};

/// The closed form 1/2 (1 - 1/(2b))^b [1 - (1 - 1/(2b))^((a-1) b)].
double delta_threshold(double beta, double alpha);

/// Probability that one Bernoulli(1/(4 lambda)) row separates two points at
/// Hamming distance h. Real h is accepted for threshold arithmetic.
double row_collision_prob(double lambda, double h);

/// Midpoint of row_collision_prob(beta, beta) and row_collision_prob(beta, alpha*beta):
/// the per-row threshold that splits "distance <= beta" from "distance > alpha*beta".
double separation_threshold(double beta, double alpha);

/// Per-row threshold for the sketches at scale i under the selected rule.
double scale_threshold(ThresholdRule rule, int scale, double alpha);

/// Largest sketch distance accepted at scale i: floor(threshold * rows).
std::size_t sketch_radius(ThresholdRule rule, int scale, double alpha, std::size_t rows);

/// ceil(c1 * log2 n), at least 1.
std::size_t main_rows(double c1, std::size_t n);
/// ceil((c2 / s) * log2 n), at least 1.
std::size_t aux_rows(double c2, double s, std::size_t n);

/// Matrix of one role and scale drawn from the public coin. Entry (r, c) is 1
/// iff the 53-bit prefix of word c of the (role, scale, r) stream falls below
/// p * 2^53, p = 1/(4 alpha^scale).
SketchMatrix derive_matrix(const PublicCoin& coin, SketchRole role, int scale, std::size_t rows,
                           std::size_t dim, double alpha);

SketchVector sketch_apply(const SketchMatrix& m, const Point& p);

/// Lazily materialized matrices for every scale of one role. Thread-safe: each
/// scale is derived at most once.
class SketchBank {
public:
    SketchBank(PublicCoin coin, SketchRole role, std::size_t rows, std::size_t dim, double alpha, int max_scale);

    const SketchMatrix& matrix(int scale) const;
    SketchVector apply(int scale, const Point& p) const { return matrix(scale).apply(p); }

    const PublicCoin& coin() const { return coin_; }
    SketchRole role() const { return role_; }
    std::size_t rows() const { return rows_; }
    std::size_t dim() const { return dim_; }
    double alpha() const { return alpha_; }
    int max_scale() const { return max_scale_; }

private:
    PublicCoin coin_;
    SketchRole role_;
    std::size_t rows_;
    std::size_t dim_;
    double alpha_;
    int max_scale_;
    mutable std::unique_ptr<std::once_flag[]> once_;
    mutable std::vector<std::unique_ptr<SketchMatrix>> matrices_;
};

}  // namespace annsim
