#include "annsim/sketch.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace annsim {

std::string_view to_string(SketchRole role) { return role == SketchRole::main ? "main" : "aux"; }

SketchMatrix::SketchMatrix(std::size_t rows, std::size_t dim, int scale, SketchRole role)
    : rows_(rows), dim_(dim), scale_(scale), role_(role), col_words_(BitVector::words_for(rows)),
      columns_(col_words_ * dim, 0) {
    if (rows == 0) throw std::invalid_argument("sketch matrix needs at least one row");
    if (dim == 0) throw std::invalid_argument("sketch matrix needs positive dimension");
}

void SketchMatrix::set(std::size_t row, std::size_t col, bool value) {
    auto& word = columns_[col * col_words_ + row / 64];
    const std::uint64_t mask = std::uint64_t{1} << (row % 64);
    word = value ? (word | mask) : (word & ~mask);
}

double SketchMatrix::density() const {
    std::size_t ones = 0;
    for (auto w : columns_) ones += static_cast<std::size_t>(std::popcount(w));
    return static_cast<double>(ones) / static_cast<double>(rows_ * dim_);
}

BitVector SketchMatrix::row(std::size_t r) const {
    BitVector out(dim_);
    for (std::size_t c = 0; c < dim_; ++c) {
        if (get(r, c)) out.set(c, true);
    }
    return out;
}

SketchVector SketchMatrix::apply(const Point& p) const {
    if (p.size() != dim_) {
        throw DimensionMismatch("sketch of a " + std::to_string(p.size()) + "-bit point with a " +
                                std::to_string(dim_) + "-column matrix");
    }
    SketchVector out(rows_);
    auto acc = out.mutable_words();
    const auto words = p.words();
    for (std::size_t w = 0; w < words.size(); ++w) {
        std::uint64_t bits = words[w];
        while (bits != 0) {
            const std::size_t col = w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
            bits &= bits - 1;
            const std::uint64_t* column = columns_.data() + col * col_words_;
            for (std::size_t k = 0; k < col_words_; ++k) acc[k] ^= column[k];
        }
    }
    return out;
}

double delta_threshold(double beta, double alpha) {
    if (!(beta >= 1.0)) throw std::invalid_argument("delta_threshold needs beta >= 1");
    if (!(alpha >= 1.0)) throw std::invalid_argument("delta_threshold needs alpha >= 1");
    const double base = 1.0 - 1.0 / (2.0 * beta);
    return 0.5 * std::pow(base, beta) * (1.0 - std::pow(base, (alpha - 1.0) * beta));
}

double row_collision_prob(double lambda, double h) {
    if (!(lambda >= 1.0)) throw std::invalid_argument("row_collision_prob needs lambda >= 1");
    if (h < 0.0) throw std::invalid_argument("row_collision_prob needs h >= 0");
    return 0.5 * (1.0 - std::pow(1.0 - 1.0 / (2.0 * lambda), h));
}

double separation_threshold(double beta, double alpha) {
    if (!(beta >= 1.0)) throw std::invalid_argument("separation_threshold needs beta >= 1");
    if (!(alpha >= 1.0)) throw std::invalid_argument("separation_threshold needs alpha >= 1");
    return 0.5 * (row_collision_prob(beta, beta) + row_collision_prob(beta, alpha * beta));
}

double scale_threshold(ThresholdRule rule, int scale, double alpha) {
    const double beta = std::pow(alpha, scale);
    return rule == ThresholdRule::midpoint ? separation_threshold(beta, alpha) : delta_threshold(beta, alpha);
}

std::size_t sketch_radius(ThresholdRule rule, int scale, double alpha, std::size_t rows) {
    return static_cast<std::size_t>(std::floor(scale_threshold(rule, scale, alpha) * static_cast<double>(rows)));
}

std::size_t main_rows(double c1, std::size_t n) {
    const double rows = std::ceil(c1 * std::log2(static_cast<double>(n)));
    return rows < 1.0 ? 1 : static_cast<std::size_t>(rows);
}

std::size_t aux_rows(double c2, double s, std::size_t n) {
    if (!(s > 0.0)) throw std::invalid_argument("aux_rows needs s > 0");
    const double rows = std::ceil((c2 / s) * std::log2(static_cast<double>(n)));
    return rows < 1.0 ? 1 : static_cast<std::size_t>(rows);
}

SketchMatrix derive_matrix(const PublicCoin& coin, SketchRole role, int scale, std::size_t rows, std::size_t dim,
                           double alpha) {
    if (scale < 0) throw std::invalid_argument("sketch scale must be non-negative");
    SketchMatrix m(rows, dim, scale, role);
    const CoinDomain domain = role == SketchRole::main ? CoinDomain::main_sketch : CoinDomain::aux_sketch;
    const std::uint64_t threshold = bernoulli_threshold(1.0 / (4.0 * std::pow(alpha, scale)));
    std::vector<std::uint64_t> keys(rows);
    for (std::size_t r = 0; r < rows; ++r) keys[r] = coin.row_key(domain, scale, r);
    const std::size_t col_words = BitVector::words_for(rows);
    for (std::size_t c = 0; c < dim; ++c) {
        for (std::size_t w = 0; w < col_words; ++w) {
            std::uint64_t word = 0;
            const std::size_t end = std::min(rows, (w + 1) * 64);
            for (std::size_t r = w * 64; r < end; ++r) {
                word |= static_cast<std::uint64_t>((stream_word(keys[r], c) >> 11) < threshold) << (r % 64);
            }
            m.set_column_word(c, w, word);
        }
    }
    return m;
}

SketchVector sketch_apply(const SketchMatrix& m, const Point& p) { return m.apply(p); }

SketchBank::SketchBank(PublicCoin coin, SketchRole role, std::size_t rows, std::size_t dim, double alpha,
                       int max_scale)
    : coin_(coin), role_(role), rows_(rows), dim_(dim), alpha_(alpha), max_scale_(max_scale),
      once_(std::make_unique<std::once_flag[]>(static_cast<std::size_t>(max_scale) + 1)),
      matrices_(static_cast<std::size_t>(max_scale) + 1) {
    if (max_scale < 0) throw std::invalid_argument("sketch bank needs max_scale >= 0");
}

const SketchMatrix& SketchBank::matrix(int scale) const {
    if (scale < 0 || scale > max_scale_) {
        throw std::out_of_range("sketch scale " + std::to_string(scale) + " outside [0, " +
                                std::to_string(max_scale_) + "]");
    }
    const auto idx = static_cast<std::size_t>(scale);
    std::call_once(once_[idx], [&] {
        matrices_[idx] = std::make_unique<SketchMatrix>(derive_matrix(coin_, role_, scale, rows_, dim_, alpha_));
    });
    return *matrices_[idx];
}

}  // namespace annsim
