#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "annsim/core.hpp"
#include "annsim/search.hpp"
#include "annsim/sketch.hpp"

namespace annsim {

struct NearestNeighbor {
    std::size_t index = 0;
    std::size_t dist = 0;
};

/// Lowest-index point at minimum Hamming distance from x.
NearestNeighbor exact_nn(const Point& x, const Database& db);

/// Brute-force scale sets for one query and coin. Index lists are sorted
/// database indices. B and C are indexed by scale 0..I; D(i, j) for j <= i
/// is available when the aux sketches were supplied.
class ScaleSets {
public:
    int scales() const { return static_cast<int>(b_.size()) - 1; }
    std::size_t n() const { return n_; }

    /// {y : dist(x, y) <= alpha^i}; scale I + 1 denotes the whole database.
    const std::vector<std::size_t>& B(int i) const;
    /// {z : dist(M_i x, M_i z) <= threshold_i * rows}.
    const std::vector<std::size_t>& C(int i) const { return c_.at(static_cast<std::size_t>(i)); }
    /// {z in C_i : dist(N_j x, N_j z) <= threshold_j * aux_rows}.
    const std::vector<std::size_t>& D(int i, int j) const;
    bool has_d() const { return !d_.empty(); }

private:
    friend ScaleSets exact_sets(const Point&, const Database&, const Params&, const SketchBank&,
                                const SketchBank*);

    std::size_t n_ = 0;
    std::vector<std::vector<std::size_t>> b_;
    std::vector<std::vector<std::size_t>> c_;
    std::vector<std::vector<std::vector<std::size_t>>> d_;  // d_[i][j], j <= i
    std::vector<std::size_t> all_;
};

/// Builds every B_i and C_i, and every D_{i,j} when `aux` is given, straight
/// from their definitions. Shares only the sketch matrices with the tables.
ScaleSets exact_sets(const Point& x, const Database& db, const Params& params, const SketchBank& main,
                     const SketchBank* aux = nullptr);

/// B_i subset C_i subset B_{i+1} for every scale.
bool check_assumption1(const ScaleSets& sets);

/// For all j <= i: at most a n^(-1/s) fraction of B_j lies outside D_{i,j},
/// and at most a n^(-1/s) fraction of C_i \ B_{j+1} lies inside D_{i,j}.
bool check_assumption2(const ScaleSets& sets, double s_real, std::size_t n);

/// dist(x, z) <= gamma * dist(x, NN(x)). Throws if z is not in db.
bool is_gamma_approx(const Point& x, const Database& db, const Point& z, double gamma);

/// C_l empty and C_u non-empty.
bool window_holds(const ScaleSets& sets, int l, int u);

/// u' - l' <= (u - l)/tau + 3, or |C_{u'}| <= 2 n^(-1/s) |C_u|.
bool phase_progress_holds(const ScaleSets& sets, const WindowStep& step, int tau, double s_real, std::size_t n);

}  // namespace annsim
