#include "annsim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numeric>
#include <stdexcept>

namespace annsim {

namespace {

std::size_t count_outside(const std::vector<std::size_t>& set, const std::vector<std::size_t>& other) {
    std::vector<std::size_t> diff;
    std::set_difference(set.begin(), set.end(), other.begin(), other.end(), std::back_inserter(diff));
    return diff.size();
}

bool subset(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

NearestNeighbor exact_nn(const Point& x, const Database& db) {
    NearestNeighbor best{0, hamming_dist(x, db[0])};
    for (std::size_t i = 1; i < db.size(); ++i) {
        const std::size_t dist = hamming_dist(x, db[i]);
        if (dist < best.dist) best = {i, dist};
    }
    return best;
}

const std::vector<std::size_t>& ScaleSets::B(int i) const {
    if (i == scales() + 1) return all_;
    return b_.at(static_cast<std::size_t>(i));
}

const std::vector<std::size_t>& ScaleSets::D(int i, int j) const {
    if (d_.empty()) throw std::logic_error("D sets need the aux sketches");
    if (j < 0 || j > i) throw std::out_of_range("D(i, j) is defined for 0 <= j <= i");
    return d_.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(j));
}

ScaleSets exact_sets(const Point& x, const Database& db, const Params& params, const SketchBank& main,
                     const SketchBank* aux) {
    const int top = params.scales;
    ScaleSets sets;
    sets.n_ = db.size();
    sets.all_.resize(db.size());
    std::iota(sets.all_.begin(), sets.all_.end(), std::size_t{0});

    std::vector<std::size_t> dist(db.size());
    for (std::size_t z = 0; z < db.size(); ++z) dist[z] = hamming_dist(x, db[z]);

    sets.b_.resize(static_cast<std::size_t>(top) + 1);
    sets.c_.resize(static_cast<std::size_t>(top) + 1);
    for (int i = 0; i <= top; ++i) {
        const double radius = std::pow(params.alpha, i);
        const auto& m = main.matrix(i);
        const auto mx = sketch_apply(m, x);
        const double limit = scale_threshold(params.threshold, i, params.alpha) * static_cast<double>(m.rows());
        for (std::size_t z = 0; z < db.size(); ++z) {
            // Exact powers of alpha are boundary-inclusive.
            if (static_cast<double>(dist[z]) <= radius * (1.0 + 1e-12)) sets.b_[i].push_back(z);
            if (static_cast<double>(hamming_dist(mx, sketch_apply(m, db[z]))) <= limit) sets.c_[i].push_back(z);
        }
    }
    for (int i = 0; i < top; ++i) {
        if (!subset(sets.b_[i], sets.b_[i + 1])) throw std::logic_error("Hamming balls are not nested");
    }

    if (aux != nullptr) {
        std::vector<std::vector<bool>> near(static_cast<std::size_t>(top) + 1);
        for (int j = 0; j <= top; ++j) {
            const auto& nm = aux->matrix(j);
            const auto nx = sketch_apply(nm, x);
            const double limit = scale_threshold(params.threshold, j, params.alpha) * static_cast<double>(nm.rows());
            near[j].resize(db.size());
            for (std::size_t z = 0; z < db.size(); ++z) {
                near[j][z] = static_cast<double>(hamming_dist(nx, sketch_apply(nm, db[z]))) <= limit;
            }
        }
        sets.d_.resize(static_cast<std::size_t>(top) + 1);
        for (int i = 0; i <= top; ++i) {
            sets.d_[i].resize(static_cast<std::size_t>(i) + 1);
            for (int j = 0; j <= i; ++j) {
                for (auto z : sets.c_[i]) {
                    if (near[j][z]) sets.d_[i][j].push_back(z);
                }
            }
        }
    }
    return sets;
}

bool check_assumption1(const ScaleSets& sets) {
    for (int i = 0; i <= sets.scales(); ++i) {
        if (!subset(sets.B(i), sets.C(i)) || !subset(sets.C(i), sets.B(i + 1))) return false;
    }
    return true;
}

bool check_assumption2(const ScaleSets& sets, double s_real, std::size_t n) {
    for (int i = 0; i <= sets.scales(); ++i) {
        for (int j = 0; j <= i; ++j) {
            const auto& d = sets.D(i, j);
            const auto& bj = sets.B(j);
            if (exceeds_fraction(count_outside(bj, d), bj.size(), n, s_real)) return false;

            std::vector<std::size_t> far;
            std::set_difference(sets.C(i).begin(), sets.C(i).end(), sets.B(j + 1).begin(), sets.B(j + 1).end(),
                                std::back_inserter(far));
            const std::size_t far_in_d = far.size() - count_outside(far, d);
            if (exceeds_fraction(far_in_d, far.size(), n, s_real)) return false;
        }
    }
    return true;
}

bool is_gamma_approx(const Point& x, const Database& db, const Point& z, double gamma) {
    if (db.index_of(z) == db.size()) throw std::invalid_argument("candidate is not a database point");
    const auto nn = exact_nn(x, db);
    return static_cast<double>(hamming_dist(x, z)) <= gamma * static_cast<double>(nn.dist);
}

bool window_holds(const ScaleSets& sets, int l, int u) { return sets.C(l).empty() && !sets.C(u).empty(); }

bool phase_progress_holds(const ScaleSets& sets, const WindowStep& step, int tau, double s_real, std::size_t n) {
    const int before = step.u_before - step.l_before;
    const int after = step.u_after - step.l_after;
    if (static_cast<double>(after) <= static_cast<double>(before) / tau + 3.0) return true;
    // |C_u'| <= 2 n^(-1/s) |C_u|  <=>  not (|C_u'| / 2 > n^(-1/s) |C_u|)
    const std::size_t shrunk = sets.C(step.u_after).size();
    const std::size_t base = sets.C(step.u_before).size();
    if (shrunk == 0) return true;
    const double lhs = std::log(static_cast<double>(shrunk) / 2.0) + std::log(static_cast<double>(n)) / s_real;
    return base > 0 && lhs <= std::log(static_cast<double>(base)) + 1e-12;
}

}  // namespace annsim
