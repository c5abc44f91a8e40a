#include "annsim/tables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace annsim {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

std::size_t bits_for(std::size_t values) {
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < values) ++bits;
    return bits;
}

}  // namespace

std::string_view to_string(CellKind kind) {
    switch (kind) {
        case CellKind::main:
            return "main";
        case CellKind::aux:
            return "aux";
        case CellKind::member_exact:
            return "member_exact";
        case CellKind::member_near1:
            return "member_near1";
    }
    return "?";
}

CellKind kind_of(const CellAddress& address) {
    return std::visit(overloaded{
                          [](const MainAddress&) { return CellKind::main; },
                          [](const AuxCellAddress&) { return CellKind::aux; },
                          [](const MemberAddress& m) {
                              return m.kind == MemberKind::exact ? CellKind::member_exact : CellKind::member_near1;
                          },
                      },
                      address);
}

std::string format_address(const CellAddress& address) {
    std::string out(to_string(kind_of(address)));
    std::visit(overloaded{
                   [&](const MainAddress& a) { out += ":" + std::to_string(a.scale) + ":" + a.key.to_hex(); },
                   [&](const AuxCellAddress& a) {
                       out += ":" + std::to_string(a.scale) + ":" + a.subtable.to_hex() + "/" +
                              std::to_string(a.word.group_lo) + "-" + std::to_string(a.word.group_hi) + "/";
                       for (std::size_t q = 0; q < a.word.width(); ++q) {
                           if (q > 0) out += ",";
                           out += std::to_string(a.word.scales[q]) + "=" + a.word.sketches[q].to_hex();
                       }
                   },
                   [&](const MemberAddress& a) { out += ":-:" + a.query.to_hex(); },
               },
               address);
    return out;
}

std::string format_content(const CellContent& content) {
    return std::visit(overloaded{
                          [](const EmptyCell&) { return std::string("EMPTY"); },
                          [](const DataPoint& p) { return "point:" + p.point.to_hex(); },
                          [](const SmallInt& s) { return "int:" + std::to_string(s.value); },
                      },
                      content);
}

VirtualTables::VirtualTables(const Database& db, const Params& params, PublicCoin coin,
                             std::optional<AuxSettings> aux)
    : db_(db), params_(params), coin_(coin),
      main_(coin, SketchRole::main, annsim::main_rows(params.c1, params.n), db.dim(), params.alpha, params.scales),
      aux_(aux) {
    if (db.dim() != params.d) throw DimensionMismatch("database dimension differs from params.d");
    if (db.size() != params.n) throw std::invalid_argument("database size differs from params.n");
    const auto scales = static_cast<std::size_t>(params.scales) + 1;
    main_cache_.once = std::make_unique<std::once_flag[]>(scales);
    main_cache_.rows.resize(scales);
    if (aux_) {
        if (aux_->s_int < 1) throw std::invalid_argument("aux tables need s_int >= 1");
        aux_bank_ = std::make_unique<SketchBank>(coin, SketchRole::aux,
                                                 annsim::aux_rows(params.c2, aux_->s_real, params.n), db.dim(),
                                                 params.alpha, params.scales);
        aux_cache_.once = std::make_unique<std::once_flag[]>(scales);
        aux_cache_.rows.resize(scales);
    }
}

const SketchBank& VirtualTables::aux_bank() const {
    if (!aux_bank_) throw std::logic_error("auxiliary tables were not configured");
    return *aux_bank_;
}

const AuxSettings& VirtualTables::aux_settings() const {
    if (!aux_) throw std::logic_error("auxiliary tables were not configured");
    return *aux_;
}

std::size_t VirtualTables::aux_rows() const { return aux_bank().rows(); }

std::size_t VirtualTables::main_radius(int scale) const {
    return sketch_radius(params_.threshold, scale, params_.alpha, main_.rows());
}

std::size_t VirtualTables::aux_radius(int scale) const {
    return sketch_radius(params_.threshold, scale, params_.alpha, aux_bank().rows());
}

SketchVector VirtualTables::aux_key(int scale, const Point& x) const { return aux_bank().apply(scale, x); }

const std::vector<SketchVector>& VirtualTables::point_sketches(const SketchBank& bank, int scale) const {
    auto& cache = (&bank == &main_) ? main_cache_ : aux_cache_;
    const auto idx = static_cast<std::size_t>(scale);
    std::call_once(cache.once[idx], [&] {
        const auto& m = bank.matrix(scale);
        auto& out = cache.rows[idx];
        out.reserve(db_.size());
        for (const auto& z : db_) out.push_back(m.apply(z));
    });
    return cache.rows[idx];
}

std::vector<std::size_t> VirtualTables::c_members(int scale, const SketchVector& key) const {
    const auto& sketches = point_sketches(main_, scale);
    const std::size_t radius = main_radius(scale);
    std::vector<std::size_t> members;
    for (std::size_t z = 0; z < sketches.size(); ++z) {
        if (hamming_dist(key, sketches[z]) <= radius) members.push_back(z);
    }
    return members;
}

CellContent VirtualTables::main_cell(int scale, const SketchVector& key) const {
    if (scale < 0 || scale > params_.scales) throw std::out_of_range("main table scale out of range");
    if (key.size() != main_.rows()) throw DimensionMismatch("main table address has wrong width");
    const auto& sketches = point_sketches(main_, scale);
    const std::size_t radius = main_radius(scale);
    for (std::size_t z = 0; z < sketches.size(); ++z) {
        if (hamming_dist(key, sketches[z]) <= radius) return DataPoint{db_[z], z};
    }
    return EmptyCell{};
}

CellContent VirtualTables::aux_cell(int scale, const SketchVector& subtable, const AuxAddress& word) const {
    const auto& settings = aux_settings();
    if (scale < 0 || scale > params_.scales) throw std::out_of_range("aux table scale out of range");
    if (subtable.size() != main_.rows()) throw DimensionMismatch("aux subtable index has wrong width");
    if (word.width() < 1 || word.width() > static_cast<std::size_t>(settings.s_int) ||
        word.sketches.size() != word.width()) {
        throw std::invalid_argument("aux address must carry between 1 and s_int scales with one sketch each");
    }
    for (std::size_t q = 0; q < word.width(); ++q) {
        if (word.scales[q] < 0 || word.scales[q] > scale) throw std::out_of_range("aux address scale out of range");
        if (q > 0 && word.scales[q] <= word.scales[q - 1]) {
            throw std::invalid_argument("aux address scales must be strictly increasing");
        }
        if (word.sketches[q].size() != aux_rows()) throw DimensionMismatch("aux sketch has wrong width");
    }

    const auto members = c_members(scale, subtable);
    for (std::size_t q = 0; q < word.width(); ++q) {
        const auto& sketches = point_sketches(*aux_bank_, word.scales[q]);
        const std::size_t radius = aux_radius(word.scales[q]);
        std::size_t in_d = 0;
        for (auto z : members) {
            if (hamming_dist(word.sketches[q], sketches[z]) <= radius) ++in_d;
        }
        if (exceeds_fraction(in_d, members.size(), params_.n, settings.s_real)) {
            return SmallInt{static_cast<int>(q) + 1};
        }
    }
    return SmallInt{settings.s_int + 1};
}

CellContent VirtualTables::membership_cell(MemberKind kind, const Point& x) const {
    if (x.size() != db_.dim()) throw DimensionMismatch("membership query has wrong dimension");
    const std::size_t limit = kind == MemberKind::exact ? 0 : 1;
    for (std::size_t z = 0; z < db_.size(); ++z) {
        if (hamming_dist(x, db_[z]) <= limit) return DataPoint{db_[z], z};
    }
    return EmptyCell{};
}

CellContent VirtualTables::cell(const CellAddress& address) const {
    return std::visit(overloaded{
                          [&](const MainAddress& a) { return main_cell(a.scale, a.key); },
                          [&](const AuxCellAddress& a) { return aux_cell(a.scale, a.subtable, a.word); },
                          [&](const MemberAddress& a) { return membership_cell(a.kind, a.query); },
                      },
                      address);
}

TableGeometry VirtualTables::geometry() const {
    TableGeometry g;
    const double tables = static_cast<double>(params_.scales + 1);
    g.main_cells_log2 = std::log2(tables) + static_cast<double>(main_.rows());
    std::size_t small_values = 2;
    if (aux_) {
        // (I+1) * 2^{r_main} aux tables, each addressed by <l, u, w0, w_1..w_s>.
        const double s = static_cast<double>(aux_->s_int);
        g.aux_cells_log2 = std::log2(tables) + static_cast<double>(main_.rows()) + 2.0 * std::log2(tables) +
                           std::log2(s) + s * static_cast<double>(aux_bank_->rows());
        small_values = static_cast<std::size_t>(aux_->s_int) + 2;
    }
    // Two tag bits distinguish point / EMPTY / small integer.
    g.word_bits = std::max(db_.dim(), bits_for(small_values)) + 2;
    return g;
}

}  // namespace annsim
