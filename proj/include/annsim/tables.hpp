#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "annsim/core.hpp"
#include "annsim/randomness.hpp"
#include "annsim/sketch.hpp"

namespace annsim {

enum class CellKind { main, aux, member_exact, member_near1 };

std::string_view to_string(CellKind kind);

/// Cell T_i[key] of a main table.
struct MainAddress {
    int scale = 0;
    SketchVector key;

    friend bool operator==(const MainAddress&, const MainAddress&) = default;
};

/// The in-table part of an auxiliary cell address: one group of scales with
/// the query's aux sketches at those scales, plus the group bounds.
struct AuxAddress {
    std::vector<int> scales;
    std::vector<SketchVector> sketches;
    int group_lo = 0;
    int group_hi = 0;

    std::size_t width() const { return scales.size(); }

    friend bool operator==(const AuxAddress&, const AuxAddress&) = default;
};

/// Cell of the auxiliary table attached to main cell (scale, subtable).
struct AuxCellAddress {
    int scale = 0;
    SketchVector subtable;
    AuxAddress word;

    friend bool operator==(const AuxCellAddress&, const AuxCellAddress&) = default;
};

enum class MemberKind { exact, near1 };

/// Cell of one of the two membership tables used for the degenerate cases.
struct MemberAddress {
    MemberKind kind = MemberKind::exact;
    Point query;

    friend bool operator==(const MemberAddress&, const MemberAddress&) = default;
};

using CellAddress = std::variant<MainAddress, AuxCellAddress, MemberAddress>;

CellKind kind_of(const CellAddress& address);

/// `<kind>:<scale>:<addr-hex>`; membership cells have scale `-`, aux cells
/// append `/<lo>-<hi>/<scale>=<hex>,...` to the subtable hex.
std::string format_address(const CellAddress& address);

struct EmptyCell {
    friend bool operator==(const EmptyCell&, const EmptyCell&) = default;
};

struct DataPoint {
    Point point;
    std::size_t index = 0;  ///< position in the database

    friend bool operator==(const DataPoint&, const DataPoint&) = default;
};

struct SmallInt {
    int value = 0;

    friend bool operator==(const SmallInt&, const SmallInt&) = default;
};

using CellContent = std::variant<EmptyCell, DataPoint, SmallInt>;

inline bool is_empty(const CellContent& c) { return std::holds_alternative<EmptyCell>(c); }

/// `EMPTY`, `point:<hex>` or `int:<r>`.
std::string format_content(const CellContent& content);

/// Settings of the auxiliary tables (only needed by the large-k search).
struct AuxSettings {
    int s_int = 1;
    double s_real = 1.0;
};

/// log2 of the cell counts a materialized table family would need, and the
/// cell width in bits.
struct TableGeometry {
    double main_cells_log2 = 0.0;
    double aux_cells_log2 = 0.0;
    std::size_t word_bits = 0;
};

/// The virtual tables of one (database, public coin) pair. Cell contents are
/// computed on demand; nothing is materialized except the sketch matrices and
/// the database points' sketches, both cached lazily per scale.
class VirtualTables {
public:
    VirtualTables(const Database& db, const Params& params, PublicCoin coin,
                  std::optional<AuxSettings> aux = std::nullopt);

    VirtualTables(const VirtualTables&) = delete;
    VirtualTables& operator=(const VirtualTables&) = delete;

    const Database& database() const { return db_; }
    const Params& params() const { return params_; }
    const PublicCoin& coin() const { return coin_; }
    const SketchBank& main_bank() const { return main_; }
    const SketchBank& aux_bank() const;
    bool has_aux() const { return aux_bank_ != nullptr; }
    const AuxSettings& aux_settings() const;

    std::size_t main_rows() const { return main_.rows(); }
    std::size_t aux_rows() const;
    std::size_t main_radius(int scale) const;
    std::size_t aux_radius(int scale) const;

    /// M_i x, the main-table address for query x at scale i.
    SketchVector main_key(int scale, const Point& x) const { return main_.apply(scale, x); }
    /// N_j x.
    SketchVector aux_key(int scale, const Point& x) const;

    /// Lowest-index z with dist(key, M_i z) within the scale-i radius, else EMPTY.
    CellContent main_cell(int scale, const SketchVector& key) const;

    /// Smallest r in [1, w0] whose D set exceeds a n^(-1/s) fraction of C_i,
    /// else s_int + 1. C_i and the D sets are taken relative to `subtable`
    /// and the sketches carried by `word`.
    CellContent aux_cell(int scale, const SketchVector& subtable, const AuxAddress& word) const;

    /// member_exact: x itself if stored. member_near1: lowest-index z with
    /// dist(x, z) <= 1.
    CellContent membership_cell(MemberKind kind, const Point& x) const;

    CellContent cell(const CellAddress& address) const;

    TableGeometry geometry() const;

private:
    const std::vector<SketchVector>& point_sketches(const SketchBank& bank, int scale) const;
    std::vector<std::size_t> c_members(int scale, const SketchVector& key) const;

    struct SketchCache {
        std::unique_ptr<std::once_flag[]> once;
        std::vector<std::vector<SketchVector>> rows;
    };

    const Database& db_;
    Params params_;
    PublicCoin coin_;
    SketchBank main_;
    std::unique_ptr<SketchBank> aux_bank_;
    std::optional<AuxSettings> aux_;
    mutable SketchCache main_cache_;
    mutable SketchCache aux_cache_;
};

}  // namespace annsim
