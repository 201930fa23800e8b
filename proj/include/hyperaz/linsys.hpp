#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hyperaz/ratfunc.hpp"

namespace hyperaz {

// Homogeneous linear system A·v = 0 with sparse polynomial entries in the
// parameter variables (typically the recurrence/ODE parameter and ep).
// "Primary" marks the telescoper coefficient columns e_i; the remaining
// columns hold ansatz-polynomial coefficients.
struct LinearSystem {
    using Row = std::vector<std::pair<int, MultiPoly>>;  // sorted by column

    std::vector<std::string> unknowns;
    std::vector<char> primary;  // empty means "no primary columns"
    std::vector<Row> rows;

    std::size_t cols() const { return unknowns.size(); }
    bool is_primary(int c) const {
        return !primary.empty() && primary[static_cast<std::size_t>(c)];
    }
    std::vector<std::string> entry_vars() const;
    std::size_t hash() const;

    static LinearSystem from_ratfunc_rows(
        std::vector<std::string> unknowns, std::vector<char> primary,
        const std::vector<std::vector<std::pair<int, RatFunc>>>& rows);
};

struct RankInfo {
    long rank = 0;
    long corank = 0;
};

// Rank after evaluating all parameters at deterministic pseudo-random
// integers mod a word-sized prime.  Throws EvaluationExhausted after a
// bounded number of bad points.
RankInfo modular_rank(const LinearSystem& sys, std::uint64_t seed);

struct SplitRankInfo {
    long rank_secondary = 0;  // rank of the non-primary column submatrix
    long rank_extra = 0;      // additional rank contributed by primary columns
};

// Modular image of the two-phase elimination used by the telescoper search.
// The primary columns admit a nontrivial solution iff
// rank_extra < #primary (up to unlucky evaluation points).
SplitRankInfo modular_split_rank(const LinearSystem& sys, std::uint64_t seed);

// Basis of the nullspace over Q(ep)(param) via fraction-free elimination
// with content stripping.  Vectors are normalized: polynomial entries,
// primitive as a tuple, first nonzero entry positive.
std::vector<std::vector<RatFunc>> nullspace(const LinearSystem& sys);

// Nullspace vectors with every free non-primary coordinate fixed to zero,
// reconstructed from modular images at many evaluation points of `var`,
// which must be the only variable appearing in the system.  One vector per
// free primary column, each normalized like the ProjectedSolver output: the
// primary part is a primitive polynomial tuple whose first nonzero entry has
// a positive leading coefficient.  The candidates are verified against the
// exact system before being returned; nullopt means reconstruction did not
// converge and the caller should fall back to exact elimination.
std::optional<std::vector<std::vector<RatFunc>>> reconstruct_nullspace(
    const LinearSystem& sys, const std::string& var, std::uint64_t seed);

// Two-phase exact elimination: non-primary columns are eliminated first, so
// solutions can be searched in the small projected system on the primary
// columns and lifted back (free non-primary columns fixed to zero).
class ProjectedSolver {
public:
    explicit ProjectedSolver(const LinearSystem& sys);

    // Basis of the projection of the nullspace onto the primary columns.
    const std::vector<std::vector<RatFunc>>& primary_basis() const {
        return primary_basis_;
    }
    // Full solution vector for a point of the projected nullspace.
    std::vector<RatFunc> lift(const std::vector<RatFunc>& primary_values) const;

private:
    const LinearSystem* sys_;
    std::vector<int> primary_cols_;
    std::vector<std::vector<RatFunc>> primary_basis_;
    struct Pivot {
        int col;
        LinearSystem::Row row;
    };
    std::vector<Pivot> pivots_;  // in elimination order
};

}  // namespace hyperaz
