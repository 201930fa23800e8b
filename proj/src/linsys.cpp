#include "hyperaz/linsys.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace hyperaz {

std::vector<std::string> LinearSystem::entry_vars() const {
    std::set<std::string> vs;
    for (auto& row : rows)
        for (auto& [c, p] : row) vs.insert(p.vars().begin(), p.vars().end());
    return {vs.begin(), vs.end()};
}

std::size_t LinearSystem::hash() const {
    std::size_t h = 14695981039346656037ull;
    auto mix = [&h](std::size_t x) {
        h ^= x;
        h *= 1099511628211ull;
    };
    mix(unknowns.size());
    for (auto& row : rows)
        for (auto& [c, p] : row) {
            mix(static_cast<std::size_t>(c));
            mix(p.hash());
        }
    return h;
}

LinearSystem LinearSystem::from_ratfunc_rows(
    std::vector<std::string> unknowns, std::vector<char> primary,
    const std::vector<std::vector<std::pair<int, RatFunc>>>& rfrows) {
    LinearSystem sys;
    sys.unknowns = std::move(unknowns);
    sys.primary = std::move(primary);
    for (auto& rfrow : rfrows) {
        // clear denominators across the row
        MultiPoly lcm{Rational(1)};
        for (auto& [c, f] : rfrow) {
            MultiPoly g = MultiPoly::gcd(lcm, f.den());
            lcm = lcm * MultiPoly::exact_div(f.den(), g);
        }
        Row row;
        for (auto& [c, f] : rfrow) {
            if (f.is_zero()) continue;
            row.emplace_back(c, f.num() * MultiPoly::exact_div(lcm, f.den()));
        }
        std::sort(row.begin(), row.end(),
                  [](auto& a, auto& b) { return a.first < b.first; });
        if (!row.empty()) sys.rows.push_back(std::move(row));
    }
    return sys;
}

// ---- shared elimination helpers ------------------------------------------

namespace {

void strip_row(LinearSystem::Row& row) {
    if (row.empty()) return;
    MultiPoly g;
    for (auto& [c, p] : row) {
        g = MultiPoly::gcd(g, p);
        if (g.is_one()) break;
    }
    if (!g.is_one() && !g.is_zero())
        for (auto& [c, p] : row) p = MultiPoly::exact_div(p, g);
    // rational content
    Rational num_gcd = 0;
    mpz_class den_lcm = 1;
    for (auto& [c, p] : row) {
        Rational pc = p.content();
        mpz_gcd(num_gcd.get_num().get_mpz_t(), num_gcd.get_num().get_mpz_t(),
                pc.get_num().get_mpz_t());
        mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(),
                pc.get_den().get_mpz_t());
    }
    Rational content(num_gcd.get_num(), den_lcm);
    content.canonicalize();
    if (row[0].second.leading_coeff() < 0) content = -content;
    if (content != 0 && content != 1)
        for (auto& [c, p] : row) p = p * (Rational(1) / content);
}

// row_j := piv_entry*row_j - a_j*pivot_row, fused sparse merge
LinearSystem::Row combine_rows(const LinearSystem::Row& row,
                               const MultiPoly& piv_entry,
                               const LinearSystem::Row& pivot_row,
                               const MultiPoly& a_j, int drop_col) {
    LinearSystem::Row out;
    out.reserve(row.size() + pivot_row.size());
    std::size_t i = 0, j = 0;
    while (i < row.size() || j < pivot_row.size()) {
        int ci = i < row.size() ? row[i].first : INT32_MAX;
        int cj = j < pivot_row.size() ? pivot_row[j].first : INT32_MAX;
        int c = std::min(ci, cj);
        MultiPoly v;
        if (ci == c && cj == c) {
            v = piv_entry * row[i].second - a_j * pivot_row[j].second;
            ++i, ++j;
        } else if (ci == c) {
            v = piv_entry * row[i].second;
            ++i;
        } else {
            v = -(a_j * pivot_row[j].second);
            ++j;
        }
        if (c != drop_col && !v.is_zero()) out.emplace_back(c, v);
    }
    strip_row(out);
    return out;
}

struct ExactElim {
    std::vector<LinearSystem::Row> rows;
    std::vector<char> alive;
    std::vector<long> colcount;
    std::size_t ncols;
    struct Pivot {
        int col;
        LinearSystem::Row row;
    };
    std::vector<Pivot> pivots;

    explicit ExactElim(const LinearSystem& sys)
        : rows(sys.rows), alive(sys.rows.size(), 1), colcount(sys.cols(), 0),
          ncols(sys.cols()) {
        for (auto& r : rows) strip_row(r);
        for (auto& r : rows)
            for (auto& [c, p] : r) colcount[static_cast<std::size_t>(c)]++;
    }

    void run(const std::function<bool(int)>& allowed) {
        while (true) {
            int best_col = -1;
            for (std::size_t c = 0; c < ncols; ++c) {
                if (colcount[c] == 0 || !allowed(static_cast<int>(c))) continue;
                if (best_col < 0 ||
                    colcount[c] < colcount[static_cast<std::size_t>(best_col)])
                    best_col = static_cast<int>(c);
            }
            if (best_col < 0) break;
            eliminate_column(best_col);
        }
    }

    const MultiPoly* find(const LinearSystem::Row& r, int col) const {
        auto it = std::lower_bound(
            r.begin(), r.end(), col,
            [](const auto& e, int c) { return e.first < c; });
        return it != r.end() && it->first == col ? &it->second : nullptr;
    }

    void eliminate_column(int col) {
        // pick pivot row: prefer constant entries, then short light rows
        std::size_t best = SIZE_MAX;
        auto score = [&](std::size_t i) {
            const MultiPoly* e = find(rows[i], col);
            std::size_t weight = 0;
            for (auto& [c, p] : rows[i]) weight += p.term_count();
            return std::tuple<int, std::size_t, std::size_t, std::size_t>(
                e->is_constant() ? 0 : 1, rows[i].size(), weight, i);
        };
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (alive[i] && find(rows[i], col) &&
                (best == SIZE_MAX || score(i) < score(best)))
                best = i;
        if (best == SIZE_MAX) {
            colcount[static_cast<std::size_t>(col)] = 0;
            return;
        }
        const MultiPoly piv = *find(rows[best], col);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (!alive[i] || i == best) continue;
            const MultiPoly* a = find(rows[i], col);
            if (!a) continue;
            for (auto& [c, p] : rows[i]) colcount[static_cast<std::size_t>(c)]--;
            rows[i] = combine_rows(rows[i], piv, rows[best], *a, col);
            for (auto& [c, p] : rows[i]) colcount[static_cast<std::size_t>(c)]++;
            if (rows[i].empty()) alive[i] = 0;
        }
        for (auto& [c, p] : rows[best]) colcount[static_cast<std::size_t>(c)]--;
        alive[best] = 0;
        pivots.push_back({col, rows[best]});
        rows[best].clear();
    }

    std::vector<LinearSystem::Row> active_rows() const {
        std::vector<LinearSystem::Row> out;
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (alive[i]) out.push_back(rows[i]);
        return out;
    }

    // values must be set for every non-pivot column
    void back_substitute(std::vector<RatFunc>& values) const {
        for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) {
            RatFunc s;
            const MultiPoly* piv = nullptr;
            for (auto& [c, p] : it->row) {
                if (c == it->col)
                    piv = &p;
                else if (!values[static_cast<std::size_t>(c)].is_zero())
                    s += RatFunc(p) * values[static_cast<std::size_t>(c)];
            }
            values[static_cast<std::size_t>(it->col)] = -s / RatFunc(*piv);
        }
    }
};

void normalize_vector(std::vector<RatFunc>& v) {
    // clear denominators, strip content, make first nonzero entry positive
    MultiPoly lcm{Rational(1)};
    for (auto& f : v) {
        if (f.is_zero()) continue;
        MultiPoly g = MultiPoly::gcd(lcm, f.den());
        lcm = lcm * MultiPoly::exact_div(f.den(), g);
    }
    std::vector<MultiPoly> nums;
    nums.reserve(v.size());
    for (auto& f : v)
        nums.push_back(f.is_zero() ? MultiPoly()
                                   : f.num() * MultiPoly::exact_div(lcm, f.den()));
    MultiPoly g;
    for (auto& p : nums) {
        g = MultiPoly::gcd(g, p);
        if (g.is_one()) break;
    }
    Rational sign(1);
    for (auto& p : nums)
        if (!p.is_zero()) {
            if (p.leading_coeff() < 0) sign = -1;
            break;
        }
    for (std::size_t i = 0; i < v.size(); ++i) {
        MultiPoly p = nums[i];
        if (!g.is_zero() && !g.is_one()) p = MultiPoly::exact_div(p, g);
        v[i] = RatFunc(p * sign);
    }
    // final pass: tuple-level rational content
    Rational num_gcd = 0;
    mpz_class den_lcm = 1;
    for (auto& f : v) {
        if (f.is_zero()) continue;
        Rational pc = f.num().content();
        mpz_gcd(num_gcd.get_num().get_mpz_t(), num_gcd.get_num().get_mpz_t(),
                pc.get_num().get_mpz_t());
        mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(),
                pc.get_den().get_mpz_t());
    }
    Rational content(num_gcd.get_num(), den_lcm);
    content.canonicalize();
    if (content != 0 && content != 1)
        for (auto& f : v)
            if (!f.is_zero()) f = RatFunc(f.num() * (Rational(1) / content));
}

}  // namespace

// ---- modular images ------------------------------------------------------

namespace {

struct ModElim {
    Fp fp;
    std::vector<std::vector<std::pair<int, std::uint64_t>>> rows;
    std::vector<char> alive;
    std::vector<long> colcount;
    std::size_t ncols;

    long run(const std::function<bool(int)>& allowed) {
        long npiv = 0;
        while (true) {
            int best_col = -1;
            for (std::size_t c = 0; c < ncols; ++c) {
                if (colcount[c] <= 0 || !allowed(static_cast<int>(c))) continue;
                if (best_col < 0 ||
                    colcount[c] < colcount[static_cast<std::size_t>(best_col)])
                    best_col = static_cast<int>(c);
            }
            if (best_col < 0) break;
            if (eliminate(best_col)) ++npiv;
        }
        return npiv;
    }

    static const std::uint64_t* find(
        const std::vector<std::pair<int, std::uint64_t>>& r, int col) {
        auto it = std::lower_bound(
            r.begin(), r.end(), col,
            [](const auto& e, int c) { return e.first < c; });
        return it != r.end() && it->first == col ? &it->second : nullptr;
    }

    bool eliminate(int col) {
        std::size_t best = SIZE_MAX;
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (alive[i] && find(rows[i], col) &&
                (best == SIZE_MAX || rows[i].size() < rows[best].size()))
                best = i;
        if (best == SIZE_MAX) {
            colcount[static_cast<std::size_t>(col)] = 0;
            return false;
        }
        std::uint64_t inv_piv = fp.inv(*find(rows[best], col));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (!alive[i] || i == best) continue;
            const std::uint64_t* a = find(rows[i], col);
            if (!a) continue;
            std::uint64_t factor = fp.mul(*a, inv_piv);
            std::vector<std::pair<int, std::uint64_t>> out;
            out.reserve(rows[i].size() + rows[best].size());
            std::size_t x = 0, y = 0;
            while (x < rows[i].size() || y < rows[best].size()) {
                int cx = x < rows[i].size() ? rows[i][x].first : INT32_MAX;
                int cy = y < rows[best].size() ? rows[best][y].first : INT32_MAX;
                int c = std::min(cx, cy);
                std::uint64_t val;
                if (cx == c && cy == c) {
                    val = fp.sub(rows[i][x].second,
                                 fp.mul(factor, rows[best][y].second));
                    ++x, ++y;
                } else if (cx == c) {
                    val = rows[i][x].second;
                    ++x;
                } else {
                    val = fp.neg(fp.mul(factor, rows[best][y].second));
                    ++y;
                }
                if (c != col && val) out.emplace_back(c, val);
            }
            for (auto& [c, v] : rows[i]) colcount[static_cast<std::size_t>(c)]--;
            rows[i] = std::move(out);
            for (auto& [c, v] : rows[i]) colcount[static_cast<std::size_t>(c)]++;
            if (rows[i].empty()) alive[i] = 0;
        }
        for (auto& [c, v] : rows[best]) colcount[static_cast<std::size_t>(c)]--;
        alive[best] = 0;
        rows[best].clear();
        return true;
    }
};

constexpr int kMaxEvalAttempts = 8;

ModElim build_mod_image(const LinearSystem& sys, std::uint64_t seed, int attempt) {
    const auto& primes = modular_primes();
    ModElim me;
    me.fp = Fp{primes[(seed + static_cast<std::uint64_t>(attempt)) % primes.size()]};
    auto vars = sys.entry_vars();
    std::map<std::string, std::uint64_t> assign;
    std::uint64_t salt = hash_mix(seed * 0x9e3779b97f4a7c15ull +
                                  static_cast<std::uint64_t>(attempt));
    for (std::size_t i = 0; i < vars.size(); ++i) {
        // points from [17, 2^20), avoiding small integers
        std::uint64_t v = 17 + hash_mix(salt ^ hash_mix(i + 1)) % ((1u << 20) - 17);
        assign[vars[i]] = v;
    }
    me.ncols = sys.cols();
    me.colcount.assign(sys.cols(), 0);
    for (auto& row : sys.rows) {
        std::vector<std::pair<int, std::uint64_t>> r;
        for (auto& [c, p] : row) {
            std::uint64_t v = p.eval_mod(assign, me.fp);  // may throw BadEvaluationPoint
            if (v) r.emplace_back(c, v);
        }
        if (!r.empty()) {
            for (auto& [c, v] : r) me.colcount[static_cast<std::size_t>(c)]++;
            me.rows.push_back(std::move(r));
        }
    }
    me.alive.assign(me.rows.size(), 1);
    return me;
}

template <typename F>
auto with_mod_image(const LinearSystem& sys, std::uint64_t seed, F&& f) {
    for (int attempt = 0; attempt < kMaxEvalAttempts; ++attempt) {
        try {
            ModElim me = build_mod_image(sys, seed, attempt);
            return f(me);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::BadEvaluationPoint) throw;
        }
    }
    raise(ErrorCode::EvaluationExhausted,
          "modular evaluation failed at all retry points");
}

}  // namespace

RankInfo modular_rank(const LinearSystem& sys, std::uint64_t seed) {
    return with_mod_image(sys, seed, [&](ModElim& me) {
        long rank = me.run([](int) { return true; });
        return RankInfo{rank, static_cast<long>(sys.cols()) - rank};
    });
}

SplitRankInfo modular_split_rank(const LinearSystem& sys, std::uint64_t seed) {
    return with_mod_image(sys, seed, [&](ModElim& me) {
        SplitRankInfo info;
        info.rank_secondary = me.run([&](int c) { return !sys.is_primary(c); });
        info.rank_extra = me.run([&](int c) { return sys.is_primary(c); });
        return info;
    });
}

// ---- nullspace reconstruction from modular images ------------------------

namespace {

using UPoly = std::vector<std::uint64_t>;  // coefficients ascending, trimmed

void utrim(UPoly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

UPoly umul(const UPoly& a, const UPoly& b, const Fp& fp) {
    if (a.empty() || b.empty()) return {};
    UPoly c(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            c[i + j] = fp.add(c[i + j], fp.mul(a[i], b[j]));
    return c;
}

UPoly usub(const UPoly& a, const UPoly& b, const Fp& fp) {
    UPoly c(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i] = fp.sub(i < a.size() ? a[i] : 0, i < b.size() ? b[i] : 0);
    utrim(c);
    return c;
}

UPoly uscale(UPoly a, std::uint64_t s, const Fp& fp) {
    for (auto& c : a) c = fp.mul(c, s);
    return a;
}

// quotient of a by b (b nonzero); remainder left in *rem
UPoly udivmod(UPoly a, const UPoly& b, const Fp& fp, UPoly* rem) {
    UPoly q(a.size() >= b.size() ? a.size() - b.size() + 1 : 0, 0);
    std::uint64_t inv = fp.inv(b.back());
    while (a.size() >= b.size()) {
        std::uint64_t f = fp.mul(a.back(), inv);
        q[a.size() - b.size()] = f;
        std::size_t off = a.size() - b.size();
        for (std::size_t i = 0; i < b.size(); ++i)
            a[off + i] = fp.sub(a[off + i], fp.mul(f, b[i]));
        utrim(a);
        if (a.empty()) break;
    }
    *rem = std::move(a);
    return q;
}

UPoly umonic(UPoly a, const Fp& fp) {
    if (!a.empty() && a.back() != 1)
        a = uscale(std::move(a), fp.inv(a.back()), fp);
    return a;
}

UPoly ugcd_mod(UPoly a, UPoly b, const Fp& fp) {
    utrim(a);
    utrim(b);
    while (!b.empty()) {
        UPoly r;
        udivmod(std::move(a), b, fp, &r);
        a = std::move(b);
        b = std::move(r);
    }
    return umonic(std::move(a), fp);
}

std::uint64_t ueval(const UPoly& a, std::uint64_t x, const Fp& fp) {
    std::uint64_t acc = 0;
    for (std::size_t i = a.size(); i-- > 0;) acc = fp.add(fp.mul(acc, x), a[i]);
    return acc;
}

// Newton interpolation through (xs[j], ys[j]); the xs must be distinct
UPoly uinterp(const std::vector<std::uint64_t>& xs,
              const std::vector<std::uint64_t>& ys, const Fp& fp) {
    const std::size_t n = xs.size();
    std::vector<std::uint64_t> c(ys);
    for (std::size_t k = 1; k < n; ++k)
        for (std::size_t i = n; i-- > k;)
            c[i] =
                fp.mul(fp.sub(c[i], c[i - 1]), fp.inv(fp.sub(xs[i], xs[i - k])));
    UPoly poly{c[n - 1]};
    utrim(poly);
    for (std::size_t i = n - 1; i-- > 0;) {
        // poly = poly*(x - xs[i]) + c[i]
        UPoly next(poly.size() + 1, 0);
        for (std::size_t k = 0; k < poly.size(); ++k) {
            next[k + 1] = fp.add(next[k + 1], poly[k]);
            next[k] = fp.sub(next[k], fp.mul(poly[k], xs[i]));
        }
        next[0] = fp.add(next[0], c[i]);
        utrim(next);
        poly = std::move(next);
    }
    return poly;
}

// Cauchy interpolation: num/den == f mod M with deg num <= dnum, den monic
// and coprime to num.  False when the half-extended-Euclid pass is
// inconsistent with a rational function of that degree split.
bool ucauchy(const UPoly& M, const UPoly& f, long dnum, const Fp& fp,
             UPoly* num, UPoly* den) {
    if (f.empty()) {
        *num = {};
        *den = {1};
        return true;
    }
    UPoly r0 = M, r1 = f, t0 = {}, t1 = {1};
    while (static_cast<long>(r1.size()) - 1 > dnum) {
        UPoly rem;
        UPoly q = udivmod(std::move(r0), r1, fp, &rem);
        r0 = std::move(r1);
        r1 = std::move(rem);
        UPoly t2 = usub(t0, umul(q, t1, fp), fp);
        t0 = std::move(t1);
        t1 = std::move(t2);
        if (r1.empty()) return false;
    }
    if (t1.empty()) return false;
    if (ugcd_mod(r1, t1, fp).size() != 1) return false;
    std::uint64_t inv = fp.inv(t1.back());
    *num = uscale(std::move(r1), inv, fp);
    *den = uscale(std::move(t1), inv, fp);
    return true;
}

struct PointImage {
    std::vector<int> pivot_pos;  // ascending positions in the column order
    // one solution per free primary position, indexed by position
    std::vector<std::vector<std::uint64_t>> vecs;
};

// Dense row echelon form with a fixed column order; the free-coordinate
// structure (and hence each canonical solution vector) depends only on that
// order, so results agree across evaluation points with generic pivots.
PointImage solve_point(
    const std::vector<std::vector<std::pair<int, UPoly>>>& rows_up,
    std::size_t ncols, const std::vector<int>& pos_of_col,
    const std::vector<char>& primary_pos, std::uint64_t x, const Fp& fp) {
    const std::size_t nrows = rows_up.size();
    std::vector<std::uint64_t> m(nrows * ncols, 0);
    for (std::size_t r = 0; r < nrows; ++r)
        for (auto& [c, up] : rows_up[r])
            m[r * ncols + static_cast<std::size_t>(
                              pos_of_col[static_cast<std::size_t>(c)])] =
                ueval(up, x, fp);

    PointImage out;
    std::vector<std::size_t> pivot_row;
    std::size_t rr = 0;
    for (std::size_t pos = 0; pos < ncols && rr < nrows; ++pos) {
        std::size_t pr = SIZE_MAX;
        for (std::size_t r = rr; r < nrows; ++r)
            if (m[r * ncols + pos]) {
                pr = r;
                break;
            }
        if (pr == SIZE_MAX) continue;
        if (pr != rr)
            for (std::size_t k = pos; k < ncols; ++k)
                std::swap(m[pr * ncols + k], m[rr * ncols + k]);
        std::uint64_t inv = fp.inv(m[rr * ncols + pos]);
        for (std::size_t r = rr + 1; r < nrows; ++r) {
            std::uint64_t a = m[r * ncols + pos];
            if (!a) continue;
            std::uint64_t fct = fp.mul(a, inv);
            for (std::size_t k = pos; k < ncols; ++k)
                m[r * ncols + k] =
                    fp.sub(m[r * ncols + k], fp.mul(fct, m[rr * ncols + k]));
        }
        out.pivot_pos.push_back(static_cast<int>(pos));
        pivot_row.push_back(rr);
        ++rr;
    }

    std::vector<char> is_pivot(ncols, 0);
    for (int p : out.pivot_pos) is_pivot[static_cast<std::size_t>(p)] = 1;
    for (std::size_t f = 0; f < ncols; ++f) {
        if (is_pivot[f] || !primary_pos[f]) continue;
        std::vector<std::uint64_t> val(ncols, 0);
        val[f] = 1;
        for (std::size_t k = out.pivot_pos.size(); k-- > 0;) {
            auto pos = static_cast<std::size_t>(out.pivot_pos[k]);
            std::size_t r = pivot_row[k];
            std::uint64_t s = 0;
            for (std::size_t q = pos + 1; q < ncols; ++q)
                if (val[q]) s = fp.add(s, fp.mul(m[r * ncols + q], val[q]));
            val[pos] = fp.neg(fp.mul(s, fp.inv(m[r * ncols + pos])));
        }
        out.vecs.push_back(std::move(val));
    }
    return out;
}

struct PrimeVecs {
    std::vector<int> free_cols;  // original column index per solution vector
    struct Entry {
        UPoly D;               // monic common denominator
        std::vector<UPoly> N;  // numerators, indexed by original column
    };
    std::vector<Entry> entries;
};

std::optional<PrimeVecs> reconstruct_prime(const LinearSystem& sys,
                                           const std::string& var, const Fp& fp,
                                           std::uint64_t seed) {
    const std::size_t ncols = sys.cols();

    // entries as univariate coefficient vectors mod p
    std::vector<std::vector<std::pair<int, UPoly>>> rows_up;
    try {
        for (auto& row : sys.rows) {
            std::vector<std::pair<int, UPoly>> r;
            for (auto& [c, p] : row) {
                long dv = p.degree(var);
                UPoly up(static_cast<std::size_t>(dv < 0 ? 0 : dv) + 1, 0);
                const auto& vars = p.vars();
                long vi = -1;
                for (std::size_t i = 0; i < vars.size(); ++i)
                    if (vars[i] == var) vi = static_cast<long>(i);
                for (auto& t : p.terms()) {
                    std::size_t e =
                        vi >= 0 ? t.exps[static_cast<std::size_t>(vi)] : 0;
                    up[e] = fp.add(up[e], fp.from_rational(t.coeff));
                }
                utrim(up);
                if (!up.empty()) r.emplace_back(c, std::move(up));
            }
            rows_up.push_back(std::move(r));
        }
    } catch (const Error&) {
        return std::nullopt;  // a coefficient denominator vanishes mod p
    }

    // column order: non-primary first, then primary; free non-primary
    // coordinates come out zero under this order
    std::vector<int> order;
    for (std::size_t c = 0; c < ncols; ++c)
        if (!sys.is_primary(static_cast<int>(c)))
            order.push_back(static_cast<int>(c));
    for (std::size_t c = 0; c < ncols; ++c)
        if (sys.is_primary(static_cast<int>(c)))
            order.push_back(static_cast<int>(c));
    std::vector<int> pos_of_col(ncols);
    std::vector<char> primary_pos(ncols, 0);
    for (std::size_t pos = 0; pos < ncols; ++pos) {
        pos_of_col[static_cast<std::size_t>(order[pos])] = static_cast<int>(pos);
        primary_pos[pos] = sys.is_primary(order[pos]) ? 1 : 0;
    }

    std::set<std::uint64_t> used;
    std::uint64_t ctr = 0;
    auto next_point = [&] {
        while (true) {
            std::uint64_t v =
                17 + hash_mix(seed ^ hash_mix(fp.p) ^ hash_mix(++ctr)) %
                         ((1u << 20) - 17);
            if (used.insert(v).second) return v;
        }
    };

    // reference pivot structure from a majority of probe points
    std::vector<std::uint64_t> xs;
    std::vector<PointImage> imgs;
    {
        std::map<std::vector<int>, int> freq;
        std::vector<std::pair<std::uint64_t, PointImage>> probes;
        for (int j = 0; j < 5; ++j) {
            std::uint64_t x = next_point();
            PointImage im =
                solve_point(rows_up, ncols, pos_of_col, primary_pos, x, fp);
            freq[im.pivot_pos]++;
            probes.emplace_back(x, std::move(im));
        }
        const std::vector<int>* ref = nullptr;
        int best = 0;
        for (auto& [k, n] : freq)
            if (n > best) {
                best = n;
                ref = &k;
            }
        for (auto& [x, im] : probes)
            if (im.pivot_pos == *ref) {
                xs.push_back(x);
                imgs.push_back(std::move(im));
            }
    }
    const std::vector<int> ref = imgs.front().pivot_pos;

    std::vector<char> is_pivot(ncols, 0);
    for (int p : ref) is_pivot[static_cast<std::size_t>(p)] = 1;
    std::vector<std::size_t> free_pos;
    for (std::size_t f = 0; f < ncols; ++f)
        if (!is_pivot[f] && primary_pos[f]) free_pos.push_back(f);
    if (free_pos.empty()) return std::nullopt;

    auto add_samples = [&](std::size_t target) {
        std::size_t guard = 0;
        while (xs.size() < target && guard < 4 * target + 64) {
            ++guard;
            std::uint64_t x = next_point();
            PointImage im =
                solve_point(rows_up, ncols, pos_of_col, primary_pos, x, fp);
            if (im.pivot_pos == ref) {
                xs.push_back(x);
                imgs.push_back(std::move(im));
            }
        }
        return xs.size() >= target;
    };

    PrimeVecs out;
    for (std::size_t f : free_pos)
        out.free_cols.push_back(order[f]);

    for (std::size_t N = 33; N <= 1100; N = 2 * N - 1) {
        if (!add_samples(N + 3)) return std::nullopt;
        std::vector<std::uint64_t> sx(xs.begin(),
                                      xs.begin() + static_cast<long>(N));
        UPoly M{1};
        for (std::uint64_t x : sx) {
            UPoly lin{fp.neg(x), 1};
            M = umul(M, lin, fp);
        }
        bool ok = true;
        std::vector<PrimeVecs::Entry> entries;
        for (std::size_t fi = 0; fi < free_pos.size() && ok; ++fi) {
            std::vector<UPoly> nums(ncols), dens(ncols);
            for (std::size_t pos = 0; pos < ncols; ++pos) {
                std::vector<std::uint64_t> ys(N);
                bool nz = false;
                for (std::size_t j = 0; j < N; ++j) {
                    ys[j] = imgs[j].vecs[fi][pos];
                    if (ys[j]) nz = true;
                }
                if (!nz) {
                    dens[pos] = {1};
                    continue;
                }
                UPoly fpoly = uinterp(sx, ys, fp);
                UPoly num, den;
                if (!ucauchy(M, fpoly, static_cast<long>(N - 1) / 2, fp, &num,
                             &den)) {
                    ok = false;
                    break;
                }
                // confirm on the spare sample points
                for (std::size_t j = N; j < N + 3 && ok; ++j) {
                    std::uint64_t dv = ueval(den, xs[j], fp);
                    if (!dv ||
                        fp.mul(dv, imgs[j].vecs[fi][pos]) !=
                            ueval(num, xs[j], fp))
                        ok = false;
                }
                if (!ok) break;
                nums[pos] = std::move(num);
                dens[pos] = std::move(den);
            }
            if (!ok) break;
            PrimeVecs::Entry ent;
            ent.N.assign(ncols, UPoly{});
            UPoly D{1};
            for (std::size_t pos = 0; pos < ncols; ++pos) {
                if (dens[pos].size() <= 1) continue;
                UPoly g = ugcd_mod(D, dens[pos], fp);
                UPoly rem;
                UPoly q = udivmod(dens[pos], g, fp, &rem);
                D = umul(D, q, fp);
            }
            for (std::size_t pos = 0; pos < ncols; ++pos) {
                if (nums[pos].empty()) continue;
                UPoly rem;
                UPoly q = udivmod(D, dens[pos], fp, &rem);
                ent.N[static_cast<std::size_t>(order[pos])] =
                    umul(nums[pos], q, fp);
            }
            ent.D = std::move(D);
            entries.push_back(std::move(ent));
        }
        if (ok) {
            out.entries = std::move(entries);
            return out;
        }
    }
    return std::nullopt;
}

// x = r1 mod M, x = r2 mod p, with gcd(M, p) = 1
void crt_combine(mpz_class& r, const mpz_class& M, std::uint64_t r2,
                 std::uint64_t p) {
    mpz_class mp(static_cast<unsigned long>(p));
    mpz_class minv;
    mpz_invert(minv.get_mpz_t(), M.get_mpz_t(), mp.get_mpz_t());
    mpz_class k = ((mpz_class(static_cast<unsigned long>(r2)) - r) * minv) % mp;
    if (k < 0) k += mp;
    r += M * k;
}

bool rational_reconstruct(const mpz_class& r, const mpz_class& M, Rational* out) {
    mpz_class half = M / 2, bound;
    mpz_sqrt(bound.get_mpz_t(), half.get_mpz_t());
    mpz_class r0 = M, r1 = r % M;
    if (r1 < 0) r1 += M;
    mpz_class t0 = 0, t1 = 1;
    while (r1 > bound) {
        mpz_class q = r0 / r1;
        mpz_class r2 = r0 - q * r1;
        r0 = r1;
        r1 = r2;
        mpz_class t2 = t0 - q * t1;
        t0 = t1;
        t1 = t2;
    }
    if (t1 == 0) return false;
    if (t1 < 0) {
        t1 = -t1;
        r1 = -r1;
    }
    if (t1 > bound) return false;
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), r1.get_mpz_t(), t1.get_mpz_t());
    if (g != 1 && r1 != 0) return false;
    Rational q(r1, t1);
    q.canonicalize();
    *out = q;
    return true;
}

MultiPoly coeffs_to_poly(const std::vector<Rational>& coeffs,
                         const std::string& var) {
    MultiPoly p;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        if (coeffs[k] == 0) continue;
        if (k == 0)
            p += MultiPoly(coeffs[k]);
        else
            p += MultiPoly::var(var, static_cast<unsigned>(k)) * coeffs[k];
    }
    return p;
}

}  // namespace

std::optional<std::vector<std::vector<RatFunc>>> reconstruct_nullspace(
    const LinearSystem& sys, const std::string& var, std::uint64_t seed) {
    const auto& primes = modular_primes();
    mpz_class modulus = 1;
    bool have = false;
    std::vector<int> free_cols;
    struct Acc {
        std::vector<mpz_class> D;
        std::vector<std::vector<mpz_class>> N;
    };
    std::vector<Acc> acc;

    auto structure_matches = [&](const PrimeVecs& pv) {
        if (pv.free_cols != free_cols) return false;
        for (std::size_t e = 0; e < pv.entries.size(); ++e) {
            if (pv.entries[e].D.size() != acc[e].D.size()) return false;
            for (std::size_t c = 0; c < pv.entries[e].N.size(); ++c)
                if (pv.entries[e].N[c].size() != acc[e].N[c].size())
                    return false;
        }
        return true;
    };

    for (std::uint64_t p : primes) {
        Fp fp{p};
        auto pv = reconstruct_prime(sys, var, fp, seed);
        if (!pv || pv->entries.empty()) continue;
        if (!have) {
            free_cols = pv->free_cols;
            acc.clear();
            for (auto& ent : pv->entries) {
                Acc a;
                for (auto c : ent.D) a.D.emplace_back(static_cast<unsigned long>(c));
                for (auto& n : ent.N) {
                    std::vector<mpz_class> nc;
                    for (auto c : n) nc.emplace_back(static_cast<unsigned long>(c));
                    a.N.push_back(std::move(nc));
                }
                acc.push_back(std::move(a));
            }
            modulus = static_cast<unsigned long>(p);
            have = true;
        } else {
            if (!structure_matches(*pv)) continue;  // unlucky prime
            for (std::size_t e = 0; e < acc.size(); ++e) {
                for (std::size_t k = 0; k < acc[e].D.size(); ++k)
                    crt_combine(acc[e].D[k], modulus, pv->entries[e].D[k], p);
                for (std::size_t c = 0; c < acc[e].N.size(); ++c)
                    for (std::size_t k = 0; k < acc[e].N[c].size(); ++k)
                        crt_combine(acc[e].N[c][k], modulus,
                                    pv->entries[e].N[c][k], p);
            }
            modulus *= static_cast<unsigned long>(p);
        }

        // try to lift to Q and verify against the exact system
        bool lifted = true;
        std::vector<std::vector<RatFunc>> vecs;
        std::vector<std::vector<MultiPoly>> numerators;
        for (auto& a : acc) {
            if (!lifted) break;
            std::vector<Rational> dc(a.D.size());
            for (std::size_t k = 0; k < a.D.size() && lifted; ++k)
                lifted = rational_reconstruct(a.D[k], modulus, &dc[k]);
            if (!lifted) break;
            MultiPoly D = coeffs_to_poly(dc, var);
            std::vector<MultiPoly> nums(sys.cols());
            for (std::size_t c = 0; c < a.N.size() && lifted; ++c) {
                std::vector<Rational> nc(a.N[c].size());
                for (std::size_t k = 0; k < a.N[c].size() && lifted; ++k)
                    lifted = rational_reconstruct(a.N[c][k], modulus, &nc[k]);
                if (lifted) nums[c] = coeffs_to_poly(nc, var);
            }
            if (!lifted) break;
            std::vector<RatFunc> v(sys.cols());
            for (std::size_t c = 0; c < sys.cols(); ++c)
                if (!nums[c].is_zero()) v[c] = RatFunc(nums[c], D);
            vecs.push_back(std::move(v));
            numerators.push_back(std::move(nums));
        }
        if (!lifted) continue;

        // exact residual check (the common denominator cancels per vector)
        bool verified = true;
        for (auto& nums : numerators) {
            for (auto& row : sys.rows) {
                MultiPoly s;
                for (auto& [c, poly] : row)
                    if (!nums[static_cast<std::size_t>(c)].is_zero())
                        s += poly * nums[static_cast<std::size_t>(c)];
                if (!s.is_zero()) {
                    verified = false;
                    break;
                }
            }
            if (!verified) break;
        }
        if (!verified) continue;

        // normalize like the exact solver: primary part primitive with
        // positive leading first nonzero entry, scale applied to the whole
        // vector
        std::vector<int> primary_cols;
        for (std::size_t c = 0; c < sys.cols(); ++c)
            if (sys.is_primary(static_cast<int>(c)))
                primary_cols.push_back(static_cast<int>(c));
        for (auto& v : vecs) {
            std::vector<RatFunc> pv_part;
            for (int c : primary_cols)
                pv_part.push_back(v[static_cast<std::size_t>(c)]);
            std::vector<RatFunc> norm = pv_part;
            normalize_vector(norm);
            RatFunc scale;
            for (std::size_t i = 0; i < pv_part.size(); ++i)
                if (!pv_part[i].is_zero()) {
                    scale = norm[i] / pv_part[i];
                    break;
                }
            if (scale.is_zero()) continue;  // all-zero primary part
            for (auto& f : v)
                if (!f.is_zero()) f = f * scale;
        }
        return vecs;
    }
    return std::nullopt;
}

// ---- exact solving -------------------------------------------------------

std::vector<std::vector<RatFunc>> nullspace(const LinearSystem& sys) {
    ExactElim elim(sys);
    elim.run([](int) { return true; });
    std::vector<char> pivoted(sys.cols(), 0);
    for (auto& p : elim.pivots) pivoted[static_cast<std::size_t>(p.col)] = 1;
    std::vector<std::vector<RatFunc>> basis;
    for (std::size_t free_col = 0; free_col < sys.cols(); ++free_col) {
        if (pivoted[free_col]) continue;
        std::vector<RatFunc> v(sys.cols());
        v[free_col] = RatFunc(Rational(1));
        elim.back_substitute(v);
        normalize_vector(v);
        basis.push_back(std::move(v));
    }
    return basis;
}

ProjectedSolver::ProjectedSolver(const LinearSystem& sys) : sys_(&sys) {
    for (std::size_t c = 0; c < sys.cols(); ++c)
        if (sys.is_primary(static_cast<int>(c)))
            primary_cols_.push_back(static_cast<int>(c));

    ExactElim elim(sys);
    elim.run([&](int c) { return !sys.is_primary(c); });
    for (auto& p : elim.pivots) pivots_.push_back({p.col, p.row});

    // residual system lives on the primary columns only
    std::map<int, int> compact;
    for (std::size_t i = 0; i < primary_cols_.size(); ++i)
        compact[primary_cols_[i]] = static_cast<int>(i);
    LinearSystem residual;
    for (int c : primary_cols_)
        residual.unknowns.push_back(sys.unknowns[static_cast<std::size_t>(c)]);
    for (auto& row : elim.active_rows()) {
        LinearSystem::Row r;
        for (auto& [c, p] : row) r.emplace_back(compact.at(c), p);
        residual.rows.push_back(std::move(r));
    }
    primary_basis_ = nullspace(residual);
}

std::vector<RatFunc> ProjectedSolver::lift(
    const std::vector<RatFunc>& primary_values) const {
    std::vector<RatFunc> values(sys_->cols());
    for (std::size_t i = 0; i < primary_cols_.size(); ++i)
        values[static_cast<std::size_t>(primary_cols_[i])] = primary_values[i];
    for (auto it = pivots_.rbegin(); it != pivots_.rend(); ++it) {
        RatFunc s;
        const MultiPoly* piv = nullptr;
        for (auto& [c, p] : it->row) {
            if (c == it->col)
                piv = &p;
            else if (!values[static_cast<std::size_t>(c)].is_zero())
                s += RatFunc(p) * values[static_cast<std::size_t>(c)];
        }
        values[static_cast<std::size_t>(it->col)] = -s / RatFunc(*piv);
    }
    return values;
}

}  // namespace hyperaz
