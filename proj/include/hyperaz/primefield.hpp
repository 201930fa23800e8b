#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <vector>

#include "hyperaz/errors.hpp"

namespace hyperaz {

// Arithmetic in Z/p for a word-sized prime p.
struct Fp {
    std::uint64_t p;

    std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
        std::uint64_t s = a + b;
        return s >= p || s < a ? s - p : s;
    }
    std::uint64_t sub(std::uint64_t a, std::uint64_t b) const {
        return a >= b ? a - b : a + p - b;
    }
    std::uint64_t neg(std::uint64_t a) const { return a ? p - a : 0; }
    std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
        return static_cast<std::uint64_t>(
            static_cast<unsigned __int128>(a) * b % p);
    }
    std::uint64_t pow(std::uint64_t a, std::uint64_t e) const {
        std::uint64_t r = 1 % p;
        a %= p;
        while (e) {
            if (e & 1) r = mul(r, a);
            a = mul(a, a);
            e >>= 1;
        }
        return r;
    }
    // Throws BadEvaluationPoint for a ≡ 0.
    std::uint64_t inv(std::uint64_t a) const {
        a %= p;
        if (a == 0)
            raise(ErrorCode::BadEvaluationPoint, "division by zero mod p");
        return pow(a, p - 2);
    }
    std::uint64_t from_int(const mpz_class& z) const {
        mpz_class r = z % static_cast<unsigned long>(p);
        if (r < 0) r += static_cast<unsigned long>(p);
        return r.get_ui();
    }
    std::uint64_t from_rational(const mpq_class& q) const {
        std::uint64_t den = from_int(q.get_den());
        return mul(from_int(q.get_num()), inv(den));
    }
};

// Deterministic word-sized primes used for homomorphic images.
const std::vector<std::uint64_t>& modular_primes();

// splitmix64; used to derive reproducible evaluation points.
std::uint64_t hash_mix(std::uint64_t x);

}  // namespace hyperaz
