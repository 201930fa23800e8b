#include "hyperaz/primefield.hpp"

namespace hyperaz {

namespace {

bool miller_rabin(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull,
                            19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n == q) return true;
        if (n % q == 0) return false;
    }
    Fp f{n};
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // deterministic witness set for 64-bit integers
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull,
                            19ull, 23ull, 29ull, 31ull, 37ull}) {
        std::uint64_t x = f.pow(a, d);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = f.mul(x, x);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

}  // namespace

const std::vector<std::uint64_t>& modular_primes() {
    static const std::vector<std::uint64_t> primes = [] {
        std::vector<std::uint64_t> ps;
        // first few primes below 2^61
        std::uint64_t c = (1ull << 61) - 1;
        while (ps.size() < 8) {
            if (miller_rabin(c)) ps.push_back(c);
            c -= 2;
        }
        return ps;
    }();
    return primes;
}

std::uint64_t hash_mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

}  // namespace hyperaz
