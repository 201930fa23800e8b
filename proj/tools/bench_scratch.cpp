#include <chrono>
#include <iostream>

#include "hyperaz/telescope.hpp"

using namespace hyperaz;

static MultiPoly X(const std::string& v) { return MultiPoly::var(v); }
static MultiPoly C(long c) { return MultiPoly(c); }

int main(int argc, char** argv) {
    std::string which = argc > 1 ? argv[1] : "dim4";
    auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             t0)
            .count();
    };

    HyperTerm f;
    AnsatzConfig cfg;
    if (which == "dim4") {
        f.mode = Mode::kContinuous;
        f.param = "x";
        f.a = -(X("x") * (X("w1") * X("w2") + X("w3") * X("w4")));
        f.intvars = {{"w1", Bound::finite(-1), Bound::finite(1)},
                     {"w2", Bound::finite(-1), Bound::finite(1)},
                     {"w3", Bound::finite(-1), Bound::finite(1)},
                     {"w4", Bound::finite(-1), Bound::finite(1)}};
        cfg.ansatz = Ansatz::kBoundaryVanishing;
    } else {
        // 1/sqrt((1-hu)(z-1)(1+(u-1)z)(h(u-1)(z-1)+z-uz-1))
        MultiPoly h = X("h"), u = X("u"), z = X("z");
        MultiPoly f1 = C(1) - h * u;
        MultiPoly f2 = z - C(1);
        MultiPoly f3 = C(1) + (u - C(1)) * z;
        MultiPoly f4 = h * (u - C(1)) * (z - C(1)) + z - u * z - C(1);
        f.mode = Mode::kContinuous;
        f.param = "h";
        Exponent mh{Rational(-1, 2), 0, 0};
        f.powers = {{f1, mh}, {f2, mh}, {f3, mh}, {f4, mh}};
        f.intvars = {{"u", Bound::finite(0), Bound::finite(1)},
                     {"z", Bound::finite(0), Bound::finite(1)}};
        cfg.add_factors = {
            (C(1) - u).pow(3) * (C(1) - z).pow(6),
            (C(1) - z).pow(3),
        };
    }
    f = validate(f);
    cfg.L_max = argc > 2 ? std::atol(argv[2]) : 8;
    cfg.degree_max = argc > 3 ? std::atol(argv[3]) : 12;
    auto out = find_telescoper(f, cfg);
    std::cout << "search time " << elapsed() << "s tried " << out.stats.tried
              << " prechecks passed " << out.stats.precheck_pass << "\n";
    if (out.annihilator) {
        std::cout << "L=" << out.annihilator->L << "\n";
        for (auto& e : out.annihilator->e) std::cout << e.str() << "\n";
        for (auto& R : out.annihilator->certificate)
            std::cout << "cert num terms " << R.num().term_count() << " deg "
                      << R.num().total_degree() << " | den terms "
                      << R.den().term_count() << " deg "
                      << R.den().total_degree() << "\n";
        std::cout << "verify start t=" << elapsed() << "\n";
        std::cout << "verified: " << verify_certificate(f, *out.annihilator)
                  << " t=" << elapsed() << "\n";
    }
    std::cout << "total " << elapsed() << "s\n";
    return 0;
}
