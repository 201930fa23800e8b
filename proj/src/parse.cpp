#include "hyperaz/parse.hpp"

#include <cctype>
#include <utility>

namespace hyperaz {

namespace {

// Partially decomposed hyperexponential value built up during parsing:
// rat * exp(ea/eb) * prod S^alpha.  Parameter-dependent (s/t)^n factors stay
// in `powers` as integer-c_n exponents; validate() folds them out at the end.
struct Value {
    RatFunc rat{Rational(1)};
    MultiPoly ea;
    MultiPoly eb{Rational(1)};
    std::vector<std::pair<MultiPoly, Exponent>> powers;

    bool pure_rational() const { return ea.is_zero() && powers.empty(); }
};

struct Parser {
    const std::string& text;
    std::size_t pos = 0;
    Mode mode;
    std::string param;

    [[noreturn]] void fail(const std::string& msg) const {
        raise(ErrorCode::ParseError,
              msg + " at position " + std::to_string(pos));
    }

    void skip_ws() {
        while (pos < text.size() && std::isspace(
                                        static_cast<unsigned char>(text[pos])))
            ++pos;
    }
    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }
    bool eat(char c) {
        if (peek() != c) return false;
        ++pos;
        return true;
    }
    void expect(char c) {
        if (!eat(c)) fail(std::string("expected '") + c + "'");
    }

    Rational number() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() &&
               std::isdigit(static_cast<unsigned char>(text[pos])))
            ++pos;
        if (pos == start) fail("expected a number");
        return rational_from_string(text.substr(start, pos - start));
    }

    std::string ident() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) ||
                text[pos] == '_'))
            ++pos;
        return text.substr(start, pos - start);
    }

    bool at_ident() {
        char c = peek();
        return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
    }

    // ---- rational/hyperexponential value arithmetic -------------------------

    Value v_mul(Value a, const Value& b) const {
        a.rat *= b.rat;
        if (!b.ea.is_zero()) {
            a.ea = a.ea * b.eb + b.ea * a.eb;
            a.eb = a.eb * b.eb;
        }
        a.powers.insert(a.powers.end(), b.powers.begin(), b.powers.end());
        return a;
    }

    Value v_inv(Value a) const {
        if (a.rat.is_zero()) fail("division by zero");
        a.rat = a.rat.inverse();
        a.ea = -a.ea;
        for (auto& [S, alpha] : a.powers) alpha = alpha * -1;
        return a;
    }

    Value v_add(Value a, const Value& b, bool sub) const {
        if (!a.pure_rational() || !b.pure_rational())
            raise(ErrorCode::NonHyperexponential,
                  "sums are only supported between rational subexpressions");
        a.rat = sub ? a.rat - b.rat : a.rat + b.rat;
        return a;
    }

    Value v_ipow(Value a, long k) const {
        if (k == 0) return Value{};
        if (k < 0) {
            a = v_inv(std::move(a));
            k = -k;
        }
        a.rat = a.rat.pow(k);
        a.ea = a.ea * Rational(k);
        for (auto& [S, alpha] : a.powers) alpha = alpha * k;
        return a;
    }

    Value v_pow(Value a, const Exponent& e) const {
        if (e.c_eps == 0 && e.c_n == 0 && e.c0.get_den() == 1 &&
            e.c0.get_num().fits_slong_p())
            return v_ipow(std::move(a), e.c0.get_num().get_si());
        if (!a.pure_rational())
            raise(ErrorCode::NonHyperexponential,
                  "non-integer exponents require a rational base");
        Value out;
        if (!a.rat.num().is_one()) out.powers.emplace_back(a.rat.num(), e);
        if (!a.rat.den().is_one())
            out.powers.emplace_back(a.rat.den(), e * -1);
        return out;
    }

    // Exponent of a '^': signed number, bare ident, or parenthesized
    // expression that is affine in ep (and, in discrete mode, the parameter).
    Exponent exponent() {
        skip_ws();
        Value v;
        if (peek() == '(') {
            expect('(');
            v = expr();
            expect(')');
        } else if (at_ident()) {
            v = base_ident();
        } else {
            bool neg = eat('-');
            Rational r = number();
            if (neg) r = -r;
            return Exponent{r, 0, 0};
        }
        if (!v.pure_rational() || !v.rat.is_polynomial())
            raise(ErrorCode::NonHyperexponential,
                  "exponent must be affine in ep and the parameter");
        Exponent e;
        MultiPoly p = v.rat.num();
        for (const auto& t : p.terms()) {
            int which = -1;  // -1 constant, 0 ep, 1 param
            for (std::size_t i = 0; i < p.vars().size(); ++i) {
                if (t.exps[i] == 0) continue;
                if (t.exps[i] > 1 || which != -1)
                    raise(ErrorCode::NonHyperexponential,
                          "exponent must be affine in ep and the parameter");
                if (p.vars()[i] == "ep")
                    which = 0;
                else if (p.vars()[i] == param)
                    which = 1;
                else
                    raise(ErrorCode::NonHyperexponential,
                          "exponent depends on " + p.vars()[i]);
            }
            if (which == -1)
                e.c0 += t.coeff;
            else if (which == 0)
                e.c_eps += t.coeff;
            else
                e.c_n += t.coeff;
        }
        if (e.c_n != 0 && mode == Mode::kContinuous)
            raise(ErrorCode::NonHyperexponential,
                  "exponent depends on the continuous parameter " + param);
        return e;
    }

    Rational nonzero_number() {
        Rational d = number();
        if (d == 0) fail("division by zero");
        return d;
    }

    Value base_ident() {
        std::size_t at = pos;
        std::string name = ident();
        if (name == "exp") {
            expect('(');
            Value arg = expr();
            expect(')');
            if (!arg.pure_rational())
                raise(ErrorCode::NonHyperexponential,
                      "the argument of exp must be rational");
            Value out;
            out.ea = arg.rat.num();
            out.eb = arg.rat.den();
            return out;
        }
        for (const char* fn : {"log", "sqrt", "sin", "cos", "tan", "psi",
                               "gamma"})
            if (name == fn)
                raise(ErrorCode::NonHyperexponential,
                      name + " is not a hyperexponential building block");
        if (peek() == '(') {
            pos = at;
            fail("unknown function '" + name + "'");
        }
        Value v;
        v.rat = RatFunc(MultiPoly::var(name));
        return v;
    }

    Value base() {
        char c = peek();
        if (c == '(') {
            expect('(');
            Value v = expr();
            expect(')');
            return v;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            Value v;
            v.rat = RatFunc(Rational(number()));
            return v;
        }
        if (at_ident()) return base_ident();
        fail("expected a number, name, or '('");
    }

    Value factor() {
        Value v = base();
        if (eat('^')) v = v_pow(std::move(v), exponent());
        return v;
    }

    Value term() {
        Value v = factor();
        for (;;) {
            if (eat('*'))
                v = v_mul(std::move(v), factor());
            else if (eat('/'))
                v = v_mul(std::move(v), v_inv(factor()));
            else
                return v;
        }
    }

    Value expr() {
        bool neg = eat('-');
        Value v = term();
        if (neg) v.rat = -v.rat;
        for (;;) {
            if (eat('+'))
                v = v_add(std::move(v), term(), false);
            else if (eat('-'))
                v = v_add(std::move(v), term(), true);
            else
                return v;
        }
    }

    void expect_end() {
        skip_ws();
        if (pos != text.size()) fail("unexpected trailing input");
    }
};

}  // namespace

HyperTerm parse_integrand(const std::string& text, Mode mode,
                          const std::string& param,
                          std::vector<IntVar> intvars) {
    Parser p{text, 0, mode, param};
    Value v = p.expr();
    p.expect_end();

    HyperTerm f;
    f.mode = mode;
    f.param = param;
    f.intvars = std::move(intvars);
    f.P = v.rat.num();
    f.a = std::move(v.ea);
    f.b = std::move(v.eb);
    f.powers = std::move(v.powers);
    if (!v.rat.den().is_one())
        f.powers.emplace_back(v.rat.den(), Exponent{-1, 0, 0});
    if (f.intvars.empty()) {
        // 0-dimensional closed forms (inputs to expand_closed_form) are
        // rejected by validate(); normalize them with a placeholder variable.
        f.intvars.push_back({"_closed", Bound::finite(0), Bound::finite(1)});
        f = validate(std::move(f));
        f.intvars.clear();
        return f;
    }
    return validate(std::move(f));
}

MultiPoly parse_polynomial(const std::string& text) {
    Parser p{text, 0, Mode::kContinuous, ""};
    Value v = p.expr();
    p.expect_end();
    if (!v.pure_rational() || !v.rat.is_polynomial())
        raise(ErrorCode::ParseError, "expected a polynomial: " + text);
    return v.rat.num();
}

std::string operator_str(const Annihilator& ann) {
    const std::string op = ann.mode == Mode::kDiscrete
                               ? std::string("N")
                               : "D_" + ann.param;
    auto wrap = [](const MultiPoly& p) {
        std::string s = p.str();
        bool atomic = p.term_count() == 1 && p.leading_coeff() > 0;
        return atomic ? s : "(" + s + ")";
    };
    std::string out;
    for (long i = 0; i <= ann.L; ++i) {
        const MultiPoly& e = ann.e[static_cast<std::size_t>(i)];
        if (e.is_zero()) continue;
        MultiPoly c = e;
        bool negated = e.leading_coeff() < 0;
        if (negated) c = -c;
        if (out.empty()) {
            if (negated) out += "-";
        } else {
            out += negated ? " - " : " + ";
        }
        if (i == 0) {
            out += wrap(c);
        } else {
            if (!c.is_one()) out += wrap(c) + "*";
            out += op;
            if (i > 1) out += "^" + std::to_string(i);
        }
    }
    if (out.empty()) out = "0";
    return out;
}

}  // namespace hyperaz
