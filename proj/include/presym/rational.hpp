#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <random>
#include <string>

namespace presym {

using Int = boost::multiprecision::cpp_int;
// Canonical form is maintained by the backend: gcd(|num|, den) = 1, den > 0,
// zero stored as 0/1.
using Rational = boost::multiprecision::cpp_rational;

inline Int rat_num(const Rational& r) { return numerator(r); }
inline Int rat_den(const Rational& r) { return denominator(r); }

inline std::string rat_to_string(const Rational& r) {
    if (rat_den(r) == 1) return rat_num(r).str();
    return rat_num(r).str() + "/" + rat_den(r).str();
}

// Deterministic small rationals for sampling and property tests.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // integer in [lo, hi]
    long long integer(long long lo, long long hi) {
        std::uniform_int_distribution<long long> d(lo, hi);
        return d(gen_);
    }

    Rational rational(long long max_num = 9, long long max_den = 4) {
        long long n = integer(-max_num, max_num);
        long long d = integer(1, max_den);
        return Rational(n, d);
    }

    Rational nonzero_rational(long long max_num = 9, long long max_den = 4) {
        for (;;) {
            Rational r = rational(max_num, max_den);
            if (r != 0) return r;
        }
    }

    std::uint64_t raw() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

}  // namespace presym
