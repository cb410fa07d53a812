#pragma once

#include <complex>

namespace eszm {

// Forward-mode value/derivative pair used to get closed-form u-derivatives of
// the Boltzmann weights and K-matrix entries.
struct Dual {
    std::complex<double> v{0.0, 0.0};
    std::complex<double> d{0.0, 0.0};

    Dual() = default;
    Dual(std::complex<double> value) : v(value) {}
    Dual(double value) : v(value) {}
    Dual(std::complex<double> value, std::complex<double> deriv) : v(value), d(deriv) {}
};

inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
inline Dual operator-(Dual a) { return {-a.v, -a.d}; }
inline Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
inline Dual operator/(Dual a, Dual b) { return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)}; }

inline std::complex<double> value_of(const std::complex<double>& z) { return z; }
inline std::complex<double> value_of(const Dual& z) { return z.v; }

}  // namespace eszm
