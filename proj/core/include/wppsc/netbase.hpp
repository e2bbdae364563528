#pragma once

#include <cmath>
#include <complex>
#include <numbers>

namespace wppsc {

/// (d, q) or (re, im) pair in per unit.
using ComplexPair = std::complex<double>;

inline constexpr double kNominalFrequencyHz = 50.0;
inline constexpr double kNominalOmega = 2.0 * std::numbers::pi * kNominalFrequencyHz;

struct Impedance {
    double r = 0.0;
    double x = 0.0;

    ComplexPair complex() const { return {r, x}; }
    double magnitude() const { return std::hypot(r, x); }
    /// X/R; infinite for a purely reactive branch.
    double x_over_r() const { return x / r; }

    static Impedance from_complex(ComplexPair z) { return {z.real(), z.imag()}; }
};

inline Impedance operator+(Impedance a, Impedance b) { return {a.r + b.r, a.x + b.x}; }
inline Impedance operator-(Impedance a, Impedance b) { return {a.r - b.r, a.x - b.x}; }

/// Grid strength at the turbine MV terminal.
struct GridCase {
    double scr = 1.0;
    double x_r = 0.0;
};

/// |Z| = 1/SCR with angle atan(X/R).
Impedance impedance_from_scr_xr(const GridCase& grid_case);

/// z1*z2/(z1+z2) on magnitudes.
double parallel_magnitude(double z1, double z2);

/// Complex z1*z2/(z1+z2).
Impedance parallel_complex(const Impedance& z1, const Impedance& z2);

}  // namespace wppsc
