#include "wppsc/netbase.hpp"

#include "wppsc/errors.hpp"

namespace wppsc {

Impedance impedance_from_scr_xr(const GridCase& grid_case) {
    if (!(grid_case.scr > 0.0) || !std::isfinite(grid_case.scr)) {
        throw DomainError("impedance_from_scr_xr: scr must be positive and finite");
    }
    if (!(grid_case.x_r >= 0.0) || !std::isfinite(grid_case.x_r)) {
        throw DomainError("impedance_from_scr_xr: x_r must be non-negative and finite");
    }
    const double z = 1.0 / grid_case.scr;
    const double r = z / std::sqrt(1.0 + grid_case.x_r * grid_case.x_r);
    return {r, grid_case.x_r * r};
}

double parallel_magnitude(double z1, double z2) {
    if (!(z1 > 0.0) || !(z2 > 0.0)) {
        throw DomainError("parallel_magnitude: impedances must be positive");
    }
    // 1/(1/z1 + 1/z2) avoids overflow of z1*z2 for the open-circuit limit.
    return 1.0 / (1.0 / z1 + 1.0 / z2);
}

Impedance parallel_complex(const Impedance& z1, const Impedance& z2) {
    const ComplexPair a = z1.complex();
    const ComplexPair b = z2.complex();
    if (std::abs(a) == 0.0 || std::abs(b) == 0.0) {
        throw DomainError("parallel_complex: zero-magnitude branch");
    }
    const ComplexPair sum = a + b;
    if (std::abs(sum) <= 1e-15 * (std::abs(a) + std::abs(b))) {
        throw SingularCombination("parallel_complex: z1 + z2 vanishes (resonant pair)");
    }
    return Impedance::from_complex(a * b / sum);
}

}  // namespace wppsc
