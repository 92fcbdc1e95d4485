#pragma once

#include "cmipdual/model.hpp"

#include <cstdint>
#include <vector>

namespace cmipdual {

/// min x2 over integer x with (x1, x2, x1 + eps) in L^3 (scalar last).
/// eps = 0 gives a problem whose continuous dual is infeasible although the
/// primal value 0 is attained.
Instance lorentz_example(double eps = 0.0);

/// Improving points of lorentz_example(eps): x2 = -k and
/// x1 = ceil((x2^2 - eps^2) / (2 eps)), for k = 0..kmax.
struct LorentzWitness {
    int k;
    std::int64_t x1;
    std::int64_t x2;
    double objective;
    double margin;  // cone margin of A x - b
};
std::vector<LorentzWitness> lorentz_witness_table(double eps, int kmax);

/// min x2 over integer x with
///     [[x2 + 1, 0, 0], [0, x1, x2], [0, x2, 0]]  PSD.
Instance psd_example();

/// min -x over integer x with -2x >= -3 (one orthant row).
Instance halving_example();

}  // namespace cmipdual
