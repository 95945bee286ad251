#pragma once

#include <gpist/harness.hpp>

namespace gpist::fixtures {

// Exact scattering data of U0 on a spectral grid: a = a0, b = 0 and the
// discrete data lambda0 = 0, b0 = i, mu0 = -2.
inline std::shared_ptr<const ScatteringData> soliton_data(const SpectralGrid& sg) {
    auto sd = std::make_shared<ScatteringData>();
    sd->grid = sg;
    for (int br = 0; br < 2; ++br) {
        sd->a[br].resize(sg.size());
        sd->b[br].assign(sg.size(), 0.0);
        for (std::size_t i = 0; i < sg.size(); ++i) sd->a[br][i] = unperturbed_a(sd->point(br, i));
    }
    sd->has_discrete = true;
    sd->lambda0 = 0.0;
    sd->nu0 = kHalfSqrt2;
    sd->b0 = kI;
    sd->a_prime0 = -kI * kHalfSqrt2;
    sd->a_prime0_integral = sd->a_prime0;
    sd->mu0 = -2.0;
    return sd;
}

inline std::shared_ptr<const ScatteringData> soliton_data() { return soliton_data(make_spectral_grid()); }

}  // namespace gpist::fixtures
