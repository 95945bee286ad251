#pragma once

#include <memory>

#include "jost.hpp"

namespace gpist {

/// Scattering data at time t, kept as (base, t); nothing is copied until
/// materialize() is called.
class EvolvedData {
public:
    EvolvedData(std::shared_ptr<const ScatteringData> base, double t) : base_(std::move(base)), t_(t) {
        if (!base_) throw Error("evolution", "InvalidArgument", "missing base data");
    }

    const ScatteringData& base() const { return *base_; }
    double t() const { return t_; }

    cplx a(int branch, std::size_t i) const { return base_->a[branch][i]; }

    cplx b(int branch, std::size_t i) const {
        const SheetPoint pt = base_->point(branch, i);
        return base_->b[branch][i] * std::exp(-4.0 * kI * pt.lambda * pt.zeta * t_);
    }

    cplx c(int branch, std::size_t i) const { return b(branch, i) / a(branch, i); }

    cplx b0() const { return base_->b0 * growth(); }

    double mu0() const { return base_->mu0 * growth(); }

    /// exp(-4 i lambda0 zeta0 t) with zeta0 = i nu0
    double growth() const { return std::exp(4.0 * base_->lambda0 * base_->nu0 * t_); }

    /// Copy with b, b0 and mu0 replaced by their values at t; usable as a new base.
    ScatteringData materialize() const {
        ScatteringData sd = *base_;
        for (int br = 0; br < 2; ++br)
            for (std::size_t i = 0; i < sd.grid.size(); ++i) sd.b[br][i] = b(br, i);
        sd.b0 = b0();
        sd.mu0 = mu0();
        return sd;
    }

private:
    std::shared_ptr<const ScatteringData> base_;
    double t_;
};

inline EvolvedData evolve(std::shared_ptr<const ScatteringData> data, double t) {
    if (!data->has_discrete) throw Error("evolution", "InvalidArgument", "discrete data missing");
    return EvolvedData(std::move(data), t);
}

inline EvolvedData evolve(const ScatteringData& data, double t) {
    return evolve(std::make_shared<const ScatteringData>(data), t);
}

}  // namespace gpist
