// rk4.hpp: classical fixed-step Runge-Kutta for linear systems y' = A y.

#pragma once

#include <Eigen/Core>

namespace crq::detail {

/// `Generator` is callable as gen(const VectorXcd& in, VectorXcd& out) and
/// writes out = A * in. Stage buffers are reused between steps.
class LinearRk4 {
public:
    explicit LinearRk4(Eigen::Index dim)
        : k1_(dim), k2_(dim), k3_(dim), k4_(dim), tmp_(dim) {}

    template <class Generator>
    void step(Eigen::VectorXcd& y, double dt, Generator&& gen)
    {
        gen(y, k1_);
        tmp_ = y + (0.5 * dt) * k1_;
        gen(tmp_, k2_);
        tmp_ = y + (0.5 * dt) * k2_;
        gen(tmp_, k3_);
        tmp_ = y + dt * k3_;
        gen(tmp_, k4_);
        y += (dt / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
    }

private:
    Eigen::VectorXcd k1_, k2_, k3_, k4_, tmp_;
};

} // namespace crq::detail
