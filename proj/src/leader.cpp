#include "vtolsim/leader.hpp"

#include <algorithm>
#include <cmath>

namespace vtolsim {

namespace {
constexpr int kSampleCount = 10000;
constexpr double kSampleInflation = 1.05;
}  // namespace

LeaderTrajectory LeaderTrajectory::helix(double radius, double angularRate, double climbRate) {
    LeaderTrajectory t;
    t.kind_ = Kind::Helix;
    t.radius_ = radius;
    t.omega_ = angularRate;
    t.climb_ = climbRate;
    return t;
}

LeaderTrajectory LeaderTrajectory::point(const Vec3& position) {
    LeaderTrajectory t;
    t.kind_ = Kind::Point;
    t.p0_ = position;
    return t;
}

LeaderTrajectory LeaderTrajectory::constantVelocity(const Vec3& position, const Vec3& velocity) {
    LeaderTrajectory t;
    t.kind_ = Kind::ConstantVelocity;
    t.p0_ = position;
    t.v0_ = velocity;
    return t;
}

LeaderTrajectory LeaderTrajectory::polynomial(const std::vector<double>& cx,
                                              const std::vector<double>& cy,
                                              const std::vector<double>& cz) {
    LeaderTrajectory t;
    t.kind_ = Kind::Polynomial;
    t.coeffs_[0] = cx;
    t.coeffs_[1] = cy;
    t.coeffs_[2] = cz;
    return t;
}

namespace {

/// Value of the d-th derivative of sum c_i t^i.
double polyDerivative(const std::vector<double>& c, int d, double t) {
    double acc = 0.0;
    for (std::size_t i = c.size(); i-- > static_cast<std::size_t>(d);) {
        double f = 1.0;
        for (int k = 0; k < d; ++k) f *= static_cast<double>(i - k);
        acc = acc * t + c[i] * f;
    }
    return acc;
}

}  // namespace

LeaderEval LeaderTrajectory::evaluate(double t) const {
    LeaderEval e;
    switch (kind_) {
        case Kind::Helix: {
            const double c = std::cos(omega_ * t), s = std::sin(omega_ * t);
            const double w = omega_, w2 = w * w, w3 = w2 * w, w4 = w3 * w;
            e.p = {radius_ * c, radius_ * s, climb_ * t};
            e.v = {-radius_ * w * s, radius_ * w * c, climb_};
            e.a = {-radius_ * w2 * c, -radius_ * w2 * s, 0.0};
            e.jerk = {radius_ * w3 * s, -radius_ * w3 * c, 0.0};
            e.snap = {radius_ * w4 * c, radius_ * w4 * s, 0.0};
            break;
        }
        case Kind::Point:
            e.p = p0_;
            break;
        case Kind::ConstantVelocity:
            e.p = p0_ + v0_ * t;
            e.v = v0_;
            break;
        case Kind::Polynomial: {
            Vec3* slots[5] = {&e.p, &e.v, &e.a, &e.jerk, &e.snap};
            for (int axis = 0; axis < 3; ++axis) {
                const auto& c = coeffs_[axis];
                for (int d = 0; d < 5; ++d) {
                    const double val = polyDerivative(c, d, t);
                    Vec3& slot = *slots[d];
                    (axis == 0 ? slot.x : axis == 1 ? slot.y : slot.z) = val;
                }
            }
            break;
        }
    }
    return e;
}

double LeaderTrajectory::accelBoundInf(double horizon) const {
    switch (kind_) {
        case Kind::Helix:
            return std::fabs(radius_) * omega_ * omega_;
        case Kind::Point:
        case Kind::ConstantVelocity:
            return 0.0;
        case Kind::Polynomial: {
            double sup = 0.0;
            for (int i = 0; i <= kSampleCount; ++i) {
                const double t = horizon * static_cast<double>(i) / kSampleCount;
                sup = std::max(sup, evaluate(t).a.normInf());
            }
            return sup * kSampleInflation;
        }
    }
    return 0.0;
}

double LeaderTrajectory::accelBound2(double horizon) const {
    switch (kind_) {
        case Kind::Helix:
            return std::fabs(radius_) * omega_ * omega_;
        case Kind::Point:
        case Kind::ConstantVelocity:
            return 0.0;
        case Kind::Polynomial: {
            double sup = 0.0;
            for (int i = 0; i <= kSampleCount; ++i) {
                const double t = horizon * static_cast<double>(i) / kSampleCount;
                sup = std::max(sup, evaluate(t).a.norm());
            }
            return sup * kSampleInflation;
        }
    }
    return 0.0;
}

double LeaderTrajectory::nPBar(double lA, double horizon) const {
    switch (kind_) {
        case Kind::Helix: {
            // jerk and snap are orthogonal with constant magnitudes
            const double j = std::fabs(radius_) * omega_ * omega_ * omega_;
            const double s = j * omega_;
            return std::hypot(lA * j, s);
        }
        case Kind::Point:
        case Kind::ConstantVelocity:
            return 0.0;
        case Kind::Polynomial: {
            double sup = 0.0;
            for (int i = 0; i <= kSampleCount; ++i) {
                const double t = horizon * static_cast<double>(i) / kSampleCount;
                const LeaderEval e = evaluate(t);
                sup = std::max(sup, (e.jerk * lA - e.snap).norm());
            }
            return sup * kSampleInflation;
        }
    }
    return 0.0;
}

std::string LeaderTrajectory::describe() const {
    switch (kind_) {
        case Kind::Helix:
            return "helix(radius=" + std::to_string(radius_) +
                   ", omega=" + std::to_string(omega_) + ", climb=" + std::to_string(climb_) + ")";
        case Kind::Point:
            return "point";
        case Kind::ConstantVelocity:
            return "constant_velocity";
        case Kind::Polynomial:
            return "polynomial";
    }
    return "?";
}

}  // namespace vtolsim
