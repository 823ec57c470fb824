#include "vtolsim/estimator.hpp"

#include <cmath>
#include <stdexcept>

namespace vtolsim {

Vec3 applySgn(const Vec3& v, SgnMode mode, double eps) {
    return mode == SgnMode::Exact ? sgnVec(v) : sgnSmoothedVec(v, eps);
}

Vec3 aHat(const Vec3& gamma, double kGamma) { return tanhVec(gamma) * kGamma; }

Vec3 aHatDot(const Vec3& gamma, const Vec3& gammaDot, double kGamma) {
    return sech2Vec(gamma).cwise(gammaDot) * kGamma;
}

EstimatorRates estimatorDerivative(const EstimatorState& self, const NeighborView& view,
                                   const GainSet& gains, SgnMode mode, double eps) {
    if (!self.pHat.isFinite() || !self.vHat.isFinite() || !self.gamma.isFinite() ||
        !self.gammaDot.isFinite())
        throw std::runtime_error("estimatorDerivative: non-finite estimator state");

    const Vec3 aSelf = aHat(self.gamma, gains.k_gamma);
    const Vec3 aDotSelf = aHatDot(self.gamma, self.gammaDot, gains.k_gamma);

    Vec3 pDis{}, vDis{}, aDis{}, aDotDis{};
    for (const auto& nb : view.neighbors) {
        pDis += (self.pHat - nb.pHat) * nb.weight;
        vDis += (self.vHat - nb.vHat) * nb.weight;
        aDis += (aSelf - nb.aHat) * nb.weight;
        aDotDis += (aDotSelf - nb.aHatDot) * nb.weight;
    }
    if (view.leader) {
        const auto& ld = *view.leader;
        pDis += (self.pHat - ld.p) * ld.weight;
        vDis += (self.vHat - ld.v) * ld.weight;
        aDis += (aSelf - ld.a) * ld.weight;
        aDotDis += (aDotSelf - ld.jerk) * ld.weight;
    }

    EstimatorRates rates;
    rates.pHatDot = self.vHat - pDis * gains.k_p;
    rates.vHatDot = aSelf - vDis * gains.k_v;

    const Vec3 gammaBar = sech2Vec(self.gamma);
    if (!(gammaBar.x > 0.0 && gammaBar.y > 0.0 && gammaBar.z > 0.0))
        throw std::runtime_error("estimatorDerivative: GammaBar entry underflowed to zero "
                                 "(gamma diverged)");

    // l_a-weighted disagreement: the bracket equals the sliding surface
    // s_i = l_a sum m_ij aBar_j + sum m_ij aBarDot_j, so the reaching term
    // drives s itself into the boundary layer
    const Vec3 e = aDis * gains.l_a + aDotDis;
    const Vec3 reach = e + applySgn(e, mode, eps);
    const Vec3 gammaTerm = tanhVec(self.gamma).cwise(self.gammaDot).cwise(self.gammaDot);
    rates.gammaDdot = self.gammaDot * (-gains.l_a) + gammaTerm * 2.0 -
                      Vec3{reach.x / gammaBar.x, reach.y / gammaBar.y, reach.z / gammaBar.z} *
                          (gains.k_a / gains.k_gamma);
    return rates;
}

EstimationErrors estimationErrors(const std::vector<EstimatorState>& states, double kGamma,
                                  const Vec3& pR, const Vec3& vR, const Vec3& aR) {
    EstimationErrors err;
    err.pBar.reserve(states.size());
    err.vBar.reserve(states.size());
    err.aBar.reserve(states.size());
    for (const auto& s : states) {
        err.pBar.push_back(s.pHat - pR);
        err.vBar.push_back(s.vHat - vR);
        err.aBar.push_back(aHat(s.gamma, kGamma) - aR);
    }
    return err;
}

std::vector<Vec3> slidingSurface(const std::vector<Vec3>& aBar, const std::vector<Vec3>& aBarDot,
                                 const MatN& m, double lA) {
    const std::size_t n = m.size();
    std::vector<Vec3> s(n);
    for (std::size_t i = 0; i < n; ++i) {
        Vec3 acc{};
        for (std::size_t j = 0; j < n; ++j) acc += (aBar[j] * lA + aBarDot[j]) * m(i, j);
        s[i] = acc;
    }
    return s;
}

}  // namespace vtolsim
