#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "decum/mortality.hpp"

namespace decum {

struct MarketParams {
    double r = 0.03;      // riskless rate, per year
    double mu = 0.08;     // risky asset drift
    double sigma = 0.15;  // risky asset volatility
};

struct PlanParams {
    double horizon = 15.0;      // years until the annuity is bought
    double x0 = 100.0;          // initial wealth
    double age0 = 60.0;         // age at t = 0
    double max_age = 100.0;     // annuity payments stop here
    double c1 = 6.5155;         // maximum consumption rate
    double c2 = 6.5155 * 0.5;   // minimum consumption rate
    double kappa = 0.5;         // weight on the (c1 - c)^2 running cost
    double rho = 0.05;          // subjective discount rate in the cost functional
    double target_mult = 1.75;  // desired final annuity, as a multiple of c1
    double safety_mult = 0.5;   // guaranteed final annuity, as a multiple of c1
};

// Full problem description. finalize() validates the parameters and fills the
// derived fields; everything downstream assumes a finalized spec.
struct ProblemSpec {
    MarketParams market;
    PlanParams plan;
    GompertzMakeham mortality;
    double annuity_rate = 0.03;  // pricing rate for annuity quotes

    // set by finalize()
    double a_final = 0.0;  // annuity price per unit rate at age0 + horizon
    double target = 0.0;   // wealth at the horizon that buys the target annuity
    double safety = 0.0;   // wealth at the horizon that buys the guaranteed annuity

    void finalize() {
        validate(mortality);
        if (!(market.r > 0.0))
            throw std::invalid_argument("r must satisfy r > 0");
        if (!(market.mu > market.r))
            throw std::invalid_argument("mu must satisfy mu > r");
        if (!(market.sigma > 0.0))
            throw std::invalid_argument("sigma must satisfy sigma > 0");
        if (!(plan.horizon > 0.0))
            throw std::invalid_argument("T must satisfy T > 0");
        if (!(plan.rho >= 0.0))
            throw std::invalid_argument("rho must satisfy rho >= 0");
        if (!(plan.c1 > 0.0))
            throw std::invalid_argument("C1 must satisfy C1 > 0");
        if (!(plan.c2 > 0.0 && plan.c2 <= plan.c1))
            throw std::invalid_argument("C2 must satisfy 0 < C2 <= C1");
        if (!(plan.kappa >= 0.0))
            throw std::invalid_argument("kappa must satisfy kappa >= 0");
        if (!(plan.age0 >= 0.0))
            throw std::invalid_argument("age0 must satisfy age0 >= 0");
        if (!(plan.max_age > plan.age0 + plan.horizon))
            throw std::invalid_argument("Tm must satisfy Tm > age0 + T");
        if (!(annuity_rate > 0.0))
            throw std::invalid_argument("annuity_rate must satisfy annuity_rate > 0");
        if (!(plan.safety_mult >= 0.0 && plan.target_mult > plan.safety_mult))
            throw std::invalid_argument(
                "target_mult, safety_mult must satisfy 0 <= safety_mult < target_mult");

        a_final = annuity_value(mortality, plan.age0 + plan.horizon, annuity_rate,
                                plan.max_age);
        target = plan.target_mult * plan.c1 * a_final;
        safety = plan.safety_mult * plan.c1 * a_final;
    }

    double discount(double t) const {
        return combined_discount(mortality, plan.rho, plan.age0, t);
    }

    double hazard_at(double t) const { return hazard(mortality, plan.age0 + t); }
};

}  // namespace decum
