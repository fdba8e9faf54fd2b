#pragma once

#include <cmath>
#include <stdexcept>

#include "decum/quadrature.hpp"

namespace decum {

// Mortality law with force of mortality hazard(age) = a + b * c^age.
// Ages and times are in years.
struct GompertzMakeham {
    double a = 0.00055845;
    double b = 0.000025670;
    double c = 1.1011;
};

inline void validate(const GompertzMakeham& law) {
    if (!(law.a >= 0.0))
        throw std::invalid_argument("mortality A must satisfy A >= 0");
    if (!(law.b > 0.0))
        throw std::invalid_argument("mortality B must satisfy B > 0");
    if (!(law.c > 1.0))
        throw std::invalid_argument("mortality C must satisfy C > 1");
}

inline double hazard(const GompertzMakeham& law, double age) {
    return law.a + law.b * std::pow(law.c, age);
}

// Integrated hazard over [age0, age0 + t], in closed form.
inline double cumulative_hazard(const GompertzMakeham& law, double age0, double t) {
    const double lc = std::log(law.c);
    return law.a * t + law.b * (std::pow(law.c, age0 + t) - std::pow(law.c, age0)) / lc;
}

// Probability of surviving t more years from age0.
inline double survival(const GompertzMakeham& law, double age0, double t) {
    return std::exp(-cumulative_hazard(law, age0, t));
}

// exp(-rho t) * survival(age0, t): the discount applied to all costs and
// cash flows contingent on being alive at age0 + t.
inline double combined_discount(const GompertzMakeham& law, double rho, double age0,
                                double t) {
    return std::exp(-rho * t - cumulative_hazard(law, age0, t));
}

// Price per unit rate of a life annuity paying continuously from `age` while
// alive, with payments cut off at max_age, discounted at `rate`.
inline double annuity_value(const GompertzMakeham& law, double age, double rate,
                            double max_age, double step = 1.0 / 52.0) {
    if (!(max_age > age))
        throw std::invalid_argument("annuity_value: max_age must satisfy max_age > age");
    return simpson(
        [&](double s) { return std::exp(-rate * s) * survival(law, age, s); },
        0.0, max_age - age, step);
}

}  // namespace decum
