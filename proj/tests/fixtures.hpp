#pragma once

#include "decum/problem.hpp"

namespace testutil {

inline decum::ProblemSpec default_spec(double c2_ratio = 0.5, double kappa = 0.5,
                                       double rho = 0.05) {
    decum::ProblemSpec s;
    s.plan.c2 = c2_ratio * s.plan.c1;
    s.plan.kappa = kappa;
    s.plan.rho = rho;
    s.finalize();
    return s;
}

}  // namespace testutil
