#pragma once

#include "mestd/model.hpp"

namespace mestd {

/// Uniform M-state pmf from a continuous pdf: s_i = (i-1) s_M/(M-1) and
/// p_i = int_{s_i}^{s_{i+1}} f with s_{M+1} = infinity, so the last state
/// collects the whole upper tail.
DiscreteFading discretize_pdf(const ContinuousFading& fading, int states, double s_max);

}  // namespace mestd
