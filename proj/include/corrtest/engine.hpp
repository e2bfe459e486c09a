#pragma once

#include "corrtest/estimators.hpp"
#include "corrtest/hypotheses.hpp"
#include "corrtest/quadform.hpp"
#include "corrtest/resampling.hpp"

#include <cstdint>
#include <span>

namespace corrtest {

struct RunOptions {
    double alpha = 0.05;
    int mc_reps = kDefaultMcReps;          // weighted χ² and Taylor reference draws
    int boot_reps = kDefaultBootstrapReps; // parametric and wild bootstrap
    std::uint64_t seed = 0;
    WildWeight wild_weight = WildWeight::Rademacher;
    bool taylor_second_order = true;
};

/// Runs one test on prepared moments. `groups` is only read by the wild bootstrap.
TestReport run_test(std::span<const GroupSample> groups, const PooledMoments& pm,
                    const HypothesisSpec& h, const MethodSpec& method, const RunOptions& opt);

TestReport run_test(std::span<const GroupSample> groups, const HypothesisSpec& h,
                    const MethodSpec& method, const RunOptions& opt);

}  // namespace corrtest
