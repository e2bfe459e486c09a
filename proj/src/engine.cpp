#include "corrtest/engine.hpp"

namespace corrtest {

TestReport run_test(std::span<const GroupSample> groups, const PooledMoments& pm,
                    const HypothesisSpec& h, const MethodSpec& method, const RunOptions& opt) {
    ResamplingConfig cfg;
    cfg.seed = opt.seed;
    cfg.B = opt.boot_reps;
    cfg.wild_weight = opt.wild_weight;
    cfg.taylor_second_order = opt.taylor_second_order;
    cfg.small_sample_factor = method.small_sample_factor;
    switch (method.method) {
        case Method::AtsMc:
        case Method::AtsFzMc:
            return mc_test(pm, h, method, opt.alpha, opt.mc_reps, opt.seed);
        case Method::AtsPar:
            cfg.engine = ResamplingEngine::Parametric;
            return parametric_bootstrap_test(pm, h, opt.alpha, cfg);
        case Method::AtsWild:
            cfg.engine = ResamplingEngine::Wild;
            return wild_bootstrap_test(groups, pm, h, opt.alpha, cfg);
        case Method::AtsTay:
            cfg.engine = ResamplingEngine::Taylor;
            cfg.B = opt.mc_reps;
            return taylor_mc_test(pm, h, opt.alpha, cfg);
    }
    return {};
}

TestReport run_test(std::span<const GroupSample> groups, const HypothesisSpec& h,
                    const MethodSpec& method, const RunOptions& opt) {
    const PooledMoments pm = pooled_moments(groups);
    return run_test(groups, pm, h, method, opt);
}

}  // namespace corrtest
