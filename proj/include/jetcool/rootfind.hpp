#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <utility>

#include "jetcool/error.hpp"

namespace jetcool {

struct BisectionOptions {
    double tolerance = 1e-9;  // on |residual|, in the caller's normalized units
    int max_iterations = 200;
    int max_expansions = 60;
    double expansion_factor = 4.0;
};

struct RootResult {
    double x;
    double residual;
    int iterations;
};

/// Bisection on [lo, hi]; the residual must change sign over the bracket.
inline std::optional<RootResult> bisect(const std::function<double(double)>& f, double lo, double hi,
                                        const BisectionOptions& opt = {}) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return RootResult{lo, 0.0, 0};
    if (fhi == 0.0) return RootResult{hi, 0.0, 0};
    if (std::signbit(flo) == std::signbit(fhi)) return std::nullopt;
    double mid = 0.5 * (lo + hi);
    double fmid = f(mid);
    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        mid = 0.5 * (lo + hi);
        fmid = f(mid);
        if (std::abs(fmid) <= opt.tolerance || mid == lo || mid == hi) break;
        if (std::signbit(fmid) == std::signbit(flo)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return RootResult{mid, fmid, it};
}

/// Bisection in log space for a positive unknown. The bracket [lo, hi] is grown geometrically
/// in both directions until the residual changes sign.
inline std::optional<RootResult> bisect_positive(const std::function<double(double)>& f, double lo,
                                                 double hi, const BisectionOptions& opt = {}) {
    require(lo > 0.0 && hi > lo, ErrorKind::invalid_input, "bisect_positive needs 0 < lo < hi");
    auto g = [&](double s) { return f(std::exp(s)); };
    double a = std::log(lo);
    double b = std::log(hi);
    const double grow = std::log(opt.expansion_factor);
    double ga = g(a);
    double gb = g(b);
    for (int k = 0; k <= opt.max_expansions; ++k) {
        if (std::signbit(ga) != std::signbit(gb) || ga == 0.0 || gb == 0.0) {
            auto r = bisect(g, a, b, opt);
            if (!r) return std::nullopt;
            return RootResult{std::exp(r->x), r->residual, r->iterations};
        }
        a -= grow;
        b += grow;
        ga = g(a);
        gb = g(b);
    }
    return std::nullopt;
}

}  // namespace jetcool
