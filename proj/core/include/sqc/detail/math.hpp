#pragma once

#include <cmath>
#include <functional>
#include <thread>
#include <vector>

#include "sqc/errors.hpp"

namespace sqc::detail {

// Brent root finder on a bracketing interval [a, b] with f(a)*f(b) <= 0.
// Terminates when the bracket width falls below xtol or |f| below ftol.
template <typename F>
double brent_root(F&& f, double a, double b, double xtol, double ftol,
                  int max_iter = 200) {
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0)
        throw numerical_error("brent_root: interval does not bracket a root");

    double c = a, fc = fa;
    double d = b - a, e = d;
    for (int iter = 0; iter < max_iter; ++iter) {
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * xtol;
        const double m = 0.5 * (c - b);
        if (std::abs(m) <= tol || std::abs(fb) < ftol) return b;
        if (std::abs(e) < tol || std::abs(fa) <= std::abs(fb)) {
            d = m; e = m;
        } else {
            double p, q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q; else p = -p;
            if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
                e = d; d = p / q;
            } else {
                d = m; e = m;
            }
        }
        a = b; fa = fb;
        b += (std::abs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
        fb = f(b);
        if ((fb > 0.0) == (fc > 0.0)) { c = a; fc = fa; d = b - a; e = d; }
    }
    return b;
}

// Deterministic parallel loop: [0, n) is split into contiguous chunks, each
// worker writes disjoint indices, results are merged in index order by the
// caller's storage layout.
inline void parallel_for(std::size_t n, int threads,
                         const std::function<void(std::size_t)>& body) {
    if (threads <= 0)
        threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const std::size_t nt = std::min<std::size_t>(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(nt);
    std::vector<std::exception_ptr> errors(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < n; i += nt) body(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);
}

// Reduce an angle to (-pi, pi].
inline double wrap_angle(double x) {
    const double two_pi = 6.283185307179586476925287;
    double r = std::remainder(x, two_pi);
    if (r <= -two_pi / 2.0) r += two_pi;
    return r;
}

} // namespace sqc::detail
