// rootfind.hpp -- bracketed bisection on positive abscissae (internal).
#pragma once

#include "lcdual/errors.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace lcdual::detail {

struct RootResult {
    double x = 0.0;
    double fx = 0.0;
    int iterations = 0;
    double lo = 0.0, hi = 0.0; // final bracket
};

// Bisects f on [lo, hi] given f(lo) <= 0 <= f(hi), using the geometric
// midpoint. tol_rel = 0 runs to the floating-point limit of the bracket.
inline RootResult bisect(const std::function<double(double)>& f, double lo,
                         double hi, double flo, double fhi, double tol_rel,
                         int max_iter) {
    if (flo > 0.0 || fhi < 0.0) {
        std::ostringstream os;
        os << "bisect: bracket [" << lo << ", " << hi << "] does not straddle a root"
           << " (f = " << flo << ", " << fhi << ")";
        throw SolverError(os.str());
    }
    RootResult r;
    r.lo = lo;
    r.hi = hi;
    for (int i = 0; i < max_iter; ++i) {
        const double mid = std::sqrt(r.lo * r.hi);
        if (mid <= r.lo || mid >= r.hi) break;
        const double fm = f(mid);
        ++r.iterations;
        if (fm <= 0.0)
            r.lo = mid;
        else
            r.hi = mid;
        if (r.hi - r.lo <= tol_rel * r.hi) break;
    }
    r.x = std::sqrt(r.lo * r.hi);
    if (r.x <= r.lo || r.x >= r.hi) r.x = r.lo;
    r.fx = f(r.x);
    return r;
}

// Expands a bracket for f increasing through its root, starting at x0 and
// scaling by `factor` per step, then bisects.
inline RootResult expand_and_bisect(const std::function<double(double)>& f,
                                    double x0, double factor, double tol_rel,
                                    int max_iter, const char* what) {
    double lo = x0, hi = x0;
    double flo = f(x0), fhi = flo;
    int guard = 0;
    while (flo > 0.0) {
        lo /= factor;
        flo = f(lo);
        if (++guard > 600 || lo < 1e-300) {
            std::ostringstream os;
            os << what << ": no sign change while shrinking bracket (reached " << lo << ")";
            throw SolverError(os.str());
        }
    }
    guard = 0;
    while (fhi < 0.0) {
        hi *= factor;
        fhi = f(hi);
        if (++guard > 600 || hi > 1e300) {
            std::ostringstream os;
            os << what << ": no sign change while growing bracket (reached " << hi << ")";
            throw SolverError(os.str());
        }
    }
    return bisect(f, lo, hi, flo, fhi, tol_rel, max_iter);
}

} // namespace lcdual::detail
