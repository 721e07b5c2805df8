#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "sdcexp/probability.hpp"

namespace sdcexp::detail {

inline double xlog(double v) {
    return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
}

// Marginal accumulators for the groups the tilted-weight and rate-tradeoff
// objectives read: UVSX, UVY, UVS, VS, VY, S, Y. One pass over the joint
// fills the masses; log_tables() caches their logs.
struct JointStats {
    Shape5 sh;
    std::vector<double> m4, muvy, muvs, mvs, mvy, ms, my;
    std::vector<double> lm4, lmuvy, lmuvs, lmvs, lmvy, lms, lmy;

    explicit JointStats(Shape5 shape) : sh(shape) {
        m4.resize(static_cast<std::size_t>(sh.u()) * sh.v() * sh.s() * sh.x());
        muvy.resize(static_cast<std::size_t>(sh.u()) * sh.v() * sh.y());
        muvs.resize(static_cast<std::size_t>(sh.u()) * sh.v() * sh.s());
        mvs.resize(static_cast<std::size_t>(sh.v()) * sh.s());
        mvy.resize(static_cast<std::size_t>(sh.v()) * sh.y());
        ms.resize(static_cast<std::size_t>(sh.s()));
        my.resize(static_cast<std::size_t>(sh.y()));
    }

    void accumulate(const double* q) {
        std::fill(m4.begin(), m4.end(), 0.0);
        std::fill(muvy.begin(), muvy.end(), 0.0);
        std::fill(muvs.begin(), muvs.end(), 0.0);
        std::fill(mvs.begin(), mvs.end(), 0.0);
        std::fill(mvy.begin(), mvy.end(), 0.0);
        std::fill(ms.begin(), ms.end(), 0.0);
        std::fill(my.begin(), my.end(), 0.0);
        const int U = sh.u(), V = sh.v(), S = sh.s(), X = sh.x(), Y = sh.y();
        std::size_t idx = 0;
        for (int u = 0; u < U; ++u)
            for (int v = 0; v < V; ++v)
                for (int s = 0; s < S; ++s)
                    for (int x = 0; x < X; ++x) {
                        const std::size_t i4 = ((static_cast<std::size_t>(u) * V + v) * S + s) * X + x;
                        double row = 0.0;
                        for (int y = 0; y < Y; ++y, ++idx) {
                            const double m = q[idx];
                            row += m;
                            muvy[(static_cast<std::size_t>(u) * V + v) * Y + y] += m;
                            mvy[static_cast<std::size_t>(v) * Y + y] += m;
                            my[static_cast<std::size_t>(y)] += m;
                        }
                        m4[i4] = row;
                        muvs[(static_cast<std::size_t>(u) * V + v) * S + s] += row;
                        mvs[static_cast<std::size_t>(v) * S + s] += row;
                        ms[static_cast<std::size_t>(s)] += row;
                    }
    }

    void log_tables() {
        auto fill = [](const std::vector<double>& src, std::vector<double>& dst) {
            dst.resize(src.size());
            for (std::size_t i = 0; i < src.size(); ++i) dst[i] = xlog(src[i]);
        };
        fill(m4, lm4);
        fill(muvy, lmuvy);
        fill(muvs, lmuvs);
        fill(mvs, lmvs);
        fill(mvy, lmvy);
        fill(ms, lms);
        fill(my, lmy);
    }
};

}  // namespace sdcexp::detail
