#include <vector>

#include "gvlab/hierarchy_ops.hpp"
#include "gvlab/parallel.hpp"
#include "hierarchy_detail.hpp"

namespace gvlab {

using detail::idx2;
using detail::idx3;
using detail::Workspace;

namespace {

void set_sym2(std::vector<double>& lv, int m, int i, int j, double v) {
    lv[idx2(m, i, j)] = v;
    lv[idx2(m, j, i)] = v;
}

void set_sym3(std::vector<double>& lv, int m, int i, int j, int k, double v) {
    lv[idx3(m, i, j, k)] = v;
    lv[idx3(m, i, k, j)] = v;
    lv[idx3(m, j, i, k)] = v;
    lv[idx3(m, j, k, i)] = v;
    lv[idx3(m, k, i, j)] = v;
    lv[idx3(m, k, j, i)] = v;
}

/// Both generators share the single-point integral structure; they differ
/// only in the weight attached to kept points (xi side) and removed points.
/// For the limiting generator: kept weight 1, removed weight -phi.
/// For the rescaled one: kept weight e^{-eps phi}, removed (e^{-eps phi}-1)/eps.
GridFunctionFamily apply_generator(const GridFunctionFamily& g, const ScalingRegime& reg,
                                   const Potential& pot, bool rescaled) {
    detail::require_desk_scale(g);
    Workspace ws(g.grid(), pot, rescaled ? reg.eps : 1.0);
    const int m = ws.m;
    const double h = ws.h, z = reg.z;
    const int n_max = g.n_max();
    GridFunctionFamily out(g.grid(), n_max);

    auto kept = [&](int s, int u) { return rescaled ? ws.ae_at(s, u) : 1.0; };
    auto gone = [&](int s, int y) { return rescaled ? ws.de_at(s, y) : -ws.phi_at(s, y); };

    const std::vector<double>* g1 = n_max >= 1 ? &g.level(1) : nullptr;
    const std::vector<double>* g2 = n_max >= 2 ? &g.level(2) : nullptr;
    const std::vector<double>* g3 = n_max >= 3 ? &g.level(3) : nullptr;

    // level 0: z * int G({x}) dx
    if (g1) {
        double s1 = 0.0;
        for (double v : *g1) s1 += v;
        out.scalar() = z * h * s1;
    }

    if (n_max >= 1) {
        auto& o1 = out.level(1);
        parallel_for(m, [&](std::size_t ii) {
            int i = static_cast<int>(ii);
            double acc = 0.0;
            for (int s = 0; s < m; ++s) {
                double t = (*g1)[s] * gone(s, i);
                if (g2) t += (*g2)[idx2(m, i, s)] * kept(s, i);
                acc += t;
            }
            o1[i] = -(*g1)[i] + z * h * acc;
        });
    }

    if (n_max >= 2) {
        auto& o2 = out.level(2);
        parallel_for(m, [&](std::size_t ii) {
            int i = static_cast<int>(ii);
            for (int j = i; j < m; ++j) {
                double acc = 0.0;
                for (int s = 0; s < m; ++s) {
                    double di = gone(s, i), dj = gone(s, j);
                    double t = (*g1)[s] * di * dj;
                    if (g2)
                        t += (*g2)[idx2(m, j, s)] * kept(s, j) * di +
                             (*g2)[idx2(m, i, s)] * kept(s, i) * dj;
                    if (g3) t += (*g3)[idx3(m, i, j, s)] * kept(s, i) * kept(s, j);
                    acc += t;
                }
                set_sym2(o2, m, i, j, -2.0 * (*g2)[idx2(m, i, j)] + z * h * acc);
            }
        });
    }

    if (n_max >= 3) {
        auto& o3 = out.level(3);
        parallel_for(m, [&](std::size_t ii) {
            int i = static_cast<int>(ii);
            for (int j = i; j < m; ++j) {
                for (int k = j; k < m; ++k) {
                    double acc = 0.0;
                    for (int s = 0; s < m; ++s) {
                        double di = gone(s, i), dj = gone(s, j), dk = gone(s, k);
                        double ai = kept(s, i), aj = kept(s, j), ak = kept(s, k);
                        double t = (*g1)[s] * di * dj * dk;
                        t += (*g2)[idx2(m, k, s)] * ak * di * dj +
                             (*g2)[idx2(m, j, s)] * aj * di * dk +
                             (*g2)[idx2(m, i, s)] * ai * dj * dk;
                        t += (*g3)[idx3(m, j, k, s)] * aj * ak * di +
                             (*g3)[idx3(m, i, k, s)] * ai * ak * dj +
                             (*g3)[idx3(m, i, j, s)] * ai * aj * dk;
                        // the xi = eta term needs level 4: zero at this truncation
                        acc += t;
                    }
                    set_sym3(o3, m, i, j, k,
                             -3.0 * (*g3)[idx3(m, i, j, k)] + z * h * acc);
                }
            }
        });
    }

    return out;
}

} // namespace

GridFunctionFamily apply_vlasov_generator(const GridFunctionFamily& g, const ScalingRegime& reg,
                                          const Potential& pot) {
    return apply_generator(g, reg, pot, false);
}

GridFunctionFamily apply_rescaled_generator(const GridFunctionFamily& g,
                                            const ScalingRegime& reg, const Potential& pot) {
    return apply_generator(g, reg, pot, true);
}

} // namespace gvlab
