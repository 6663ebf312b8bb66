#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "gvlab/hierarchy_ops.hpp"
#include "gvlab/parallel.hpp"
#include "hierarchy_detail.hpp"

// One application of the contraction step to a truncated family. The
// omega-integral is expanded by order m = |omega|; the product weight over
// surviving points is expanded into slot assignments so that every inner sum
// runs only over the kernel band of some anchor point (or collapses into a
// precomputed row sum when a slot couples to nothing but G).

namespace gvlab {

using detail::idx2;
using detail::idx3;
using detail::Workspace;

namespace {

struct StepTables {
    double r1all = 0.0, r2all = 0.0, r3all = 0.0; // raw full sums per level
    std::vector<double> gr2;   // gr2[w]    = sum_t G2[w,t]
    std::vector<double> r3ab;  // r3ab[a,b] = sum_s G3[a,b,s]
    std::vector<double> r3row; // r3row[a]  = sum_{s,t} G3[a,s,t]
    std::vector<double> ar3;   // ar3[c,w]  = sum_t G3[c,w,t] Ae[t-c]   (rescaled only)
    std::vector<double> aar3;  // aar3[i]   = sum_{s,t} G3[i,s,t] Ae[s-i] Ae[t-i]
};

StepTables build_tables(const GridFunctionFamily& g, const Workspace& ws, bool rescaled) {
    StepTables t;
    const int m = ws.m;
    const int n_max = g.n_max();
    if (n_max >= 1)
        for (double v : g.level(1)) t.r1all += v;
    if (n_max >= 2) {
        const auto& g2 = g.level(2);
        t.gr2.assign(m, 0.0);
        for (int w = 0; w < m; ++w) {
            double s = 0.0;
            for (int u = 0; u < m; ++u) s += g2[idx2(m, w, u)];
            t.gr2[w] = s;
            t.r2all += s;
        }
    }
    if (n_max >= 3) {
        const auto& g3 = g.level(3);
        t.r3ab.assign(std::size_t(m) * m, 0.0);
        t.r3row.assign(m, 0.0);
        if (rescaled) {
            t.ar3.assign(std::size_t(m) * m, 0.0);
            t.aar3.assign(m, 0.0);
        }
        for (int a = 0; a < m; ++a) {
            for (int w = 0; w < m; ++w) {
                double s = 0.0, sa = 0.0;
                for (int u = 0; u < m; ++u) {
                    double v = g3[idx3(m, a, w, u)];
                    s += v;
                    if (rescaled) sa += v * ws.ae[ws.off(u, a)];
                }
                t.r3ab[idx2(m, a, w)] = s;
                t.r3row[a] += s;
                if (rescaled) {
                    t.ar3[idx2(m, a, w)] = sa;
                    t.aar3[a] += sa * ws.ae[ws.off(w, a)];
                }
            }
            t.r3all += t.r3row[a];
        }
    }
    return t;
}

/// Evaluation of one output entry. eta holds the tuple's grid indices.
struct TupleEval {
    const GridFunctionFamily& g;
    const Workspace& ws;
    const StepTables& tb;
    double zd;        // z * delta
    double omd;       // 1 - delta
    bool rescaled;    // weight flavor
    int omega_max;

    int m() const { return ws.m; }

    double g_at1(int a) const { return g.n_max() >= 1 ? g.level(1)[a] : 0.0; }
    double g_at2(int a, int b) const {
        return g.n_max() >= 2 ? g.level(2)[idx2(m(), a, b)] : 0.0;
    }
    double g_at3(int a, int b, int c) const {
        return g.n_max() >= 3 ? g.level(3)[idx3(m(), a, b, c)] : 0.0;
    }
    /// Symmetric lookup of G at the multiset {pts[0..cnt-1]}.
    double g_at(const int* pts, int cnt) const {
        if (cnt > g.n_max()) return 0.0;
        switch (cnt) {
            case 0: return g.scalar();
            case 1: return g_at1(pts[0]);
            case 2: return g_at2(pts[0], pts[1]);
            default: return g_at3(pts[0], pts[1], pts[2]);
        }
    }

    /// Product of survivor weights for a single integration point w:
    /// vlasov flavor: prod (-phi(w-y)); rescaled: prod De(w-y).
    double survivor1(int w, const int* ys, int q) const {
        double p = 1.0;
        for (int a = 0; a < q; ++a)
            p *= rescaled ? ws.de[ws.off(w, ys[a])] : -ws.phi[ws.off(w, ys[a])];
        return p;
    }

    /// xi-side weight at integration point w (1 for the vlasov flavor).
    double keeper(int w, const int* xs, int j) const {
        if (!rescaled) return 1.0;
        double p = 1.0;
        for (int a = 0; a < j; ++a) p *= ws.ae[ws.off(w, xs[a])];
        return p;
    }

    /// m = 1 contribution for a fixed subset split (xi = xs, survivors = ys).
    double order1(const int* xs, int j, const int* ys, int q) const {
        if (j + 1 > g.n_max()) return 0.0;
        int pts[3];
        for (int a = 0; a < j; ++a) pts[a] = xs[a];
        double acc = 0.0;
        if (q == 0) {
            for (int w = 0; w < m(); ++w) {
                pts[j] = w;
                acc += g_at(pts, j + 1) * keeper(w, xs, j);
            }
        } else {
            for (int d : ws.band) {
                int w = ys[0] + d;
                if (w >= m()) w -= m();
                pts[j] = w;
                acc += g_at(pts, j + 1) * keeper(w, xs, j) * survivor1(w, ys, q);
            }
        }
        return acc;
    }

    /// Slot sum over w2 with no survivor anchored there: G summed against the
    /// xi weight only. Available for j <= 1 (level limits do the rest).
    double free_slot(const int* xs, int j, int w1) const {
        if (j == 0) return g.n_max() >= 2 ? tb.gr2[w1] : 0.0;
        // j == 1
        if (g.n_max() < 3) return 0.0;
        return rescaled ? tb.ar3[idx2(m(), xs[0], w1)] : tb.r3ab[idx2(m(), xs[0], w1)];
    }

    /// Both slots free (q = 0): double sum of G(xi, w1, w2) with xi weights.
    double free_both(const int* xs, int j) const {
        if (j == 0) return tb.r2all;
        if (g.n_max() < 3) return 0.0;
        return rescaled ? tb.aar3[xs[0]] : tb.r3row[xs[0]];
    }

    /// m = 2, vlasov flavor: expand survivors over (A to w1, B to w2).
    double order2_vlasov(const int* xs, int j, const int* ys, int q) const {
        if (j + 2 > g.n_max()) return 0.0;
        double sign = (q % 2 == 0) ? 1.0 : -1.0;
        if (q == 0) return sign * free_both(xs, j);
        int pts[3];
        for (int a = 0; a < j; ++a) pts[a] = xs[a];
        double total = 0.0;
        unsigned full = 1u << q;
        // unordered split pairs {A, complement}; slot swap gives the same value
        for (unsigned am = 0; am < full; ++am) {
            unsigned bm = (full - 1) & ~am;
            if (am > bm) continue;
            double mult = (am == bm) ? 1.0 : 2.0; // am == bm only if q == 0
            int as[3], bs[3];
            int na = 0, nb = 0;
            for (int a = 0; a < q; ++a) {
                if ((am >> a) & 1u) as[na++] = ys[a];
                else bs[nb++] = ys[a];
            }
            double part = 0.0;
            if (na == 0) {
                for (int d : ws.band) {
                    int w2 = bs[0] + d;
                    if (w2 >= m()) w2 -= m();
                    double pb = 1.0;
                    for (int a = 0; a < nb; ++a) pb *= ws.phi[ws.off(w2, bs[a])];
                    if (pb != 0.0) part += pb * free_slot(xs, j, w2);
                }
            } else if (nb == 0) {
                for (int d : ws.band) {
                    int w1 = as[0] + d;
                    if (w1 >= m()) w1 -= m();
                    double pa = 1.0;
                    for (int a = 0; a < na; ++a) pa *= ws.phi[ws.off(w1, as[a])];
                    if (pa != 0.0) part += pa * free_slot(xs, j, w1);
                }
            } else {
                for (int d1 : ws.band) {
                    int w1 = as[0] + d1;
                    if (w1 >= m()) w1 -= m();
                    double pa = 1.0;
                    for (int a = 0; a < na; ++a) pa *= ws.phi[ws.off(w1, as[a])];
                    if (pa == 0.0) continue;
                    pts[j] = w1;
                    for (int d2 : ws.band) {
                        int w2 = bs[0] + d2;
                        if (w2 >= m()) w2 -= m();
                        double pb = 1.0;
                        for (int a = 0; a < nb; ++a) pb *= ws.phi[ws.off(w2, bs[a])];
                        if (pb == 0.0) continue;
                        pts[j + 1] = w2;
                        part += pa * pb * g_at(pts, j + 2);
                    }
                }
            }
            total += mult * part;
        }
        return sign * total;
    }

    /// m = 2, rescaled flavor: survivors pick mode w1, w2 or both; the "both"
    /// mode carries one factor eps. The xi weight sits on both slots.
    double order2_rescaled(const int* xs, int j, const int* ys, int q, double eps) const {
        if (j + 2 > g.n_max()) return 0.0;
        if (q == 0) return free_both(xs, j);
        int pts[3];
        for (int a = 0; a < j; ++a) pts[a] = xs[a];
        double total = 0.0;
        // ternary assignment per survivor: 0 -> slot1, 1 -> slot2, 2 -> both
        int assign[3] = {0, 0, 0};
        int n_assign = 1;
        for (int a = 0; a < q; ++a) n_assign *= 3;
        for (int code = 0; code < n_assign; ++code) {
            int c = code;
            int na = 0, nb = 0, ncb = 0;
            for (int a = 0; a < q; ++a) {
                assign[a] = c % 3;
                c /= 3;
                if (assign[a] == 0) ++na;
                else if (assign[a] == 1) ++nb;
                else ++ncb;
            }
            // fold the slot swap: count each unordered {A,B} split once
            bool swapped_before = false;
            for (int a = 0; a < q; ++a)
                if (assign[a] != 2) {
                    swapped_before = assign[a] == 1;
                    break;
                }
            if (swapped_before) continue;
            double mult = (na + nb == 0) ? 1.0 : 2.0;
            // collect "both" points into each slot's anchor product
            int s1[3], s2[3];
            int n1 = 0, n2 = 0;
            for (int a = 0; a < q; ++a) {
                if (assign[a] == 0 || assign[a] == 2) s1[n1++] = ys[a];
                if (assign[a] == 1 || assign[a] == 2) s2[n2++] = ys[a];
            }
            double epow = 1.0;
            for (int a = 0; a < ncb; ++a) epow *= eps;
            double part = 0.0;
            if (n1 == 0) {
                for (int d : ws.band) {
                    int w2 = s2[0] + d;
                    if (w2 >= m()) w2 -= m();
                    double pb = survivor1(w2, s2, n2) * keeper(w2, xs, j);
                    if (pb != 0.0) part += pb * free_slot(xs, j, w2);
                }
            } else if (n2 == 0) {
                for (int d : ws.band) {
                    int w1 = s1[0] + d;
                    if (w1 >= m()) w1 -= m();
                    double pa = survivor1(w1, s1, n1) * keeper(w1, xs, j);
                    if (pa != 0.0) part += pa * free_slot(xs, j, w1);
                }
            } else {
                for (int d1 : ws.band) {
                    int w1 = s1[0] + d1;
                    if (w1 >= m()) w1 -= m();
                    double pa = survivor1(w1, s1, n1);
                    if (pa == 0.0) continue;
                    pa *= keeper(w1, xs, j);
                    pts[j] = w1;
                    for (int d2 : ws.band) {
                        int w2 = s2[0] + d2;
                        if (w2 >= m()) w2 -= m();
                        double pb = survivor1(w2, s2, n2);
                        if (pb == 0.0) continue;
                        pb *= keeper(w2, xs, j);
                        pts[j + 1] = w2;
                        part += pa * pb * g_at(pts, j + 2);
                    }
                }
            }
            total += mult * epow * part;
        }
        return total;
    }

    /// m = 3 (vlasov flavor only, xi empty by the level cap).
    double order3_vlasov(const int* ys, int q) const {
        if (g.n_max() < 3) return 0.0;
        double sign = (q % 2 == 0) ? 1.0 : -1.0;
        if (q == 0) return sign * tb.r3all;
        double total = 0.0;
        int assign[3];
        int n_assign = 1;
        for (int a = 0; a < q; ++a) n_assign *= 3;
        for (int code = 0; code < n_assign; ++code) {
            int c = code;
            int slot_pts[3][3];
            int slot_n[3] = {0, 0, 0};
            for (int a = 0; a < q; ++a) {
                assign[a] = c % 3;
                c /= 3;
                slot_pts[assign[a]][slot_n[assign[a]]++] = ys[a];
            }
            // order the slots busiest-first; empty slots fold into row sums
            int order[3] = {0, 1, 2};
            for (int x = 0; x < 3; ++x)
                for (int y = x + 1; y < 3; ++y)
                    if (slot_n[order[y]] > slot_n[order[x]]) std::swap(order[x], order[y]);
            int* p0 = slot_pts[order[0]];
            int n0 = slot_n[order[0]];
            int* p1 = slot_pts[order[1]];
            int n1 = slot_n[order[1]];
            int n2 = slot_n[order[2]];
            double part = 0.0;
            if (n1 == 0) { // one busy slot, two free
                for (int d : ws.band) {
                    int w = p0[0] + d;
                    if (w >= m()) w -= m();
                    double pa = 1.0;
                    for (int a = 0; a < n0; ++a) pa *= ws.phi[ws.off(w, p0[a])];
                    if (pa != 0.0) part += pa * tb.r3row[w];
                }
            } else if (n2 == 0) { // two busy slots, one free
                for (int d1 : ws.band) {
                    int w1 = p0[0] + d1;
                    if (w1 >= m()) w1 -= m();
                    double pa = 1.0;
                    for (int a = 0; a < n0; ++a) pa *= ws.phi[ws.off(w1, p0[a])];
                    if (pa == 0.0) continue;
                    for (int d2 : ws.band) {
                        int w2 = p1[0] + d2;
                        if (w2 >= m()) w2 -= m();
                        double pb = 1.0;
                        for (int a = 0; a < n1; ++a) pb *= ws.phi[ws.off(w2, p1[a])];
                        if (pb != 0.0) part += pa * pb * tb.r3ab[idx2(m(), w1, w2)];
                    }
                }
            } else { // q = 3, one survivor per slot
                const auto& g3 = g.level(3);
                int i0 = p0[0], i1 = p1[0], i2 = slot_pts[order[2]][0];
                for (int d1 : ws.band) {
                    int w1 = i0 + d1;
                    if (w1 >= m()) w1 -= m();
                    double pa = ws.phi[ws.off(w1, i0)];
                    for (int d2 : ws.band) {
                        int w2 = i1 + d2;
                        if (w2 >= m()) w2 -= m();
                        double pb = pa * ws.phi[ws.off(w2, i1)];
                        for (int d3 : ws.band) {
                            int w3 = i2 + d3;
                            if (w3 >= m()) w3 -= m();
                            part += pb * ws.phi[ws.off(w3, i2)] *
                                    g3[idx3(m(), w1, w2, w3)];
                        }
                    }
                }
            }
            total += part;
        }
        return sign * total;
    }

    /// Full entry: sum over subsets xi of the tuple and omega orders.
    double eval(const int* eta, int n, double h, double eps) const {
        int pts[3];
        for (int a = 0; a < n; ++a) pts[a] = eta[a];
        double omd_n = 1.0;
        for (int a = 0; a < n; ++a) omd_n *= omd;
        double acc = omd_n * g_at(pts, n);

        unsigned full = 1u << n;
        for (unsigned mask = 0; mask < full; ++mask) {
            int xs[3], ys[3];
            int j = 0, q = 0;
            for (int a = 0; a < n; ++a) {
                if ((mask >> a) & 1u) xs[j++] = eta[a];
                else ys[q++] = eta[a];
            }
            double omd_j = 1.0;
            for (int a = 0; a < j; ++a) omd_j *= omd;
            if (omega_max >= 1 && j + 1 <= 3)
                acc += omd_j * zd * h * order1(xs, j, ys, q);
            if (omega_max >= 2 && j + 2 <= 3) {
                double o2 = rescaled ? order2_rescaled(xs, j, ys, q, eps)
                                     : order2_vlasov(xs, j, ys, q);
                acc += omd_j * zd * zd * h * h * 0.5 * o2;
            }
            if (omega_max >= 3 && !rescaled && j == 0)
                acc += zd * zd * zd * h * h * h / 6.0 * order3_vlasov(ys, q);
        }
        return acc;
    }
};

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

GridFunctionFamily contraction_step(const GridFunctionFamily& g, const ScalingRegime& reg,
                                    const Potential& pot, int omega_max, bool rescaled) {
    detail::require_desk_scale(g);
    if (omega_max < 0 || omega_max > (rescaled ? 2 : 3))
        throw std::invalid_argument(rescaled ? "rescaled_step: omega_max must be in [0,2]"
                                             : "vlasov_step: omega_max must be in [0,3]");
    if (!(reg.delta > 0.0 && reg.delta < 1.0))
        throw std::invalid_argument("contraction step: delta must be in (0,1)");

    Workspace ws(g.grid(), pot, rescaled ? reg.eps : 1.0);
    StepTables tb = build_tables(g, ws, rescaled);
    TupleEval ev{g, ws, tb, reg.z * reg.delta, 1.0 - reg.delta, rescaled, omega_max};

    const int m = ws.m;
    const double h = ws.h, eps = reg.eps;
    const int n_max = g.n_max();
    GridFunctionFamily out(g.grid(), n_max);

    {
        int none[1] = {0};
        out.scalar() = ev.eval(none, 0, h, eps);
    }
    if (n_max >= 1) {
        auto& o1 = out.level(1);
        parallel_for(m, [&](std::size_t ii) {
            int eta[1] = {static_cast<int>(ii)};
            o1[ii] = ev.eval(eta, 1, h, eps);
        });
    }
    if (n_max >= 2) {
        auto& o2 = out.level(2);
        parallel_for(m, [&](std::size_t ii) {
            int i = static_cast<int>(ii);
            for (int j = i; j < m; ++j) {
                int eta[2] = {i, j};
                set_sym2(o2, m, i, j, ev.eval(eta, 2, h, eps));
            }
        });
    }
    if (n_max >= 3) {
        auto& o3 = out.level(3);
        parallel_for(m, [&](std::size_t ii) {
            int i = static_cast<int>(ii);
            for (int j = i; j < m; ++j)
                for (int k = j; k < m; ++k) {
                    int eta[3] = {i, j, k};
                    set_sym3(o3, m, i, j, k, ev.eval(eta, 3, h, eps));
                }
        });
    }
    return out;
}

} // namespace

GridFunctionFamily vlasov_step(const GridFunctionFamily& g, const ScalingRegime& reg,
                               const Potential& pot, int omega_max) {
    return contraction_step(g, reg, pot, omega_max, false);
}

GridFunctionFamily rescaled_step(const GridFunctionFamily& g, const ScalingRegime& reg,
                                 const Potential& pot, int omega_max) {
    return contraction_step(g, reg, pot, omega_max, true);
}

} // namespace gvlab
