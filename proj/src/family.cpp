#include "gvlab/family.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace gvlab {

namespace {

std::size_t pow_size(int m, int n) {
    std::size_t s = 1;
    for (int i = 0; i < n; ++i) {
        if (s > (std::size_t(1) << 40) / m)
            throw std::invalid_argument("GridFunctionFamily: level tensor too large");
        s *= m;
    }
    return s;
}

/// Iterate all index tuples of length n over [0, M); fn gets the tuple and
/// its flat index.
template <typename Fn>
void for_each_tuple(int m, int n, Fn&& fn) {
    std::vector<int> idx(n, 0);
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) total *= m;
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rest = flat;
        for (int i = n - 1; i >= 0; --i) {
            idx[i] = rest % m;
            rest /= m;
        }
        fn(idx, flat);
    }
}

} // namespace

GridFunctionFamily::GridFunctionFamily(GridSpec grid, int n_max) : grid_(grid), n_max_(n_max) {
    grid_.validate();
    if (n_max_ < 0) throw std::invalid_argument("GridFunctionFamily: n_max must be >= 0");
    levels_.resize(n_max_ + 1);
    for (int n = 0; n <= n_max_; ++n) levels_[n].assign(pow_size(grid_.points, n), 0.0);
}

std::size_t GridFunctionFamily::index(const std::vector<int>& idx) const {
    std::size_t flat = 0;
    for (int i : idx) flat = flat * grid_.points + i;
    return flat;
}

double GridFunctionFamily::value(const std::vector<int>& idx) const {
    return levels_[idx.size()][index(idx)];
}

void GridFunctionFamily::symmetrize() {
    for (int n = 2; n <= n_max_; ++n) {
        auto& lv = levels_[n];
        for_each_tuple(grid_.points, n, [&](std::vector<int>& idx, std::size_t flat) {
            if (!std::is_sorted(idx.begin(), idx.end())) return; // canonical reps only
            std::vector<int> perm = idx;
            double sum = 0.0;
            std::size_t count = 0;
            do {
                sum += lv[index(perm)];
                ++count;
            } while (std::next_permutation(perm.begin(), perm.end()));
            double avg = sum / count;
            perm = idx;
            do {
                lv[index(perm)] = avg;
            } while (std::next_permutation(perm.begin(), perm.end()));
            (void)flat;
        });
    }
}

double GridFunctionFamily::symmetry_defect() const {
    double worst = 0.0;
    for (int n = 2; n <= n_max_; ++n) {
        const auto& lv = levels_[n];
        for_each_tuple(grid_.points, n, [&](std::vector<int>& idx, std::size_t flat) {
            std::vector<int> sorted = idx;
            std::sort(sorted.begin(), sorted.end());
            worst = std::max(worst, std::fabs(lv[flat] - lv[index(sorted)]));
        });
    }
    return worst;
}

bool GridFunctionFamily::same_shape(const GridFunctionFamily& other) const {
    return grid_ == other.grid_ && n_max_ == other.n_max_;
}

GridFunctionFamily& GridFunctionFamily::operator+=(const GridFunctionFamily& other) {
    if (!same_shape(other)) throw std::invalid_argument("family shape mismatch");
    for (int n = 0; n <= n_max_; ++n)
        for (std::size_t i = 0; i < levels_[n].size(); ++i) levels_[n][i] += other.levels_[n][i];
    return *this;
}

GridFunctionFamily& GridFunctionFamily::operator*=(double a) {
    for (auto& lv : levels_)
        for (double& v : lv) v *= a;
    return *this;
}

GridFunctionFamily operator+(GridFunctionFamily a, const GridFunctionFamily& b) { return a += b; }

GridFunctionFamily operator-(GridFunctionFamily a, const GridFunctionFamily& b) {
    GridFunctionFamily nb = b;
    nb *= -1.0;
    return a += nb;
}

GridFunctionFamily operator*(double a, GridFunctionFamily f) { return f *= a; }

GridFunctionFamily e_lambda(const GridSpec& grid, int n_max,
                            const std::vector<double>& node_values) {
    if (static_cast<int>(node_values.size()) != grid.points)
        throw std::invalid_argument("e_lambda: node_values size mismatch");
    GridFunctionFamily out(grid, n_max);
    out.scalar() = 1.0;
    for (int n = 1; n <= n_max; ++n) {
        auto& lv = out.level(n);
        if (n == 1) {
            lv = node_values;
            continue;
        }
        const auto& prev = out.level(n - 1);
        std::size_t stride = prev.size();
        for (std::size_t a = 0; a < stride; ++a)
            for (int i = 0; i < grid.points; ++i) lv[a * grid.points + i] = prev[a] * node_values[i];
    }
    return out;
}

GridFunctionFamily e_lambda(const GridSpec& grid, int n_max,
                            const std::function<double(double)>& f) {
    std::vector<double> vals(grid.points);
    for (int i = 0; i < grid.points; ++i) vals[i] = f(grid.node(i));
    return e_lambda(grid, n_max, vals);
}

GridFunctionFamily indicator_empty(const GridSpec& grid, int n_max) {
    GridFunctionFamily out(grid, n_max);
    out.scalar() = 1.0;
    return out;
}

GridFunctionFamily indicator_singletons(const GridSpec& grid, int n_max) {
    GridFunctionFamily out(grid, n_max);
    if (n_max >= 1) std::fill(out.level(1).begin(), out.level(1).end(), 1.0);
    return out;
}

GridFunctionFamily random_family_balanced(const GridSpec& grid, int n_max, double c, Rng& rng) {
    GridFunctionFamily out(grid, n_max);
    double h = grid.step();
    for (int n = 0; n <= n_max; ++n)
        for (double& v : out.level(n)) v = 2.0 * rng.uniform() - 1.0;
    out.symmetrize();
    double fact = 1.0, cn = 1.0, hn = 1.0;
    for (int n = 0; n <= n_max; ++n) {
        if (n > 0) {
            fact *= n;
            cn *= c;
            hn *= h;
        }
        auto& lv = out.level(n);
        double mass = 0.0;
        for (double v : lv) mass += std::fabs(v);
        double contrib = cn / fact * hn * mass;
        if (contrib > 0.0)
            for (double& v : lv) v /= contrib;
    }
    return out;
}

GridFunctionFamily random_family_sup_scaled(const GridSpec& grid, int n_max, double bound,
                                            Rng& rng) {
    GridFunctionFamily out(grid, n_max);
    double bn = 1.0;
    for (int n = 0; n <= n_max; ++n) {
        for (double& v : out.level(n)) v = bn * (2.0 * rng.uniform() - 1.0);
        bn *= bound;
    }
    out.symmetrize();
    return out;
}

//============================================================
// Serialization: CSV per level + JSON sidecar
//============================================================

void save_family(const GridFunctionFamily& f, const std::string& stem) {
    nlohmann::json meta;
    meta["n_max"] = f.n_max();
    meta["grid_points"] = f.grid().points;
    meta["box_length"] = f.grid().box_length;
    std::ofstream ms(stem + "_meta.json");
    if (!ms) throw std::runtime_error("save_family: cannot open " + stem + "_meta.json");
    ms << meta.dump(2) << "\n";

    for (int n = 0; n <= f.n_max(); ++n) {
        std::ofstream cs(stem + "_level" + std::to_string(n) + ".csv");
        if (!cs) throw std::runtime_error("save_family: cannot open level file");
        cs << "n";
        for (int i = 1; i <= n; ++i) cs << ",i" << i;
        cs << ",value\n";
        const auto& lv = f.level(n);
        std::vector<int> idx(n, 0);
        char buf[40];
        for (std::size_t flat = 0; flat < lv.size(); ++flat) {
            std::size_t rest = flat;
            for (int i = n - 1; i >= 0; --i) {
                idx[i] = rest % f.grid().points;
                rest /= f.grid().points;
            }
            cs << n;
            for (int i = 0; i < n; ++i) cs << ',' << idx[i];
            std::snprintf(buf, sizeof buf, "%.17g", lv[flat]);
            cs << ',' << buf << '\n';
        }
    }
}

GridFunctionFamily load_family(const std::string& stem) {
    std::ifstream ms(stem + "_meta.json");
    if (!ms) throw std::runtime_error("load_family: cannot open " + stem + "_meta.json");
    nlohmann::json meta = nlohmann::json::parse(ms);
    GridSpec grid{meta.at("grid_points").get<int>(), meta.at("box_length").get<double>()};
    GridFunctionFamily out(grid, meta.at("n_max").get<int>());

    for (int n = 0; n <= out.n_max(); ++n) {
        std::ifstream cs(stem + "_level" + std::to_string(n) + ".csv");
        if (!cs) throw std::runtime_error("load_family: missing level file");
        std::string line;
        std::getline(cs, line); // header
        auto& lv = out.level(n);
        std::vector<int> idx(n);
        while (std::getline(cs, line)) {
            if (line.empty()) continue;
            std::stringstream ss(line);
            std::string cell;
            std::getline(ss, cell, ','); // level tag
            for (int i = 0; i < n; ++i) {
                std::getline(ss, cell, ',');
                idx[i] = std::stoi(cell);
            }
            std::getline(ss, cell, ',');
            lv[out.index(idx)] = std::stod(cell);
        }
    }
    return out;
}

} // namespace gvlab
