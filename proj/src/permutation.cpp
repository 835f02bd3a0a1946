#include "flowlab/permutation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <sstream>

#include "flowlab/errors.hpp"

namespace flowlab {

Permutation::Permutation(std::vector<int> top, std::vector<int> bottom)
    : d_(static_cast<int>(top.size())), top_(std::move(top)), bottom_(std::move(bottom)) {
    if (d_ < 2 || bottom_.size() != static_cast<size_t>(d_))
        throw ConfigInvalid("permutation rows must have equal size >= 2");
    top_pos_.assign(d_, -1);
    bottom_pos_.assign(d_, -1);
    for (int i = 0; i < d_; ++i) {
        int a = top_[i], b = bottom_[i];
        if (a < 0 || a >= d_ || b < 0 || b >= d_ || top_pos_[a] != -1 || bottom_pos_[b] != -1)
            throw ConfigInvalid("permutation rows must be bijections onto the alphabet");
        top_pos_[a] = i;
        bottom_pos_[b] = i;
    }
}

namespace {

std::vector<std::string> tokens(const std::string& row) {
    std::istringstream is(row);
    std::vector<std::string> out;
    std::string t;
    while (is >> t) out.push_back(t);
    return out;
}

}  // namespace

Permutation Permutation::parse(const std::string& top_row, const std::string& bottom_row) {
    auto tt = tokens(top_row), bt = tokens(bottom_row);
    if (tt.size() != bt.size() || tt.empty())
        throw ConfigInvalid("permutation rows must list the same letters");
    // letters are named by their order of appearance in the top row
    std::vector<int> top(tt.size()), bottom(bt.size());
    for (size_t i = 0; i < tt.size(); ++i) top[i] = static_cast<int>(i);
    for (size_t i = 0; i < bt.size(); ++i) {
        auto it = std::find(tt.begin(), tt.end(), bt[i]);
        if (it == tt.end()) throw ConfigInvalid("bottom row letter missing from top row: " + bt[i]);
        bottom[i] = static_cast<int>(it - tt.begin());
    }
    return Permutation(top, bottom);
}

Permutation Permutation::symmetric(int d) {
    std::vector<int> top(d), bottom(d);
    std::iota(top.begin(), top.end(), 0);
    for (int i = 0; i < d; ++i) bottom[i] = d - 1 - i;
    return Permutation(top, bottom);
}

bool Permutation::irreducible() const {
    // prefix test: letters in top positions <= k vs bottom positions <= k
    std::vector<char> in_top(d_, 0), in_bottom(d_, 0);
    for (int k = 0; k + 1 < d_; ++k) {
        in_top[top_[k]] = 1;
        in_bottom[bottom_[k]] = 1;
        if (std::equal(in_top.begin(), in_top.end(), in_bottom.begin())) return false;
    }
    return true;
}

std::vector<std::vector<long long>> Permutation::intersection_matrix() const {
    std::vector<std::vector<long long>> omega(d_, std::vector<long long>(d_, 0));
    for (int a = 0; a < d_; ++a)
        for (int b = 0; b < d_; ++b) {
            if (a == b) continue;
            bool top_before = top_pos_[b] < top_pos_[a];
            bool bottom_before = bottom_pos_[b] < bottom_pos_[a];
            if (top_before && !bottom_before) omega[a][b] = 1;
            if (!top_before && bottom_before) omega[a][b] = -1;
        }
    return omega;
}

int Permutation::omega_rank() const {
    auto om = intersection_matrix();
    Eigen::MatrixXd m(d_, d_);
    for (int i = 0; i < d_; ++i)
        for (int j = 0; j < d_; ++j) m(i, j) = static_cast<double>(om[i][j]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    lu.setThreshold(1e-9);
    return static_cast<int>(lu.rank());
}

std::string Permutation::to_text() const {
    auto name = [](int a) {
        std::string s;
        if (a < 26) s.push_back(static_cast<char>('a' + a));
        else s = "a" + std::to_string(a);
        return s;
    };
    std::string out;
    for (int i = 0; i < d_; ++i) out += (i ? " " : "") + name(top_[i]);
    out += "\n";
    for (int i = 0; i < d_; ++i) out += (i ? " " : "") + name(bottom_[i]);
    return out;
}

StratumInfo genus_and_stratum(const Permutation& p) {
    if (!p.irreducible()) throw ReduciblePermutation();
    const int d = p.size();

    // Suspension polygon with the canonical datum tau_a = bot_pos - top_pos.
    // Top path V_0..V_d (edge j carries letter top[j-1]); bottom path W_0..W_d.
    // Gluing translates the top edge of each letter onto its bottom edge, so
    // polygon vertices identify pairwise: V_{t-1}~W_{b-1} and V_t~W_b, where
    // t,b are the 1-based endpoint indices of the letter's edges.  Vertex
    // classes do not depend on tau; the cone angles are read off numerically.
    using cplx = std::complex<double>;
    std::vector<cplx> zeta(d);
    for (int a = 0; a < d; ++a) {
        double tau = static_cast<double>(p.bottom_position(a) - p.top_position(a));
        zeta[a] = cplx(1.0, tau);  // unit lengths suffice for angle counting
    }
    std::vector<cplx> V(d + 1), W(d + 1);
    V[0] = W[0] = cplx(0, 0);
    for (int j = 1; j <= d; ++j) {
        V[j] = V[j - 1] + zeta[p.top()[j - 1]];
        W[j] = W[j - 1] + zeta[p.bottom()[j - 1]];
    }

    // union-find over the 2(d+1) polygon vertices; node v_j = j, w_j = d+1+j
    std::vector<int> parent(2 * (d + 1));
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto unite = [&](int a, int b) { parent[find(a)] = find(b); };
    auto vn = [&](int j) { return j; };
    auto wn = [&](int j) { return d + 1 + j; };
    unite(vn(0), wn(0));
    unite(vn(d), wn(d));
    for (int a = 0; a < d; ++a) {
        int t = p.top_position(a) + 1, b = p.bottom_position(a) + 1;
        unite(vn(t - 1), wn(b - 1));
        unite(vn(t), wn(b));
    }

    // Interior angle at each polygon vertex, boundary oriented counterclockwise:
    // bottom path left to right, then top path right to left.
    const int n = 2 * d;  // boundary vertex count (corners V_0/W_0 and V_d/W_d shared)
    std::vector<cplx> poly(n);
    std::vector<int> node(n);
    for (int j = 0; j < d; ++j) {
        poly[j] = W[j];
        node[j] = wn(j);
    }
    for (int j = 0; j < d; ++j) {
        poly[d + j] = V[d - j];
        node[d + j] = vn(d - j);
    }
    const double two_pi = 2.0 * M_PI;
    std::vector<double> angle_sum(2 * (d + 1), 0.0);
    for (int i = 0; i < n; ++i) {
        cplx prev = poly[(i + n - 1) % n], cur = poly[i], next = poly[(i + 1) % n];
        double a = std::arg((prev - cur) / (next - cur));
        if (a <= 0) a += two_pi;  // interior angle in (0, 2*pi)
        angle_sum[find(node[i])] += a;
    }

    StratumInfo info;
    std::vector<int> orders;
    for (int r = 0; r < 2 * (d + 1); ++r) {
        if (find(r) != r || angle_sum[r] == 0.0) continue;
        double turns = angle_sum[r] / two_pi;
        int k = static_cast<int>(std::lround(turns)) - 1;
        if (std::abs(turns - std::lround(turns)) > 1e-6 || k < 0)
            throw Error("cone angle not a positive multiple of 2*pi");
        orders.push_back(k);
    }
    std::sort(orders.rbegin(), orders.rend());
    info.singularities = static_cast<int>(orders.size());
    int total = 0;
    for (int k : orders) {
        total += k;
        if (k > 0) info.kappa.push_back(k);
        else ++info.marked_points;
    }
    if (total % 2 != 0) throw Error("odd total cone order");
    info.genus = total / 2 + 1;
    return info;
}

}  // namespace flowlab
