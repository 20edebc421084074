#include "sqec/blossom.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <stdexcept>

namespace sqec {

namespace {

// Primal-dual blossom matcher for maximum-weight matching on dense graphs,
// 1-indexed, with pseudo-vertex slots n+1..2n for blossoms. Edge weights are
// doubled internally so dual variables stay integral. Minimisation is done
// by the caller through weight reflection; reflected weights are kept
// strictly positive so the maximum-weight matching is forced to be perfect.
struct BlossomMatcher {
    struct Edge {
        int u = 0, v = 0;
        long long w = 0;
    };

    static constexpr long long kInf = std::numeric_limits<long long>::max() / 4;

    int n = 0, n_x = 0;
    std::vector<std::vector<Edge>> g;
    std::vector<long long> lab;
    std::vector<int> match, slack, st, pa, S, vis;
    std::vector<std::vector<int>> flower, flower_from;
    std::deque<int> q;

    explicit BlossomMatcher(const std::vector<std::vector<long long>>& weights) {
        n = static_cast<int>(weights.size());
        const int m = 2 * n + 1;
        g.assign(m, std::vector<Edge>(m));
        lab.assign(m, 0);
        match.assign(m, 0);
        slack.assign(m, 0);
        st.assign(m, 0);
        pa.assign(m, 0);
        S.assign(m, -1);
        vis.assign(m, 0);
        flower.assign(m, {});
        flower_from.assign(m, std::vector<int>(n + 1, 0));

        long long w_max = 0;
        for (int u = 1; u <= n; ++u) {
            st[u] = u;
            flower_from[u][u] = u;
            for (int v = 1; v <= n; ++v) {
                long long w = (u == v) ? 0 : weights[u - 1][v - 1] * 2;
                g[u][v] = Edge{u, v, w};
                w_max = std::max(w_max, w);
            }
        }
        n_x = n;
        for (int u = 1; u <= n; ++u) lab[u] = w_max;
    }

    long long e_delta(const Edge& e) const { return lab[e.u] + lab[e.v] - e.w * 2; }

    void update_slack(int u, int x) {
        if (!slack[x] || e_delta(g[u][x]) < e_delta(g[slack[x]][x])) slack[x] = u;
    }

    void set_slack(int x) {
        slack[x] = 0;
        for (int u = 1; u <= n; ++u)
            if (g[u][x].w > 0 && st[u] != x && S[st[u]] == 0) update_slack(u, x);
    }

    void q_push(int x) {
        if (x <= n) {
            q.push_back(x);
        } else {
            for (int i : flower[x]) q_push(i);
        }
    }

    void set_st(int x, int b) {
        st[x] = b;
        if (x > n)
            for (int i : flower[x]) set_st(i, b);
    }

    int get_pr(int b, int xr) {
        int pr = static_cast<int>(std::find(flower[b].begin(), flower[b].end(), xr) -
                                  flower[b].begin());
        if (pr % 2 == 1) {
            std::reverse(flower[b].begin() + 1, flower[b].end());
            return static_cast<int>(flower[b].size()) - pr;
        }
        return pr;
    }

    void set_match(int u, int v) {
        match[u] = g[u][v].v;
        if (u <= n) return;
        Edge e = g[u][v];
        int xr = flower_from[u][e.u];
        int pr = get_pr(u, xr);
        for (int i = 0; i < pr; ++i) set_match(flower[u][i], flower[u][i ^ 1]);
        set_match(xr, v);
        std::rotate(flower[u].begin(), flower[u].begin() + pr, flower[u].end());
    }

    void augment(int u, int v) {
        int xnv = st[match[u]];
        set_match(u, v);
        if (!xnv) return;
        set_match(xnv, st[pa[xnv]]);
        augment(st[pa[xnv]], xnv);
    }

    int get_lca(int u, int v) {
        static thread_local int t = 0;
        for (++t; u || v; std::swap(u, v)) {
            if (!u) continue;
            if (vis[u] == t) return u;
            vis[u] = t;
            u = st[match[u]];
            if (u) u = st[pa[u]];
        }
        return 0;
    }

    void add_blossom(int u, int lca, int v) {
        int b = n + 1;
        while (b <= n_x && st[b]) ++b;
        if (b > n_x) ++n_x;
        lab[b] = 0;
        S[b] = 0;
        match[b] = match[lca];
        flower[b].clear();
        flower[b].push_back(lca);
        for (int x = u, y; x != lca; x = st[pa[y]]) {
            flower[b].push_back(x);
            flower[b].push_back(y = st[match[x]]);
            q_push(y);
        }
        std::reverse(flower[b].begin() + 1, flower[b].end());
        for (int x = v, y; x != lca; x = st[pa[y]]) {
            flower[b].push_back(x);
            flower[b].push_back(y = st[match[x]]);
            q_push(y);
        }
        set_st(b, b);
        for (int x = 1; x <= n_x; ++x) g[b][x].w = g[x][b].w = 0;
        for (int x = 1; x <= n; ++x) flower_from[b][x] = 0;
        for (int xs : flower[b]) {
            for (int x = 1; x <= n_x; ++x)
                if (g[b][x].w == 0 || e_delta(g[xs][x]) < e_delta(g[b][x])) {
                    g[b][x] = g[xs][x];
                    g[x][b] = g[x][xs];
                }
            for (int x = 1; x <= n; ++x)
                if (flower_from[xs][x]) flower_from[b][x] = xs;
        }
        set_slack(b);
    }

    void expand_blossom(int b) {
        for (int i : flower[b]) set_st(i, i);
        int xr = flower_from[b][g[b][pa[b]].u];
        int pr = get_pr(b, xr);
        for (int i = 0; i < pr; i += 2) {
            int xs = flower[b][i], xns = flower[b][i + 1];
            pa[xs] = g[xns][xs].u;
            S[xs] = 1;
            S[xns] = 0;
            slack[xs] = 0;
            set_slack(xns);
            q_push(xns);
        }
        S[xr] = 1;
        pa[xr] = pa[b];
        for (int i = pr + 1; i < static_cast<int>(flower[b].size()); ++i) {
            int xs = flower[b][i];
            S[xs] = -1;
            set_slack(xs);
        }
        st[b] = 0;
    }

    bool on_found_edge(const Edge& e) {
        int u = st[e.u], v = st[e.v];
        if (S[v] == -1) {
            pa[v] = e.u;
            S[v] = 1;
            int nu = st[match[v]];
            slack[v] = slack[nu] = 0;
            S[nu] = 0;
            q_push(nu);
        } else if (S[v] == 0) {
            int lca = get_lca(u, v);
            if (!lca) {
                augment(u, v);
                augment(v, u);
                return true;
            }
            add_blossom(u, lca, v);
        }
        return false;
    }

    bool matching() {
        std::fill(S.begin(), S.begin() + n_x + 1, -1);
        std::fill(slack.begin(), slack.begin() + n_x + 1, 0);
        q.clear();
        for (int x = 1; x <= n_x; ++x)
            if (st[x] == x && !match[x]) {
                pa[x] = 0;
                S[x] = 0;
                q_push(x);
            }
        if (q.empty()) return false;
        for (;;) {
            while (!q.empty()) {
                int u = q.front();
                q.pop_front();
                if (S[st[u]] == 1) continue;
                for (int v = 1; v <= n; ++v)
                    if (g[u][v].w > 0 && st[u] != st[v]) {
                        if (e_delta(g[u][v]) == 0) {
                            if (on_found_edge(g[u][v])) return true;
                        } else {
                            update_slack(u, st[v]);
                        }
                    }
            }
            long long d = kInf;
            for (int b = n + 1; b <= n_x; ++b)
                if (st[b] == b && S[b] == 1) d = std::min(d, lab[b] / 2);
            for (int x = 1; x <= n_x; ++x)
                if (st[x] == x && slack[x]) {
                    if (S[x] == -1)
                        d = std::min(d, e_delta(g[slack[x]][x]));
                    else if (S[x] == 0)
                        d = std::min(d, e_delta(g[slack[x]][x]) / 2);
                }
            for (int u = 1; u <= n; ++u) {
                if (S[st[u]] == 0) {
                    if (lab[u] <= d) return false;
                    lab[u] -= d;
                } else if (S[st[u]] == 1) {
                    lab[u] += d;
                }
            }
            for (int b = n + 1; b <= n_x; ++b)
                if (st[b] == b) {
                    if (S[b] == 0)
                        lab[b] += d * 2;
                    else if (S[b] == 1)
                        lab[b] -= d * 2;
                }
            q.clear();
            for (int x = 1; x <= n_x; ++x)
                if (st[x] == x && slack[x] && st[slack[x]] != x &&
                    e_delta(g[slack[x]][x]) == 0)
                    if (on_found_edge(g[slack[x]][x])) return true;
            for (int b = n + 1; b <= n_x; ++b)
                if (st[b] == b && S[b] == 1 && lab[b] == 0) expand_blossom(b);
        }
    }
};

}  // namespace

std::vector<int> min_weight_perfect_matching(
    const std::vector<std::vector<long long>>& w) {
    const int n = static_cast<int>(w.size());
    if (n == 0) return {};
    if (n % 2 != 0)
        throw std::invalid_argument("min_weight_perfect_matching: odd vertex count");

    long long w_max = 1;
    for (const auto& row : w)
        for (long long x : row) {
            if (x < 0)
                throw std::invalid_argument("min_weight_perfect_matching: negative weight");
            w_max = std::max(w_max, x);
        }

    // Reflect: maximising (w_max + 1 - w) over perfect matchings minimises w,
    // and keeps every edge weight positive so a perfect matching is optimal.
    std::vector<std::vector<long long>> r(n, std::vector<long long>(n, 0));
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
            if (u != v) r[u][v] = w_max + 1 - w[u][v];

    BlossomMatcher bm(r);
    while (bm.matching()) {
    }

    std::vector<int> mate(n, -1);
    for (int u = 1; u <= n; ++u) {
        if (bm.match[u] == 0)
            throw std::logic_error("min_weight_perfect_matching: matching not perfect");
        mate[u - 1] = bm.match[u] - 1;
    }
    return mate;
}

}  // namespace sqec
