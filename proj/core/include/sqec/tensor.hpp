#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace sqec {

// Dense (batch, channels, depth, height, width) tensor of doubles.
struct Tensor {
    int n = 0, c = 0, d = 0, h = 0, w = 0;
    std::vector<double> v;

    Tensor() = default;
    Tensor(int n_, int c_, int d_, int h_, int w_)
        : n(n_), c(c_), d(d_), h(h_), w(w_),
          v(static_cast<std::size_t>(n_) * c_ * d_ * h_ * w_, 0.0) {
        if (n_ < 1 || c_ < 1 || d_ < 1 || h_ < 1 || w_ < 1)
            throw std::invalid_argument("Tensor: non-positive dimension");
    }

    std::size_t index(int ni, int ci, int di, int hi, int wi) const {
        return ((((static_cast<std::size_t>(ni) * c + ci) * d + di) * h + hi) * w) + wi;
    }
    double& at(int ni, int ci, int di, int hi, int wi) { return v[index(ni, ci, di, hi, wi)]; }
    double at(int ni, int ci, int di, int hi, int wi) const { return v[index(ni, ci, di, hi, wi)]; }

    std::size_t size() const { return v.size(); }
    std::size_t sample_size() const { return v.size() / static_cast<std::size_t>(n); }
    const double* sample(int ni) const { return v.data() + sample_size() * ni; }
    double* sample(int ni) { return v.data() + sample_size() * ni; }

    bool same_shape(const Tensor& o) const {
        return n == o.n && c == o.c && d == o.d && h == o.h && w == o.w;
    }
    bool finite() const;
};

}  // namespace sqec
