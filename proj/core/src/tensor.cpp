#include "sqec/tensor.hpp"

#include <cmath>

namespace sqec {

bool Tensor::finite() const {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace sqec
