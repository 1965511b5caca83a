#include "opdyn/random.hpp"

namespace opdyn {

FiniteMatrix random_matrix(std::uint64_t seed, Index lo, Index hi, bool unit_norm) {
    std::mt19937_64 gen(seed);
    FiniteMatrix a;
    for (Index i = lo; i <= hi; ++i)
        for (Index j = lo; j <= hi; ++j) a.set(i, j, uniform(gen, -1.0, 1.0));
    if (unit_norm && !a.empty()) a *= 1.0 / op_norm(a);
    return a;
}

}  // namespace opdyn
