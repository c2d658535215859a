#pragma once

// Data-parallel inner loops. Each kernel has a serial reference and an
// OpenMP version; the two produce bit-identical results (every output
// element is computed by the same expression, only the loop is split).

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cag/providers.hpp"

namespace cag::kernels {

// Row-major dense matrix.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

// Stacks embeddings into a matrix; throws on dimension mismatch.
Matrix stack(const std::vector<EmbeddingVector>& vectors);

// dot(a, b) / sqrt(|a|^2 |b|^2); 0 when either vector is zero.
double cosine(std::span<const double> a, std::span<const double> b);

namespace serial {
Matrix cosine_matrix(const Matrix& a, const Matrix& b);
}
namespace parallel {
Matrix cosine_matrix(const Matrix& a, const Matrix& b);
}

struct MaxPair {
    double value = 0.0;
    std::size_t row = 0;
    std::size_t col = 0;
};

// Largest cosine over all (row of a, row of b) pairs; ties resolve to the
// first pair in row-major order. Requires non-empty inputs.
namespace serial {
MaxPair max_cosine(const Matrix& a, const Matrix& b);
}
namespace parallel {
MaxPair max_cosine(const Matrix& a, const Matrix& b);
}

// Applies fn to every index and stores the result, e.g. one metric per
// (candidate, reference) pair.
namespace serial {
std::vector<double> map_indices(std::size_t n, const std::function<double(std::size_t)>& fn);
}
namespace parallel {
std::vector<double> map_indices(std::size_t n, const std::function<double(std::size_t)>& fn);
}

// Fractional ranks (1 = largest value) for many independent groups laid
// out contiguously with `group_size` entries each.
namespace serial {
std::vector<double> rank_groups_desc(std::span<const double> values, std::size_t group_size);
}
namespace parallel {
std::vector<double> rank_groups_desc(std::span<const double> values, std::size_t group_size);
}

int max_threads();

}  // namespace cag::kernels
