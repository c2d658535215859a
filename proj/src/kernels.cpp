#include "cag/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cag/error.hpp"

namespace cag::kernels {

Matrix stack(const std::vector<EmbeddingVector>& vectors) {
    Matrix m;
    m.rows = vectors.size();
    m.cols = vectors.empty() ? 0 : vectors.front().dimension();
    m.data.reserve(m.rows * m.cols);
    for (const auto& v : vectors) {
        if (v.dimension() != m.cols) throw ProviderError("embedding dimension mismatch", false);
        m.data.insert(m.data.end(), v.values.begin(), v.values.end());
    }
    return m;
}

double cosine(std::span<const double> a, std::span<const double> b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        dot += a[k] * b[k];
        na += a[k] * a[k];
        nb += b[k] * b[k];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / std::sqrt(na * nb);
}

namespace {

void check_cols(const Matrix& a, const Matrix& b) {
    if (a.cols != b.cols) throw ProviderError("embedding dimension mismatch", false);
}

// Ascending (value desc, index asc) order; ties get the mean of their ranks.
void rank_one_group(const double* values, double* out, std::size_t n) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return values[x] > values[y]; });
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) out[order[k]] = r;
        i = j + 1;
    }
}

bool better(const MaxPair& x, const MaxPair& y) {
    if (x.value != y.value) return x.value > y.value;
    if (x.row != y.row) return x.row < y.row;
    return x.col < y.col;
}

}  // namespace

namespace serial {

Matrix cosine_matrix(const Matrix& a, const Matrix& b) {
    check_cols(a, b);
    Matrix out{a.rows, b.rows, std::vector<double>(a.rows * b.rows)};
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < b.rows; ++j) out.data[i * b.rows + j] = cosine(a.row(i), b.row(j));
    return out;
}

MaxPair max_cosine(const Matrix& a, const Matrix& b) {
    check_cols(a, b);
    if (a.rows == 0 || b.rows == 0) throw PreconditionError("max_cosine: empty input");
    MaxPair best{cosine(a.row(0), b.row(0)), 0, 0};
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < b.rows; ++j) {
            const double v = cosine(a.row(i), b.row(j));
            if (v > best.value) best = {v, i, j};
        }
    return best;
}

std::vector<double> map_indices(std::size_t n, const std::function<double(std::size_t)>& fn) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
}

std::vector<double> rank_groups_desc(std::span<const double> values, std::size_t group_size) {
    if (group_size == 0 || values.size() % group_size != 0)
        throw PreconditionError("rank_groups_desc: values not a whole number of groups");
    std::vector<double> out(values.size());
    for (std::size_t g = 0; g < values.size() / group_size; ++g)
        rank_one_group(values.data() + g * group_size, out.data() + g * group_size, group_size);
    return out;
}

}  // namespace serial

namespace parallel {

Matrix cosine_matrix(const Matrix& a, const Matrix& b) {
    check_cols(a, b);
    Matrix out{a.rows, b.rows, std::vector<double>(a.rows * b.rows)};
    const auto rows = static_cast<std::ptrdiff_t>(a.rows);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < b.rows; ++j)
            out.data[static_cast<std::size_t>(i) * b.rows + j] =
                cosine(a.row(static_cast<std::size_t>(i)), b.row(j));
    return out;
}

MaxPair max_cosine(const Matrix& a, const Matrix& b) {
    check_cols(a, b);
    if (a.rows == 0 || b.rows == 0) throw PreconditionError("max_cosine: empty input");
    MaxPair best{cosine(a.row(0), b.row(0)), 0, 0};
    const auto rows = static_cast<std::ptrdiff_t>(a.rows);
#pragma omp parallel
    {
        MaxPair local = best;
#pragma omp for schedule(static) nowait
        for (std::ptrdiff_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < b.rows; ++j) {
                const MaxPair cand{cosine(a.row(static_cast<std::size_t>(i)), b.row(j)),
                                   static_cast<std::size_t>(i), j};
                if (better(cand, local)) local = cand;
            }
#pragma omp critical
        if (better(local, best)) best = local;
    }
    return best;
}

std::vector<double> map_indices(std::size_t n, const std::function<double(std::size_t)>& fn) {
    std::vector<double> out(n);
    std::exception_ptr error;
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        try {
            out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    return out;
}

std::vector<double> rank_groups_desc(std::span<const double> values, std::size_t group_size) {
    if (group_size == 0 || values.size() % group_size != 0)
        throw PreconditionError("rank_groups_desc: values not a whole number of groups");
    std::vector<double> out(values.size());
    const auto groups = static_cast<std::ptrdiff_t>(values.size() / group_size);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t g = 0; g < groups; ++g)
        rank_one_group(values.data() + g * group_size, out.data() + g * group_size, group_size);
    return out;
}

}  // namespace parallel

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace cag::kernels
