#include <random>

#include "cag/error.hpp"
#include "cag/kernels.hpp"
#include "doctest.h"

using namespace cag::kernels;

namespace {

Matrix random_matrix(std::mt19937& rng, std::size_t rows, std::size_t cols) {
    std::normal_distribution<double> n(0, 1);
    Matrix m{rows, cols, {}};
    for (std::size_t i = 0; i < rows * cols; ++i) m.data.push_back(n(rng));
    return m;
}

}  // namespace

TEST_CASE("cosine handles identity, opposition and zero vectors") {
    const std::vector<double> a = {1, 2, 3}, b = {-1, -2, -3}, z = {0, 0, 0};
    CHECK(cosine(a, a) == 1.0);
    CHECK(cosine(a, b) == -1.0);
    CHECK(cosine(a, z) == 0.0);
    CHECK(cosine(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == 0.0);
}

TEST_CASE("serial and parallel kernels agree exactly") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = random_matrix(rng, 1 + rng() % 12, 16);
        const auto b = random_matrix(rng, 1 + rng() % 40, 16);
        CHECK(serial::cosine_matrix(a, b).data == parallel::cosine_matrix(a, b).data);
        const auto s = serial::max_cosine(a, b);
        const auto p = parallel::max_cosine(a, b);
        CHECK(s.value == p.value);
        CHECK(s.row == p.row);
        CHECK(s.col == p.col);

        std::vector<double> values;
        for (int i = 0; i < 5 * 30; ++i) values.push_back(double(rng() % 4));
        CHECK(serial::rank_groups_desc(values, 5) == parallel::rank_groups_desc(values, 5));
        auto fn = [&](std::size_t i) { return std::sqrt(double(i)) * values[i % values.size()]; };
        CHECK(serial::map_indices(200, fn) == parallel::map_indices(200, fn));
    }
}

TEST_CASE("max_cosine breaks ties toward the first pair") {
    Matrix a{2, 2, {1, 0, 1, 0}};
    Matrix b{2, 2, {0, 1, 1, 0}};
    for (auto r : {serial::max_cosine(a, b), parallel::max_cosine(a, b)}) {
        CHECK(r.value == 1.0);
        CHECK(r.row == 0);
        CHECK(r.col == 1);
    }
    CHECK_THROWS_AS(serial::max_cosine(Matrix{0, 2, {}}, b), cag::PreconditionError);
    CHECK_THROWS_AS(parallel::cosine_matrix(Matrix{1, 3, {1, 2, 3}}, b), cag::ProviderError);
}

TEST_CASE("parallel map propagates exceptions") {
    CHECK_THROWS_AS(parallel::map_indices(100,
                                          [](std::size_t i) -> double {
                                              if (i == 37) throw cag::ValidationError("boom");
                                              return 0.0;
                                          }),
                    cag::ValidationError);
}

TEST_CASE("grouped ranks use fractional ties") {
    const std::vector<double> v = {15, 10, 5, 10, 10, 1};
    CHECK(serial::rank_groups_desc(v, 3) == std::vector<double>{1, 2, 3, 1.5, 1.5, 3});
    CHECK_THROWS_AS(serial::rank_groups_desc(v, 4), cag::PreconditionError);
}
