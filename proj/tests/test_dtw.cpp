#include <doctest.h>

#include <random>
#include <sstream>

#include "edgenilm/dtw.hpp"
#include "edgenilm/error.hpp"
#include "oracles.hpp"

using namespace edgenilm;

namespace {

double path_cost(const std::vector<std::pair<std::size_t, std::size_t>>& path,
                 const std::vector<double>& x, const std::vector<double>& y) {
    double c = 0.0;
    for (const auto& [i, j] : path) c += std::abs(x[i] - y[j]);
    return c;
}

}  // namespace

TEST_CASE("worked examples") {
    const std::vector<double> a{1, 2, 3};
    const auto self = dtw_distance(a, a);
    CHECK(self.distance == 0.0);
    CHECK(self.path == std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}, {1, 1}, {2, 2}});
    CHECK(dtw_distance(std::vector<double>{0}, std::vector<double>{5}).distance == 5.0);
    CHECK(dtw_distance(a, std::vector<double>{1, 2, 2, 3}).distance == 0.0);
    CHECK_THROWS_AS(dtw_distance(std::vector<double>{}, a), DomainError);
}

TEST_CASE("matches exhaustive path enumeration and returns a valid optimal path") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> len(1, 5), val(0, 4);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<int> xi(static_cast<std::size_t>(len(rng))), yi(static_cast<std::size_t>(len(rng)));
        for (auto& v : xi) v = val(rng);
        for (auto& v : yi) v = val(rng);
        const std::vector<double> x(xi.begin(), xi.end()), y(yi.begin(), yi.end());
        const auto r = dtw_distance(x, y);
        CHECK(r.distance == static_cast<double>(oracle::enumerate_dtw(xi, yi)));
        CHECK(dtw_cost(x, y) == r.distance);
        const auto paths = oracle::all_paths(x.size(), y.size());
        CHECK(std::find(paths.begin(), paths.end(), r.path) != paths.end());
        CHECK(path_cost(r.path, x, y) == r.distance);
    }
}

TEST_CASE("band and squared cost") {
    const std::vector<double> x{0, 0, 0, 5}, y{0, 5, 5, 5};
    CHECK(dtw_cost(x, y) == 0.0);
    DtwOptions narrow;
    narrow.band = 0;
    CHECK(dtw_cost(x, y, narrow) == 10.0);
    CHECK(dtw_distance(x, y, narrow).distance == 10.0);
    DtwOptions sq;
    sq.cost = LocalCost::squared;
    CHECK(dtw_cost(std::vector<double>{0}, std::vector<double>{3}, sq) == 9.0);
}

TEST_CASE("table export and memory accounting") {
    const auto t = dtw_table(std::vector<double>{1, 2}, std::vector<double>{1, 3, 2});
    CHECK(t.rows == 2);
    CHECK(t.cols == 3);
    CHECK(t.at(0, 0) == 0.0);
    CHECK(t.at(1, 2) == 1.0);
    std::ostringstream os;
    t.write_csv(os);
    CHECK(os.str().find('\n') != std::string::npos);
    CHECK(dtw_table_bytes(128, 128) == 128 * 128 * sizeof(double));
    CHECK(dtw_rolling_bytes(128) == 2 * 128 * sizeof(double));
}
