#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "sitesel/ot.hpp"
#include "sitesel/rng.hpp"
#include "sitesel/select.hpp"

using namespace sitesel;
namespace sel = sitesel::select;

namespace {

SiteTable line_table() {
    Matrix m(4, 1);
    for (int i = 0; i < 4; ++i) m(static_cast<std::size_t>(i), 0) = i;
    return SiteTable::from_points(std::move(m));
}

SiteTable gaussian_table(std::uint64_t seed, int n, int d) {
    auto eng = make_engine(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix m(static_cast<std::size_t>(n), static_cast<std::size_t>(d));
    for (double& v : m.data) v = g(eng);
    return SiteTable::from_points(std::move(m));
}

}  // namespace

TEST_SUITE("select") {

TEST_CASE("K = n selects everything with zero objective") {
    auto tab = gaussian_table(derive_seed(0, "sel-kn"), 6, 2);
    for (int p : {1, 2}) {
        auto [s, rep] = sel::select_sites(tab, 6, p, SolveMode::Exact);
        CHECK(s.indices == std::vector<int>{0, 1, 2, 3, 4, 5});
        CHECK(s.objective == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("line instance: K=2 tie-break picks {0,2}") {
    auto tab = line_table();
    auto [s1, r1] = sel::select_sites(tab, 2, 1, SolveMode::Exact);
    CHECK(s1.indices == std::vector<int>{0, 2});
    CHECK(s1.objective == doctest::Approx(0.5));

    auto [s2, r2] = sel::select_sites(tab, 2, 2, SolveMode::Exact);
    CHECK(s2.indices == std::vector<int>{0, 2});
    CHECK(s2.objective == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("input errors") {
    auto tab = line_table();
    CHECK_THROWS_AS(sel::select_sites(tab, 5, 1), InputError);
    CHECK_THROWS_AS(sel::select_sites(tab, 0, 1), InputError);
    CHECK_THROWS_AS(sel::select_sites(tab, 2, 3), InputError);
    CHECK_THROWS_AS(sel::enumerate_oracle(gaussian_table(1, 40, 1), 20, 1), GuardError);
}

TEST_CASE("enumerate_oracle basics") {
    auto single = gaussian_table(derive_seed(0, "sel-single"), 1, 2);
    auto s = sel::enumerate_oracle(single, 1, 1);
    CHECK(s.indices == std::vector<int>{0});
    CHECK(s.objective == doctest::Approx(0.0));

    auto line = line_table();
    auto sl = sel::enumerate_oracle(line, 2, 1);
    CHECK(sl.indices == std::vector<int>{0, 2});
    CHECK(sl.objective == doctest::Approx(0.5));

    auto cloud = gaussian_table(derive_seed(0, "sel-cloud6"), 6, 2);
    auto so = sel::enumerate_oracle(cloud, 2, 1);
    auto [sx, rep] = sel::select_sites(cloud, 2, 1, SolveMode::Exact);
    CHECK(so.indices == sx.indices);
    CHECK(so.objective == doctest::Approx(sx.objective));
}

TEST_CASE("exact mode equals enumeration oracle on seeded instances") {
    auto eng = make_engine(derive_seed(0, "sel-sweep"));
    std::uniform_int_distribution<int> nd(4, 12), kd(2, 5), dd(1, 3);
    for (int trial = 0; trial < 20; ++trial) {
        int n = nd(eng);
        int k = std::min(kd(eng), n);
        int d = dd(eng);
        int p = trial % 2 == 0 ? 1 : 2;
        auto tab = gaussian_table(derive_seed(7, "sel-sweep-tab", trial), n, d);
        auto oracle = sel::enumerate_oracle(tab, k, p);
        auto [exact, rep] = sel::select_sites(tab, k, p, SolveMode::Exact);
        CHECK(std::abs(exact.objective - oracle.objective) <= 1e-7);
        CHECK(exact.indices == oracle.indices);
        CHECK(rep.optimal);
    }
}

TEST_CASE("objective is non-increasing in K") {
    auto tab = gaussian_table(derive_seed(0, "sel-monok"), 9, 2);
    for (int p : {1, 2}) {
        double prev = std::numeric_limits<double>::infinity();
        for (int k = 1; k <= 9; ++k) {
            auto [s, rep] = sel::select_sites(tab, k, p, SolveMode::Exact);
            CHECK(s.objective <= prev + 1e-8);
            prev = s.objective;
        }
    }
}

TEST_CASE("relaxation lower-bounds the exact objective") {
    auto eng = make_engine(derive_seed(0, "sel-relax"));
    for (int trial = 0; trial < 10; ++trial) {
        int n = 6 + static_cast<int>(eng() % 6);
        int k = 2 + static_cast<int>(eng() % 3);
        int p = trial % 2 == 0 ? 1 : 2;
        auto tab = gaussian_table(derive_seed(3, "sel-relax-tab", trial), n, 2);
        auto [exact, rep] = sel::select_sites(tab, k, p, SolveMode::Exact);
        REQUIRE(rep.relaxation_objective.has_value());
        CHECK(*rep.relaxation_objective <= exact.objective + 1e-8);

        auto [scores, rounded] = sel::lp_relax_and_round(tab, k, p);
        CHECK(rounded.objective >= *rep.relaxation_objective - 1e-8);
        CHECK(rounded.objective + 1e-12 >= exact.objective);
    }
}

TEST_CASE("lp_relax_and_round: K = n is the identity") {
    auto tab = gaussian_table(derive_seed(0, "sel-relax-kn"), 5, 2);
    auto [scores, rounded] = sel::lp_relax_and_round(tab, 5, 2);
    for (double s : scores) CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rounded.indices == std::vector<int>{0, 1, 2, 3, 4});
}

TEST_CASE("relaxed mode reports a bound and the true rounded objective") {
    auto tab = gaussian_table(derive_seed(0, "sel-relaxmode"), 14, 2);
    auto [s, rep] = sel::select_sites(tab, 4, 2, SolveMode::Relaxed);
    REQUIRE(rep.relaxation_objective.has_value());
    CHECK(s.objective >= *rep.relaxation_objective - 1e-8);
    CHECK(rep.mode == "relaxed+rounded");
    // The reported objective must be the recomputed W_p of the rounding.
    auto pop = DiscreteDistribution::uniform(tab.size());
    auto ssel = DiscreteDistribution::uniform_on(s.indices);
    CHECK(s.objective ==
          doctest::Approx(sitesel::ot::wasserstein(pop, ssel, tab, 2)).epsilon(1e-10));
}

}  // TEST_SUITE
