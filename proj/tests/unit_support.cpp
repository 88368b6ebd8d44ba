#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "motility/csv.hpp"
#include "motility/errors.hpp"
#include "motility/quadrature.hpp"
#include "motility/tridiag.hpp"

using namespace motility;

namespace {

std::filesystem::path tmp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_SUITE("support") {

TEST_CASE("format_double round-trips exactly") {
    for (double v : {0.1, 1.0 / 3.0, 1e308, 5e-324, 12345.6789, -2.5e-7,
                     6.283185307179586, 0.0}) {
        const std::string s = format_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
    CHECK(std::signbit(std::strtod(format_double(-0.0).c_str(), nullptr)));
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("csv write/read cycle is lossless") {
    const auto path = tmp_file("motility_test_cycle.csv");
    const std::vector<std::string> header = {"t", "value", "flag"};
    const std::vector<std::vector<double>> rows = {
        {0.0, 1.0 / 3.0, 0.0},
        {0.1, -2.75e-13, 1.0},
        {0.2, std::numeric_limits<double>::infinity(), 0.0},
        {0.3, std::nan(""), 1.0},
    };
    write_csv(path, header, rows);
    const CsvTable t = read_csv(path);

    REQUIRE(t.header == header);
    REQUIRE(t.rows.size() == 4);
    CHECK(t.rows[0][1] == rows[0][1]);
    CHECK(t.rows[1][1] == rows[1][1]);
    CHECK(std::isinf(t.rows[2][1]));
    CHECK(std::isnan(t.rows[3][1]));

    CHECK(t.column("flag") == 2);
    CHECK(t.column_values("t") == std::vector<double>{0.0, 0.1, 0.2, 0.3});
    CHECK_THROWS_AS(t.column("absent"), std::invalid_argument);
    std::filesystem::remove(path);
}

TEST_CASE("csv rejects ragged and malformed input") {
    const auto path = tmp_file("motility_test_bad.csv");

    CHECK_THROWS_AS(write_csv(path, std::vector<std::string>{"a", "b"},
                              {{1.0, 2.0}, {3.0}}),
                    std::invalid_argument);

    {
        std::ofstream out(path);
        out << "a,b\n1.0,2.0\n3.0\n";
    }
    CHECK_THROWS_AS(read_csv(path), std::invalid_argument);
    {
        std::ofstream out(path);
        out << "a,b\n1.0,zebra\n";
    }
    CHECK_THROWS_AS(read_csv(path), std::invalid_argument);
    {
        std::ofstream out(path);
        out << "";
    }
    CHECK_THROWS_AS(read_csv(path), std::invalid_argument);
    std::filesystem::remove(path);
}

TEST_CASE("adaptive quadrature on smooth integrands") {
    const QuadResult sq = integrate_adaptive([](double x) { return x * x; }, 0.0, 1.0);
    CHECK(sq.value == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(sq.evaluations >= 15);

    const QuadResult sn = integrate_adaptive([](double x) { return std::sin(x); }, 0.0, M_PI);
    CHECK(sn.value == doctest::Approx(2.0).epsilon(1e-12));

    // a narrow bump forces subdivision but still converges
    const QuadResult bump = integrate_adaptive(
        [](double x) { return std::exp(-400.0 * (x - 0.3) * (x - 0.3)); }, 0.0, 1.0, 1e-12);
    CHECK(bump.value == doctest::Approx(std::sqrt(M_PI / 400.0)).epsilon(1e-10));
    CHECK(bump.evaluations > 45);
}

TEST_CASE("quadrature reports an exhausted budget") {
    CHECK_THROWS_AS(integrate_adaptive([](double x) { return 1.0 / std::sqrt(x + 1e-14); },
                                       0.0, 1.0, 1e-12, 1e-14, 1),
                    QuadratureError);
}

TEST_CASE("thomas solver against a hand-checked system") {
    const std::vector<double> lo = {0.0, 1.0, 1.0};
    const std::vector<double> di = {2.0, 2.0, 2.0};
    const std::vector<double> up = {1.0, 1.0, 0.0};
    const std::vector<double> rhs = {4.0, 8.0, 8.0};
    const std::vector<double> x = thomas_solve(lo, di, up, rhs);
    REQUIRE(x.size() == 3);
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(x[1] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(x[2] == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("thomas solver on random diagonally dominant systems") {
    std::mt19937 gen(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const int n = 500;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> lo(n), di(n), up(n), xt(n), rhs(n);
        for (int i = 0; i < n; ++i) {
            lo[i] = u(gen);
            up[i] = u(gen);
            di[i] = 4.0 + std::abs(u(gen));
            xt[i] = u(gen);
        }
        lo[0] = up[n - 1] = 0.0;
        for (int i = 0; i < n; ++i) {
            rhs[i] = di[i] * xt[i];
            if (i > 0) rhs[i] += lo[i] * xt[i - 1];
            if (i < n - 1) rhs[i] += up[i] * xt[i + 1];
        }
        const std::vector<double> x = thomas_solve(lo, di, up, rhs);
        double worst = 0.0;
        for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(x[i] - xt[i]));
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("thomas solver failure modes") {
    std::vector<double> x(2), scratch(2);

    // zero leading pivot
    const std::vector<double> z2 = {0.0, 0.0};
    const std::vector<double> o2 = {1.0, 1.0};
    CHECK_THROWS_AS(thomas_solve_inplace(z2, z2, o2, o2, x, scratch), SingularSystem);

    // elimination wipes out the second pivot: d1 - l1 * (u0 / d0) = 0
    const std::vector<double> lo = {0.0, 1.0};
    const std::vector<double> di = {1.0, 0.5};
    const std::vector<double> up = {0.5, 0.0};
    CHECK_THROWS_AS(thomas_solve_inplace(lo, di, up, o2, x, scratch), SingularSystem);

    // failures are visible through the common numerics base class
    CHECK_THROWS_AS(thomas_solve_inplace(lo, di, up, o2, x, scratch), NumericsError);

    // inconsistent band sizes are a caller error
    std::vector<double> x3(3), s3(3);
    CHECK_THROWS_AS(thomas_solve_inplace(lo, di, up, o2, x3, s3), std::invalid_argument);
    CHECK_THROWS_AS(thomas_solve_inplace(std::vector<double>{}, std::vector<double>{},
                                         std::vector<double>{}, std::vector<double>{},
                                         std::span<double>{}, std::span<double>{}),
                    std::invalid_argument);
}

}  // TEST_SUITE
