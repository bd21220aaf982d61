#include <doctest.h>

#include <sstream>

#include "errors.hpp"
#include "matrix.hpp"

using namespace dbvn;

TEST_CASE("identity and uniform matrices validate") {
    for (int n : {1, 2, 5, 16}) {
        CapacityMatrix id = CapacityMatrix::identity(n);
        CHECK(id.ports() == n);
        CapacityMatrix uni = CapacityMatrix::uniform(n);
        CHECK(uni.at(0, n - 1) == doctest::Approx(1.0 / n));
    }
}

TEST_CASE("row sum off by more than the tolerance is rejected") {
    std::vector<double> bad = {0.6, 0.3, 0.4, 0.7};  // row 0 sums to 0.9
    try {
        CapacityMatrix::validate(2, bad);
        FAIL("expected stochasticity_error");
    } catch (const Error& e) {
        CHECK(e.code() == Status::stochasticity_error);
    }
}

TEST_CASE("negative entries are rejected") {
    std::vector<double> bad = {1.2, -0.2, -0.2, 1.2};
    try {
        CapacityMatrix::validate(2, bad);
        FAIL("expected negative_entry");
    } catch (const Error& e) {
        CHECK(e.code() == Status::negative_entry);
    }
}

TEST_CASE("entry count must match the declared ports") {
    std::vector<double> bad = {1.0, 0.0, 0.0};
    try {
        CapacityMatrix::validate(2, bad);
        FAIL("expected dimension_error");
    } catch (const Error& e) {
        CHECK(e.code() == Status::dimension_error);
    }
}

TEST_CASE("validation tolerance is honored") {
    // Row sums off by 1e-8, column sums exact.
    std::vector<double> close = {0.5 + 1e-8, 0.5, 0.5 - 1e-8, 0.5};
    CHECK_NOTHROW(CapacityMatrix::validate(2, close, 1e-6));
    CHECK_THROWS_AS(CapacityMatrix::validate(2, close, 1e-10), Error);
}

TEST_CASE("text round trip") {
    CapacityMatrix m = CapacityMatrix::validate(3, {0.2, 0.3, 0.5,
                                                    0.5, 0.2, 0.3,
                                                    0.3, 0.5, 0.2});
    std::stringstream s;
    m.write(s);
    CapacityMatrix back = CapacityMatrix::read(s);
    CHECK(back.ports() == 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(back.at(i, j) == m.at(i, j));
}

TEST_CASE("truncated text input is an io error") {
    std::istringstream s("2\n0.5 0.5\n0.5\n");
    try {
        CapacityMatrix::read(s);
        FAIL("expected io_error");
    } catch (const Error& e) {
        CHECK(e.code() == Status::io_error);
    }
}
