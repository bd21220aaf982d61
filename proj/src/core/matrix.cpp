#include "matrix.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "errors.hpp"

namespace dbvn {

CapacityMatrix CapacityMatrix::validate(int n, std::vector<double> entries, double tol) {
    if (n < 1)
        fail(Status::dimension_error, "port count must be >= 1, got " + std::to_string(n));
    if (tol <= 0)
        fail(Status::invalid_params, "validation tolerance must be positive");
    if (entries.size() != static_cast<size_t>(n) * n)
        fail(Status::dimension_error,
             "expected " + std::to_string(static_cast<long long>(n) * n) + " entries, got " +
                 std::to_string(entries.size()));

    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double e = entries[static_cast<size_t>(i) * n + j];
            if (!(e >= 0.0) || !std::isfinite(e))
                fail(Status::negative_entry, "entry (" + std::to_string(i) + "," +
                                                 std::to_string(j) + ") = " + std::to_string(e) +
                                                 " is negative or not finite");
        }
    }

    for (int i = 0; i < n; ++i) {
        double row = 0.0, col = 0.0;
        for (int j = 0; j < n; ++j) {
            row += entries[static_cast<size_t>(i) * n + j];
            col += entries[static_cast<size_t>(j) * n + i];
        }
        if (std::fabs(row - 1.0) > tol)
            fail(Status::stochasticity_error,
                 "row " + std::to_string(i) + " sums to " + std::to_string(row));
        if (std::fabs(col - 1.0) > tol)
            fail(Status::stochasticity_error,
                 "column " + std::to_string(i) + " sums to " + std::to_string(col));
    }
    return CapacityMatrix(n, std::move(entries));
}

CapacityMatrix CapacityMatrix::identity(int n) {
    std::vector<double> e(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) e[static_cast<size_t>(i) * n + i] = 1.0;
    return validate(n, std::move(e));
}

CapacityMatrix CapacityMatrix::uniform(int n) {
    std::vector<double> e(static_cast<size_t>(n) * n, 1.0 / n);
    return validate(n, std::move(e));
}

CapacityMatrix CapacityMatrix::read(std::istream& in, double tol) {
    int n = 0;
    if (!(in >> n))
        fail(Status::io_error, "matrix input: missing port count on first line");
    if (n < 1)
        fail(Status::dimension_error, "matrix input: port count must be >= 1");
    std::vector<double> entries;
    entries.reserve(static_cast<size_t>(n) * n);
    double v;
    while (entries.size() < static_cast<size_t>(n) * n && (in >> v)) entries.push_back(v);
    if (entries.size() < static_cast<size_t>(n) * n)
        fail(Status::io_error, "matrix input: expected " +
                                   std::to_string(static_cast<long long>(n) * n) +
                                   " entries, found " + std::to_string(entries.size()));
    return validate(n, std::move(entries), tol);
}

void CapacityMatrix::write(std::ostream& out) const {
    out << n_ << '\n';
    char buf[32];
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", at(i, j));
            out << (j ? " " : "") << buf;
        }
        out << '\n';
    }
}

} // namespace dbvn
