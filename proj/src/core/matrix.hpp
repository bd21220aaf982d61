#pragma once
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace dbvn {

// Default tolerance on row/column sums when validating a rate matrix.
inline constexpr double kStochasticTol = 1e-6;

/// A validated doubly stochastic capacity matrix: n x n nonnegative rates,
/// every row and column summing to 1 within the validation tolerance.
class CapacityMatrix {
public:
    // Validates and takes ownership of a row-major n*n grid.
    static CapacityMatrix validate(int n, std::vector<double> entries,
                                   double tol = kStochasticTol);

    static CapacityMatrix identity(int n);
    static CapacityMatrix uniform(int n);

    // Text format: first line n, then n whitespace-separated rows.
    static CapacityMatrix read(std::istream& in, double tol = kStochasticTol);
    void write(std::ostream& out) const;

    int ports() const { return n_; }
    double at(int i, int j) const { return entries_[static_cast<size_t>(i) * n_ + j]; }
    const std::vector<double>& entries() const { return entries_; }

private:
    CapacityMatrix(int n, std::vector<double> entries)
        : n_(n), entries_(std::move(entries)) {}

    int n_;
    std::vector<double> entries_;
};

} // namespace dbvn
