#pragma once
#include <iosfwd>
#include <vector>

#include "matrix.hpp"

namespace dbvn {

inline constexpr double kDecomposeTol = 1e-10;

struct PermutationTerm {
    double weight;             // phi in (0, 1]
    std::vector<int> perm;     // perm[input] = output
};

/// A capacity matrix expressed as a weighted sum of permutation matrices.
/// Produced by iterative extraction: find a perfect matching on the positive
/// support, peel off the minimum matched entry as the term weight, repeat
/// until the residual is below tolerance.
class BirkhoffDecomposition {
public:
    static BirkhoffDecomposition compute(const CapacityMatrix& m, double tol = kDecomposeTol);

    int ports() const { return n_; }
    const std::vector<PermutationTerm>& terms() const { return terms_; }

    // One term per line: weight followed by the permutation image list.
    void write(std::ostream& out) const;

private:
    BirkhoffDecomposition(int n, std::vector<PermutationTerm> terms)
        : n_(n), terms_(std::move(terms)) {}

    int n_;
    std::vector<PermutationTerm> terms_;
};

} // namespace dbvn
