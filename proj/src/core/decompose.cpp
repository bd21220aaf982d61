#include "decompose.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "errors.hpp"

namespace dbvn {
namespace {

// Kuhn's augmenting-path matching on the positive support of the residual.
// Inputs are scanned in ascending order and outputs tried in ascending order,
// so the matching produced for a given residual is deterministic.
struct SupportMatcher {
    int n;
    const std::vector<double>& r;   // residual, row-major
    std::vector<int> match_out;     // output -> input, -1 if free
    std::vector<int> match_in;      // input -> output, -1 if free
    std::vector<uint32_t> visited;  // per-input visit stamp
    uint32_t stamp = 0;

    explicit SupportMatcher(int n_, const std::vector<double>& r_)
        : n(n_), r(r_), match_out(n_, -1), match_in(n_, -1), visited(n_, 0) {}

    bool augment(int i) {
        visited[i] = stamp;
        const double* row = &r[static_cast<size_t>(i) * n];
        for (int j = 0; j < n; ++j) {
            if (row[j] <= 0.0) continue;
            int owner = match_out[j];
            if (owner == -1 || (visited[owner] != stamp && augment(owner))) {
                match_out[j] = i;
                match_in[i] = j;
                return true;
            }
        }
        return false;
    }

    // Returns input -> output, or empty if no perfect matching exists.
    std::vector<int> solve() {
        for (int i = 0; i < n; ++i) {
            ++stamp;
            if (!augment(i)) return {};
        }
        return match_in;
    }
};

} // namespace

BirkhoffDecomposition BirkhoffDecomposition::compute(const CapacityMatrix& m, double tol) {
    if (tol <= 0) fail(Status::invalid_params, "decomposition tolerance must be positive");

    const int n = m.ports();
    std::vector<double> residual = m.entries();
    std::vector<PermutationTerm> terms;
    const int max_terms = n * n - 2 * n + 2;

    // Entries this far below the working tolerance are rounding dust left by
    // subtractions; dropping them keeps the support graph clean.
    const double dust = std::min(tol * 1e-3, 1e-15);

    // Subtracting a term only removes edges that were on the matching, so the
    // matching carries over between iterations and only the inputs whose edge
    // died need a fresh augmenting path.
    SupportMatcher matcher(n, residual);
    std::vector<int> perm = matcher.solve();
    if (perm.empty())
        fail(Status::decomposition_stall, "no perfect matching on the positive support");

    std::vector<int> dead;
    for (;;) {
        double max_entry = 0.0;
        for (double e : residual) max_entry = std::max(max_entry, e);
        if (max_entry < tol) break;

        if (static_cast<int>(terms.size()) >= max_terms)
            fail(Status::decomposition_stall,
                 "term count exceeded " + std::to_string(max_terms) +
                     " with residual " + std::to_string(max_entry));

        double weight = residual[static_cast<size_t>(0) * n + perm[0]];
        for (int i = 1; i < n; ++i)
            weight = std::min(weight, residual[static_cast<size_t>(i) * n + perm[i]]);

        dead.clear();
        for (int i = 0; i < n; ++i) {
            double& e = residual[static_cast<size_t>(i) * n + perm[i]];
            e -= weight;
            if (e <= dust) {
                e = 0.0;
                dead.push_back(i);
            }
        }
        terms.push_back({weight, perm});

        for (int i : dead) {
            matcher.match_out[perm[i]] = -1;
            matcher.match_in[i] = -1;
        }
        bool repaired = true;
        for (int i : dead) {
            ++matcher.stamp;
            if (!matcher.augment(i)) {
                repaired = false;
                break;
            }
        }
        if (!repaired) break;  // residual support lost its perfect matching
        perm = matcher.match_in;
    }

    double max_entry = 0.0;
    for (double e : residual) max_entry = std::max(max_entry, e);
    if (max_entry >= tol)
        fail(Status::decomposition_stall,
             "no perfect matching on the positive support (residual max " +
                 std::to_string(max_entry) + ")");

    if (terms.empty())
        fail(Status::decomposition_stall, "matrix is entirely below tolerance");
    return BirkhoffDecomposition(n, std::move(terms));
}

void BirkhoffDecomposition::write(std::ostream& out) const {
    char buf[32];
    for (const auto& t : terms_) {
        std::snprintf(buf, sizeof buf, "%.17g", t.weight);
        out << buf;
        for (int j : t.perm) out << ' ' << j;
        out << '\n';
    }
}

} // namespace dbvn
