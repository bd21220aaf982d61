#include "schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "errors.hpp"
#include "rng.hpp"

namespace dbvn {

FrameSchedule FrameSchedule::from_decomposition(const BirkhoffDecomposition& d, int frame_size,
                                                double tol) {
    const int n = d.ports();
    const auto& terms = d.terms();
    const int m = static_cast<int>(terms.size());
    if (frame_size < m)
        fail(Status::frame_too_small, "frame size " + std::to_string(frame_size) +
                                          " is smaller than the term count " + std::to_string(m));

    // Largest-remainder quantization of F * phi_i.
    std::vector<int> count(m);
    std::vector<std::pair<double, int>> remainder(m);
    int assigned = 0;
    for (int i = 0; i < m; ++i) {
        double ideal = frame_size * terms[i].weight;
        count[i] = static_cast<int>(std::floor(ideal));
        remainder[i] = {ideal - count[i], i};
        assigned += count[i];
    }
    int leftover = frame_size - assigned;
    std::stable_sort(remainder.begin(), remainder.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (int k = 0; k < leftover; ++k) ++count[remainder[k % m].second];

    for (int i = 0; i < m; ++i)
        if (count[i] == 0 && terms[i].weight > tol)
            fail(Status::frame_too_small,
                 "term " + std::to_string(i) + " (weight " + std::to_string(terms[i].weight) +
                     ") would get no slot in a frame of " + std::to_string(frame_size));

    // Spread: the k-th slot of term i wants position (k + 0.5) / phi_i, which
    // lands on the [0, F] scale; a stable sort by that position interleaves
    // the terms and keeps per-VC token jitter low.
    struct Entry {
        double pos;
        int term;
    };
    std::vector<Entry> entries;
    entries.reserve(frame_size);
    for (int i = 0; i < m; ++i)
        for (int k = 0; k < count[i]; ++k)
            entries.push_back({(k + 0.5) / terms[i].weight, i});
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Entry& a, const Entry& b) { return a.pos < b.pos; });

    std::vector<std::vector<int>> slots;
    slots.reserve(frame_size);
    for (const Entry& e : entries) slots.push_back(terms[e.term].perm);
    return FrameSchedule(n, std::move(slots));
}

FrameSchedule FrameSchedule::circular_shift(int n, uint64_t seed) {
    if (n < 1) fail(Status::dimension_error, "port count must be >= 1");
    std::vector<int> offsets(n);
    std::iota(offsets.begin(), offsets.end(), 0);
    Xoshiro256pp rng(substream_seed(seed, 0));
    for (int i = n - 1; i > 0; --i) {
        int j = static_cast<int>(rng.next() % static_cast<uint64_t>(i + 1));
        std::swap(offsets[i], offsets[j]);
    }
    std::vector<std::vector<int>> slots(n, std::vector<int>(n));
    for (int t = 0; t < n; ++t)
        for (int i = 0; i < n; ++i) slots[t][i] = (i + offsets[t]) % n;
    return FrameSchedule(n, std::move(slots));
}

FrameSchedule FrameSchedule::from_slots(int n, std::vector<std::vector<int>> slots) {
    if (n < 1) fail(Status::dimension_error, "port count must be >= 1");
    if (slots.empty()) fail(Status::config_error, "schedule needs at least one slot");
    std::vector<char> seen(n);
    for (size_t t = 0; t < slots.size(); ++t) {
        if (static_cast<int>(slots[t].size()) != n)
            fail(Status::dimension_error, "slot " + std::to_string(t) + " has wrong arity");
        std::fill(seen.begin(), seen.end(), 0);
        for (int out : slots[t]) {
            if (out < 0 || out >= n || seen[out]++)
                fail(Status::config_error,
                     "slot " + std::to_string(t) + " is not a permutation");
        }
    }
    return FrameSchedule(n, std::move(slots));
}

int FrameSchedule::tokens(int i, int j) const {
    int c = 0;
    for (const auto& s : slots_) c += (s[i] == j);
    return c;
}

void FrameSchedule::write(std::ostream& out) const {
    for (const auto& s : slots_) {
        for (int i = 0; i < n_; ++i) out << (i ? " " : "") << s[i];
        out << '\n';
    }
}

} // namespace dbvn
