#pragma once
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "decompose.hpp"

namespace dbvn {

/// A repeating calendar of crossbar connection patterns. Slot t of the frame
/// connects input i to output slot(t)[i].
class FrameSchedule {
public:
    FrameSchedule() = default;  // empty; rejected by consumers that need slots

    // Quantizes term weights to slot counts by the largest-remainder method
    // (round(F * phi) in total exactly F) and spreads each term's slots across
    // the frame by ideal-position ordering.
    static FrameSchedule from_decomposition(const BirkhoffDecomposition& d, int frame_size,
                                            double tol = kDecomposeTol);

    // F = n slots holding the n distinct circular shifts in a seed-determined
    // order; every pair (i, j) gets exactly one token per frame.
    static FrameSchedule circular_shift(int n, uint64_t seed);

    // Explicit slot list; every slot must be a permutation of {0..n-1}.
    static FrameSchedule from_slots(int n, std::vector<std::vector<int>> slots);

    int ports() const { return n_; }
    int frame_size() const { return static_cast<int>(slots_.size()); }
    const std::vector<int>& slot(int t) const { return slots_[t]; }
    const std::vector<std::vector<int>>& slots() const { return slots_; }

    // Tokens granted to VC (i, j) over one frame.
    int tokens(int i, int j) const;

    // One slot per line: the permutation image list.
    void write(std::ostream& out) const;

private:
    FrameSchedule(int n, std::vector<std::vector<int>> slots)
        : n_(n), slots_(std::move(slots)) {}

    int n_ = 0;
    std::vector<std::vector<int>> slots_;
};

} // namespace dbvn
