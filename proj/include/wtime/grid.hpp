#pragma once

#include <cstddef>
#include <vector>

namespace wtime {

/**
 * Uniform truncation of the energy line: N (odd) nodes on [-L, L].
 *
 * Nodes are generated as (i - c) * h with c = (N - 1) / 2, which makes the
 * grid exactly symmetric about zero with a node at E = 0. The two endpoints
 * are pinned to -L and L.
 */
class Grid {
public:
    /// Throws Error(InvalidArgument) for even N, N < 3 or non-finite / non-positive L.
    Grid(double half_width, std::size_t nodes);

    double half_width() const { return L_; }
    std::size_t size() const { return N_; }
    double spacing() const { return h_; }
    std::size_t center() const { return (N_ - 1) / 2; }

    double node(std::size_t i) const;
    std::vector<double> nodes() const;

    bool operator==(const Grid& other) const { return L_ == other.L_ && N_ == other.N_; }

private:
    double L_;
    std::size_t N_;
    double h_;
};

inline Grid make_grid(double half_width, std::size_t nodes) { return Grid(half_width, nodes); }

}  // namespace wtime
