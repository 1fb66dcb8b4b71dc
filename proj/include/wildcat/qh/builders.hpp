#pragma once

// Ready-made spaces: the double, the higher fission spaces of a block
// grading, and the space attached to an irregular class at one marked point
// (whose unipotent factors are the per-direction Stokes groups).

#include "wildcat/irregular/directions.hpp"
#include "wildcat/qh/space.hpp"

namespace wildcat::qh {

inline std::shared_ptr<ChainSpace> make_double(int n) {
  auto full = lie::full_partition(n);
  return std::make_shared<ChainSpace>(n, full, full, std::vector<UnipotentPattern>{},
                                      "double(" + std::to_string(n) + ")");
}

// Parabolic with block-diagonal Levi given by a contiguous partition; the
// radical is the strictly upper block triangle.
inline lie::ParabolicData block_parabolic(const Partition& levi, int n) {
  auto owner = lie::part_of(levi, n);
  int parts = 0;
  for (int v : owner) parts = std::max(parts, v + 1);
  std::vector<double> lambda(n);
  for (int i = 0; i < n; ++i) lambda[i] = static_cast<double>(parts - 1 - owner[i]);
  return lie::parabolic_from_cocharacter(lambda);
}

// Higher fission space of depth r for the block grading given by `levi`:
// unipotent factors alternate between the radical and its opposite,
// starting with the radical.
inline std::shared_ptr<ChainSpace> make_fission(int n, const Partition& levi, int r,
                                                std::string label = "") {
  auto par = block_parabolic(levi, n);
  std::vector<UnipotentPattern> pats;
  for (int i = 0; i < 2 * r; ++i)
    pats.push_back(i % 2 == 0 ? par.radical : par.opposite_radical);
  if (label.empty())
    label = "fission(" + std::to_string(n) + ",r=" + std::to_string(r) + ")";
  return std::make_shared<ChainSpace>(n, lie::full_partition(n), levi, std::move(pats),
                                      std::move(label));
}

// Space attached to an irregular class at one marked point: one unipotent
// factor per singular direction, taken in order from the cut, H the
// centralizer of the class.
inline std::shared_ptr<ChainSpace> make_stokes_space(const irr::StokesStructure& st,
                                                     std::string label = "") {
  const int n = st.q.n;
  std::vector<UnipotentPattern> pats;
  for (const auto& d : st.dirs) pats.push_back(d.pattern(n));
  if (label.empty()) label = "stokes(n=" + std::to_string(n) + ")";
  return std::make_shared<ChainSpace>(n, lie::full_partition(n), irr::centralizer(st.q),
                                      std::move(pats), std::move(label));
}

// Expected dimension of the space attached to an irregular class:
// dim G + dim H + (sum over root tails of their pole orders).
inline int expected_stokes_dim(const irr::IrregularType& q) {
  int n = q.n;
  return n * n + lie::partition_dim(irr::centralizer(q)) + irr::total_degree(q);
}

}  // namespace wildcat::qh
