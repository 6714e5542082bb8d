#pragma once

#include "loglin/graph.hpp"
#include "loglin/jset.hpp"
#include "loglin/model.hpp"
#include "loglin/theta.hpp"

namespace loglin {

// Positions of `subset` inside the sorted `members` list (for remapping
// vertex sets into a restricted space).
VertexSet positions_in(const VertexSet& members, const VertexSet& subset);

// Marginal of a full-space probability vector onto I_{members}.
Eigen::VectorXd marginalize_probabilities(const Eigen::VectorXd& p,
                                          const CellSpace& space,
                                          const VertexSet& members);

// A model over the restricted space I_{M_v}.
struct MarginalModel {
  enum class Kind { ExactMarginal, Relaxed };
  Neighborhood nb;
  CellSpace space;  // restricted to nb.members
  JSet jset;        // over `space`; vertices renumbered to member positions
  Kind kind = Kind::Relaxed;
};

// True marginal canonical parameters: computes the full joint from theta,
// marginalizes it exactly onto I_{M_v}, and applies the Moebius transform
// over the saturated J-set of the restricted space. Serves as the
// independent oracle for marginal_theta_identity.
struct MarginalTheta {
  JSet jset;  // saturated J-set of the restricted space
  ThetaVector theta;
};
MarginalTheta marginal_theta_oracle(const Eigen::VectorXd& theta, const JSet& jset_full,
                                    const VertexSet& members,
                                    std::uint64_t guard = kDefaultEnumerationGuard);

// Direct evaluation of the marginal-parameter identity for one component:
//
//   theta^{M_v}_j = theta_j +
//     sum_{j' tl0 j} (-1)^{|S(j)|-|S(j')|}
//       log sum_{i : i_{M_v} = j'_{M_v}} exp( sum_{k in J, k tl i, k !tl j'} theta_k )
//
// `j` is a full-space cell with nonempty support inside nb.members. The
// inner sum over extensions of j' includes the padded cell itself, whose
// exponent is empty; that term is the "1 +" of the alternating-log form.
double marginal_theta_identity(const Eigen::VectorXd& theta, const JSet& jset_full,
                               const Neighborhood& nb, const Cell& j,
                               std::uint64_t guard = kDefaultEnumerationGuard);

// The buffer split behind the relaxed model:
//  - exempt:   {j in J : S(j) subset M_v, S(j) !subset B_v}; the marginal
//              parameter provably equals the overall theta_j.
//  - buffered: every cell with nonempty support inside B_v (all level
//              combinations; the buffer is saturated).
// Cells are full-space (padded).
struct BufferPartition {
  std::vector<Cell> exempt;
  std::vector<Cell> buffered;
};
BufferPartition classify_buffer(const Neighborhood& nb, const JSet& jset_full);

// J-set of the relaxed marginal problem over I_{M_v}:
//   {j in J | S(j) subset M_v, S(j) !subset B_v} union {i | S(i) subset B_v}.
// Returned over the restricted space with vertices renumbered.
JSet relaxed_jset(const Neighborhood& nb, const JSet& jset_full);

MarginalModel relaxed_model(const Neighborhood& nb, const JSet& jset_full);

// Exact marginal generating class D^{M_v}, recovered by probing: supports
// of the oracle components that stay above 1e-8 across `draws` random
// theta draws. Desk-scale only; intended for tests.
MarginalModel exact_marginal_model(const Neighborhood& nb, const JSet& jset_full,
                                   std::uint64_t seed, int draws = 3,
                                   std::uint64_t guard = kDefaultEnumerationGuard);

}  // namespace loglin
