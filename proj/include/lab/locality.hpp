#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lab/bitvec.hpp"
#include "lab/cnf.hpp"

namespace lab {

// Bipartite incidence structure of a signed formula: variable nodes on one
// side, clause nodes on the other, one signed edge per literal occurrence.
struct FactorGraph {
  uint32_t m = 0;
  SignedCnf formula;                             // owned copy
  std::vector<std::vector<uint32_t>> var_clauses;  // clause indices per variable
};

FactorGraph build_factor_graph(const SignedCnf& f);

// Rooted signed neighborhood. Node 0 is the root variable. Depth is counted
// in variable layers: the root has depth 0, and a clause sits at the depth of
// the variable that discovered it. Every included clause appears with all
// three of its endpoints.
struct SignedRootedPattern {
  struct Node {
    uint8_t kind = 0;  // 0 = variable, 1 = clause
    uint32_t depth = 0;
  };
  struct Edge {
    uint32_t a = 0;  // node indices into `nodes`
    uint32_t b = 0;
    uint8_t sign = 0;
  };

  std::vector<Node> nodes;
  std::vector<Edge> edges;
  bool is_tree = true;
  uint32_t radius = 0;
};

// Breadth-first extraction out to `radius` variable layers. A clause reached
// from a variable at depth d < radius is included wholesale together with its
// other endpoints at depth d + 1; any edge landing on an already-visited node
// marks the pattern as non-tree.
SignedRootedPattern extract_neighborhood(const FactorGraph& g, uint32_t root,
                                         uint32_t radius);

// Canonical string code. For trees this is an AHU-style form: two tree
// patterns receive equal codes exactly when they are sign-preserving rooted
// isomorphic. Non-tree patterns get a distinguished prefix and a
// deterministic (degree-lexicographic) serialization, which distinguishes
// trees from non-trees but is not a full isomorphism invariant.
std::string canonical_code(const SignedRootedPattern& p);

// Chart key: the neighborhood code together with the isolation-layer labels
// at the root coordinate.
struct ChartKey {
  std::string code;
  BitVector a;
  BitVector b;

  std::string pack_key() const;
};

}  // namespace lab
