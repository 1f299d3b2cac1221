#include "lab/locality.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace lab {

FactorGraph build_factor_graph(const SignedCnf& f) {
  FactorGraph g;
  g.m = f.m;
  g.formula = f;
  g.var_clauses.resize(f.m);
  for (size_t c = 0; c < f.clauses.size(); ++c) {
    for (const auto& lit : f.clauses[c]) {
      g.var_clauses[lit.var].push_back(static_cast<uint32_t>(c));
    }
  }
  return g;
}

SignedRootedPattern extract_neighborhood(const FactorGraph& g, uint32_t root,
                                         uint32_t radius) {
  if (root >= g.m) throw std::out_of_range("extract_neighborhood: bad root");
  SignedRootedPattern p;
  p.radius = radius;

  std::map<uint32_t, uint32_t> var_node;     // variable -> node index
  std::map<uint32_t, uint32_t> clause_node;  // clause   -> node index

  p.nodes.push_back({0, 0});
  var_node[root] = 0;
  std::vector<uint32_t> frontier{root};

  for (uint32_t depth = 0; depth < radius && !frontier.empty(); ++depth) {
    std::vector<uint32_t> next;
    for (uint32_t v : frontier) {
      for (uint32_t c : g.var_clauses[v]) {
        if (clause_node.count(c)) continue;  // clause fully wired already
        uint32_t c_idx = static_cast<uint32_t>(p.nodes.size());
        p.nodes.push_back({1, depth});
        clause_node[c] = c_idx;
        for (const auto& lit : g.formula.clauses[c]) {
          auto it = var_node.find(lit.var);
          uint32_t w_idx;
          if (it == var_node.end()) {
            w_idx = static_cast<uint32_t>(p.nodes.size());
            p.nodes.push_back({0, depth + 1});
            var_node[lit.var] = w_idx;
            next.push_back(lit.var);
          } else {
            w_idx = it->second;
            if (lit.var != v) p.is_tree = false;  // edge back into the ball
          }
          p.edges.push_back({c_idx, w_idx, lit.neg});
        }
      }
    }
    frontier = std::move(next);
  }
  return p;
}

namespace {

std::string tree_code(const SignedRootedPattern& p) {
  const size_t n = p.nodes.size();
  std::vector<std::vector<std::pair<uint32_t, uint8_t>>> children(n);
  for (const auto& e : p.edges) {
    // Clause node depth equals its parent variable's depth; the other
    // endpoints lie one layer deeper.
    uint32_t var = e.b;  // edges are stored clause -> variable
    uint32_t clause = e.a;
    if (p.nodes[var].depth == p.nodes[clause].depth) {
      children[var].push_back({clause, e.sign});
    } else {
      children[clause].push_back({var, e.sign});
    }
  }
  // AHU: sort child code strings at every level.
  auto rec = [&](auto&& self, uint32_t node) -> std::string {
    std::vector<std::string> entries;
    entries.reserve(children[node].size());
    for (const auto& [child, sign] : children[node]) {
      entries.push_back(std::string(1, sign ? '-' : '+') + self(self, child));
    }
    std::sort(entries.begin(), entries.end());
    std::string out(1, p.nodes[node].kind == 0 ? 'v' : 'c');
    out.push_back('(');
    for (const auto& e : entries) out += e;
    out.push_back(')');
    return out;
  };
  return "T" + rec(rec, 0);
}

std::string graph_code(const SignedRootedPattern& p) {
  // Deterministic relabeling: order nodes by (depth, kind, degree) with the
  // discovery index as final tie-break, then serialize sorted edges.
  const size_t n = p.nodes.size();
  std::vector<uint32_t> degree(n, 0);
  for (const auto& e : p.edges) {
    ++degree[e.a];
    ++degree[e.b];
  }
  std::vector<uint32_t> order(n);
  for (uint32_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](uint32_t x, uint32_t y) {
    auto kx = std::make_tuple(p.nodes[x].depth, p.nodes[x].kind, degree[x]);
    auto ky = std::make_tuple(p.nodes[y].depth, p.nodes[y].kind, degree[y]);
    return kx < ky;
  });
  std::vector<uint32_t> relabel(n);
  for (uint32_t pos = 0; pos < n; ++pos) relabel[order[pos]] = pos;

  std::vector<std::tuple<uint32_t, uint32_t, uint8_t>> edges;
  edges.reserve(p.edges.size());
  for (const auto& e : p.edges) {
    uint32_t x = relabel[e.a];
    uint32_t y = relabel[e.b];
    edges.emplace_back(std::min(x, y), std::max(x, y), e.sign);
  }
  std::sort(edges.begin(), edges.end());

  std::string out = "G";
  out += std::to_string(n) + ";";
  for (uint32_t pos = 0; pos < n; ++pos) {
    const auto& node = p.nodes[order[pos]];
    out += (node.kind == 0 ? 'v' : 'c');
    out += std::to_string(node.depth);
    out.push_back(',');
  }
  out.push_back(';');
  for (const auto& [x, y, s] : edges) {
    out += std::to_string(x) + (s ? "-" : "+") + std::to_string(y) + ",";
  }
  return out;
}

}  // namespace

std::string canonical_code(const SignedRootedPattern& p) {
  if (p.nodes.empty()) throw std::invalid_argument("canonical_code: empty pattern");
  return p.is_tree ? tree_code(p) : graph_code(p);
}

std::string ChartKey::pack_key() const {
  std::string out;
  uint32_t len = static_cast<uint32_t>(code.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>(len >> (8 * i)));
  out += code;
  out += a.pack_key();
  out += b.pack_key();
  return out;
}

}  // namespace lab
