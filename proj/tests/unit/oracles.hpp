#pragma once

// Reference implementations used only by tests. They are written from the
// definitions, as plainly as possible, and share no code with the library
// beyond the basic types.

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "herman/rational.hpp"
#include "herman/ring.hpp"

namespace oracle {

using herman::Rational;

// Every increasing index tuple of length m in [0, k), plain nested recursion.
inline void tuples(int k, int m, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == m) {
    out.push_back(cur);
    return;
  }
  const int start = cur.empty() ? 0 : cur.back() + 1;
  for (int i = start; i < k; ++i) {
    cur.push_back(i);
    tuples(k, m, cur, out);
    cur.pop_back();
  }
}

inline std::vector<std::vector<int>> alternating_tuples(int k, int m) {
  std::vector<std::vector<int>> all, out;
  std::vector<int> cur;
  tuples(k, m, cur, all);
  for (const auto& t : all) {
    bool ok = true;
    for (int j = 1; j < m; ++j) ok = ok && ((t[j] - t[j - 1]) % 2 == 1);
    if (ok) out.push_back(t);
  }
  return out;
}

template <class T>
T alternating(const std::vector<T>& x, int m) {
  T acc = T(0);
  for (const auto& t : alternating_tuples(static_cast<int>(x.size()), m)) {
    T prod = T(1);
    for (int i : t) prod *= x[i];
    acc += prod;
  }
  return acc;
}

template <class T>
T f3(const std::vector<T>& x) {
  return alternating(x, 3);
}
template <class T>
T f5(const std::vector<T>& x) {
  return alternating(x, 5);
}
template <class T>
T f(const std::vector<T>& x, int alpha = 24) {
  return f3(x) - T(alpha) * f5(x);
}

// Gap vector after one step, straight from token positions: move, then cancel
// pairs sharing a process, then read the gaps off and rotate canonically.
inline std::vector<int> step_positions(int n, const std::vector<int>& z, std::uint64_t mask) {
  std::map<int, int> count;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const int p = ((mask >> i) & 1U) ? (z[i] == n ? 1 : z[i] + 1) : z[i];
    ++count[p];
  }
  std::vector<int> out;
  for (const auto& [p, c] : count) {
    if (c == 1) out.push_back(p);
  }
  return out;
}

inline std::vector<int> gaps_of(int n, const std::vector<int>& z) {
  std::vector<int> g;
  if (z.empty()) return g;
  g.push_back(n + z.front() - z.back());
  for (std::size_t i = 1; i < z.size(); ++i) g.push_back(z[i] - z[i - 1]);
  if (z.size() == 1) g[0] = n;
  return g;
}

inline std::vector<int> positions_of(const std::vector<int>& g) {
  std::vector<int> z{1};
  for (std::size_t i = 1; i < g.size(); ++i) z.push_back(z.back() + g[i]);
  return z;
}

inline std::vector<int> min_rotation(const std::vector<int>& g) {
  std::vector<int> best = g;
  for (std::size_t s = 1; s < g.size(); ++s) {
    std::vector<int> r(g.begin() + s, g.end());
    r.insert(r.end(), g.begin(), g.begin() + s);
    best = std::min(best, r);
  }
  return best;
}

// E T for every state reachable from g, by building the full linear system in
// rationals over canonical gap vectors and running textbook Gauss-Jordan.
inline Rational expected_time(int n, const std::vector<int>& g0) {
  std::vector<std::vector<int>> states{min_rotation(g0)};
  std::map<std::vector<int>, std::size_t> index{{states[0], 0}};
  std::vector<std::map<std::size_t, Rational>> rows;
  for (std::size_t s = 0; s < states.size(); ++s) {
    std::map<std::size_t, Rational> row;
    const auto g = states[s];
    if (g.size() > 1) {
      const auto z = positions_of(g);
      const std::uint64_t masks = std::uint64_t{1} << g.size();
      for (std::uint64_t m = 0; m < masks; ++m) {
        const auto next = min_rotation(gaps_of(n, step_positions(n, z, m)));
        auto it = index.find(next);
        if (it == index.end()) {
          it = index.emplace(next, states.size()).first;
          states.push_back(next);
        }
        row[it->second] += herman::make_rational(1, static_cast<std::int64_t>(masks));
      }
    }
    rows.push_back(std::move(row));
  }
  const std::size_t n_states = states.size();
  // (I - P) t = 1 on non-absorbing states, t = 0 on absorbing ones.
  std::vector<std::vector<Rational>> a(n_states, std::vector<Rational>(n_states + 1, Rational(0)));
  for (std::size_t i = 0; i < n_states; ++i) {
    a[i][i] = 1;
    if (states[i].size() <= 1) continue;
    for (const auto& [j, p] : rows[i]) a[i][j] -= p;
    a[i][n_states] = 1;
  }
  for (std::size_t c = 0; c < n_states; ++c) {
    std::size_t piv = c;
    while (a[piv][c] == 0) ++piv;
    std::swap(a[piv], a[c]);
    const Rational inv = 1 / a[c][c];
    for (auto& v : a[c]) v *= inv;
    for (std::size_t r = 0; r < n_states; ++r) {
      if (r == c || a[r][c] == 0) continue;
      const Rational factor = a[r][c];
      for (std::size_t j = c; j <= n_states; ++j) a[r][j] -= factor * a[c][j];
    }
  }
  return a[0][n_states];
}

}  // namespace oracle
