#pragma once

#include <functional>
#include <vector>

#include "doctest.h"
#include "ggl/error.hpp"
#include "ggl/lattice.hpp"
#include "ggl/rng.hpp"

namespace ggl::test {

inline Vertex v3(int a, int b, int c) { return make_vertex({a, b, c}); }

/// Runs fn and checks that it throws ggl::Error with the given code.
inline void check_throws_code(const std::function<void()>& fn, ErrorCode code) {
  bool thrown = false;
  try {
    fn();
  } catch (const Error& e) {
    thrown = true;
    CHECK_MESSAGE(e.code() == code, e.what());
  }
  CHECK_MESSAGE(thrown, "expected ", to_string(code));
}

/// Random subset of the cube [-r, r]^dim, each vertex kept with probability p.
inline Region random_region(Rng& rng, int dim, int r, double p) {
  std::vector<Vertex> kept;
  for (const auto& v : Region::cube(dim, Vertex{}, r)) {
    if (rng.uniform() < p) kept.push_back(v);
  }
  if (kept.empty()) kept.push_back(Vertex{});
  return Region(dim, kept);
}

}  // namespace ggl::test
