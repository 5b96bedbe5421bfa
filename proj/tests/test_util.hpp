#pragma once

#include <Eigen/Core>

// Bitwise equality for dense Eigen objects (NaN-free inputs).
template <typename A, typename B>
bool bits_equal(const A& a, const B& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return (a.array() == b.array()).all();
}
