#pragma once

#include <cstddef>
#include <numeric>

#include "smoothnorm/spaces.hpp"

namespace smoothnorm::detail {

// Visits the k-subsets of {0..n-1} in lexicographic order until visit returns true.
template <class Visit>
bool for_each_subset(std::size_t n, std::size_t k, Visit&& visit) {
  if (k > n) return false;
  SupportSet sigma(k);
  std::iota(sigma.begin(), sigma.end(), std::size_t{0});
  while (true) {
    if (visit(sigma)) return true;
    std::size_t i = k;
    while (i > 0 && sigma[i - 1] == n - k + i - 1) --i;
    if (i == 0) return false;
    ++sigma[i - 1];
    for (std::size_t j = i; j < k; ++j) sigma[j] = sigma[j - 1] + 1;
  }
}

}  // namespace smoothnorm::detail
