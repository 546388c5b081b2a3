#include "strip/linalg.hpp"

namespace strip {

Matrix symplectic_form(int n) {
  Matrix j = Matrix::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n) = -Matrix::Identity(n, n);
  j.bottomLeftCorner(n, n) = Matrix::Identity(n, n);
  return j;
}

std::vector<std::vector<int>> combinations(int n, int p) {
  std::vector<std::vector<int>> out;
  if (p < 0 || p > n) return out;
  std::vector<int> current(p);
  for (int i = 0; i < p; ++i) current[i] = i;
  while (true) {
    out.push_back(current);
    int i = p - 1;
    while (i >= 0 && current[i] == n - p + i) --i;
    if (i < 0) break;
    ++current[i];
    for (int k = i + 1; k < p; ++k) current[k] = current[k - 1] + 1;
  }
  return out;
}

std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace strip
