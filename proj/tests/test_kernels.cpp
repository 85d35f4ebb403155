#include <vector>

#include "doctest.h"
#include "nashsplit/kernels.hpp"
#include "nashsplit/rng.hpp"

using namespace nashsplit;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = rng.gaussian();
  return v;
}

}  // namespace

TEST_CASE("parallel kernels agree with the serial reference") {
  // sizes straddling the grain thresholds
  for (std::size_t n : {7u, 4096u, 4097u, 100000u}) {
    const auto x = random_vec(n, 1000 + n);
    const auto y = random_vec(n, 2000 + n);

    const double d_par = kernels::dot(x, y);
    const double d_ser = kernels::serial::dot(x, y);
    CHECK(d_par == doctest::Approx(d_ser).epsilon(1e-13));

    std::vector<double> z_par(n), z_ser(n);
    kernels::add_scaled(x, 0.37, y, z_par);
    kernels::serial::add_scaled(x, 0.37, y, z_ser);
    for (std::size_t i = 0; i < n; i += n / 7 + 1)
      CHECK(z_par[i] == z_ser[i]);  // elementwise: bitwise equal
  }
}

TEST_CASE("matvec matches serial reference bitwise (row-parallel)") {
  const std::size_t rows = 301, cols = 157;
  const auto a = random_vec(rows * cols, 42);
  const auto x = random_vec(cols, 43);
  const auto xa = random_vec(rows, 44);

  std::vector<double> out_par(rows), out_ser(rows);
  kernels::matvec(rows, cols, a, x, out_par);
  kernels::serial::matvec(rows, cols, a, x, out_ser);
  for (std::size_t r = 0; r < rows; ++r) CHECK(out_par[r] == out_ser[r]);

  std::vector<double> adj_par(cols), adj_ser(cols);
  kernels::matvec_adjoint(rows, cols, a, xa, adj_par);
  kernels::serial::matvec_adjoint(rows, cols, a, xa, adj_ser);
  for (std::size_t c = 0; c < cols; ++c) CHECK(adj_par[c] == adj_ser[c]);
}

TEST_CASE("chunked dot is reproducible across calls") {
  const std::size_t n = 50000;
  const auto x = random_vec(n, 7);
  const auto y = random_vec(n, 8);
  const double first = kernels::dot(x, y);
  for (int rep = 0; rep < 5; ++rep) CHECK(kernels::dot(x, y) == first);
}
