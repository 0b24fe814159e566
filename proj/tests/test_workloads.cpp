#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <vector>

#include "offload/workloads.hpp"

using namespace offload;
using namespace offload::workloads;

namespace {

// Independent oracles, deliberately written with different algorithms than
// the production code.

std::uint64_t fib_iterative(std::uint32_t n) {
  std::uint64_t a = 0, b = 1;
  for (std::uint32_t i = 0; i < n; ++i) {
    std::uint64_t next = a + b;
    a = b;
    b = next;
  }
  return a;
}

// Count of calls the doubly-recursive definition makes, by direct recurrence:
// calls(n) = calls(n-1) + calls(n-2) + 1, calls(0) = calls(1) = 1.
double fib_calls_recurrence(std::uint32_t n) {
  std::vector<double> c(n + 2, 1.0);
  for (std::uint32_t i = 2; i <= n; ++i) c[i] = c[i - 1] + c[i - 2] + 1;
  return c[n];
}

// Exhaustive permutation scan: a placement is one queen per row with all
// columns distinct, so checking every permutation for diagonal conflicts
// enumerates the full solution set.
std::uint64_t queens_by_permutation(int n) {
  std::vector<int> cols(static_cast<std::size_t>(n));
  std::iota(cols.begin(), cols.end(), 0);
  std::uint64_t count = 0;
  do {
    bool ok = true;
    for (int i = 0; ok && i < n; ++i)
      for (int j = i + 1; ok && j < n; ++j)
        if (std::abs(cols[i] - cols[j]) == j - i) ok = false;
    if (ok) ++count;
  } while (std::next_permutation(cols.begin(), cols.end()));
  return count;
}

// Dense-matrix power iteration for the spectral norm: build B = A^T A
// explicitly and iterate far past convergence.
double spectralnorm_dense_oracle(std::size_t n) {
  auto a = [](std::size_t i, std::size_t j) {
    return 1.0 / (static_cast<double>((i + j) * (i + j + 1)) / 2 + i + 1);
  };
  std::vector<double> b(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double sum = 0;
      for (std::size_t k = 0; k < n; ++k) sum += a(k, i) * a(k, j);
      b[i * n + j] = sum;
    }
  std::vector<double> x(n, 1.0), y(n);
  for (int iter = 0; iter < 500; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0;
      for (std::size_t j = 0; j < n; ++j) sum += b[i * n + j] * x[j];
      y[i] = sum;
    }
    double norm = std::sqrt(std::inner_product(y.begin(), y.end(), y.begin(), 0.0));
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / norm;
  }
  double xbx = 0, xx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double bx = 0;
    for (std::size_t j = 0; j < n; ++j) bx += b[i * n + j] * x[j];
    xbx += x[i] * bx;
    xx += x[i] * x[i];
  }
  return std::sqrt(xbx / xx);
}

}  // namespace

TEST_CASE("fibonacci matches the iterative oracle") {
  auto bundle = make_fibonacci();
  for (std::uint32_t n = 0; n <= 25; ++n) {
    auto result = bundle.run(task::encode_u32_args({n}));
    CHECK(task::decode_u64(result) == fib_iterative(n));
  }
  CHECK_THROWS_AS(bundle.run(task::encode_u32_args({41})), InputError);
  CHECK_THROWS_AS(bundle.run(Bytes{}), InputError);
}

TEST_CASE("fibonacci work estimate equals the recursion call count") {
  for (std::uint32_t n = 0; n <= 30; ++n)
    CHECK(fib_call_count(n) == Catch::Approx(fib_calls_recurrence(n)).epsilon(1e-12));
}

TEST_CASE("queens counts match the exhaustive permutation oracle") {
  auto bundle = make_nqueens();
  const std::uint64_t known[] = {1, 0, 0, 2, 10, 4, 40, 92};
  for (int n = 1; n <= 8; ++n) {
    std::uint64_t oracle = queens_by_permutation(n);
    CHECK(oracle == known[n - 1]);
    CHECK(task::decode_u64(bundle.run(nqueens_args(static_cast<std::uint32_t>(n)))) ==
          oracle);
  }
  CHECK_THROWS_AS(bundle.run(nqueens_args(11)), InputError);
}

TEST_CASE("queens split partitions the search space exactly") {
  auto bundle = make_nqueens();
  for (std::uint32_t n : {6u, 7u, 8u}) {
    for (int k : {1, 2, 3, 5, 8, 12}) {
      auto parts = bundle.split(nqueens_args(n), k);
      REQUIRE(parts.size() == static_cast<std::size_t>(k));
      std::vector<Bytes> partials;
      for (const auto& p : parts) partials.push_back(bundle.run(p));
      CHECK(task::decode_u64(bundle.merge(partials)) ==
            task::decode_u64(bundle.run(nqueens_args(n))));
    }
  }
}

TEST_CASE("virus scan finds exactly the planted infections") {
  auto tmp = std::filesystem::temp_directory_path() / "offload_virus_test";
  auto fx = make_virus_fixture(tmp.string(), 50, 200'000, 7, 25, 42);
  REQUIRE(fx.planted == 7);

  auto bundle = make_virusscan();
  auto args = virusscan_args(fx.corpus_dir, fx.db_path);
  CHECK(task::decode_u64(bundle.run(args)) == 7);
  CHECK(bundle.input_size_proxy(args) == 50.0);

  // Partitioned scans cover the same files once each.
  auto parts = bundle.split(args, 4);
  std::vector<Bytes> partials;
  for (const auto& p : parts) partials.push_back(bundle.run(p));
  CHECK(task::decode_u64(bundle.merge(partials)) == 7);

  // A clean fixture scans clean.
  auto clean = make_virus_fixture((tmp / "clean").string(), 10, 20'000, 0, 25, 43);
  CHECK(task::decode_u64(bundle.run(virusscan_args(clean.corpus_dir, clean.db_path))) == 0);
  std::filesystem::remove_all(tmp);
}

TEST_CASE("image combiner is deterministic and input-sensitive") {
  auto bundle = make_imagecombine();
  auto r1 = bundle.run(imagecombine_args(30, 20, 25, 40));
  auto r2 = bundle.run(imagecombine_args(30, 20, 25, 40));
  auto r3 = bundle.run(imagecombine_args(25, 40, 30, 20));  // swapped operands
  CHECK(r1 == r2);
  CHECK(r1 != r3);
  CHECK_THROWS_AS(bundle.run(imagecombine_args(0, 20, 25, 40)), InputError);
}

TEST_CASE("image combiner checksum matches an independent recomputation") {
  // Recreate the composite rule directly: image 1 occupies columns [0, w1),
  // image 2 columns [w1, w1+w2), rows beyond an image's height stay zero.
  std::uint32_t w1 = 3, h1 = 2, w2 = 2, h2 = 4;
  std::uint32_t out_w = w1 + w2, out_h = std::max(h1, h2);
  std::vector<std::uint32_t> canvas(out_w * out_h, 0);
  for (std::uint32_t y = 0; y < out_h; ++y) {
    for (std::uint32_t x = 0; x < out_w; ++x) {
      if (x < w1 && y < h1)
        canvas[y * out_w + x] = 1u * 0x9e3779b9u + x * 2654435761u + y * 40503u;
      else if (x >= w1 && y < h2)
        canvas[y * out_w + x] = 2u * 0x9e3779b9u + (x - w1) * 2654435761u + y * 40503u;
    }
  }
  std::uint64_t expected = fnv1a64(canvas.data(), canvas.size() * 4);
  auto result = make_imagecombine().run(imagecombine_args(w1, h1, w2, h2));
  CHECK(task::decode_u64(result) == expected);
}

TEST_CASE("image memory demand scales with the output canvas") {
  CHECK(imagecombine_peak_mb(3000, 5000, 3000, 5000) == 120.0);
  CHECK(imagecombine_peak_mb(500, 500, 500, 500) == 2.0);
  auto bundle = make_imagecombine();
  CHECK(bundle.peak_memory_mb(imagecombine_args(3000, 5000, 3000, 5000)) == 120.0);
}

TEST_CASE("mandelbrot digest for a single sample point is derivable by hand") {
  // n=1 samples c = (-1.5, -1.0): z1 = c has |z1|^2 = 3.25 <= 4, z2 escapes.
  auto bundle = make_mandelbrot();
  CHECK(task::decode_u64(bundle.run(task::encode_u32_args({1}))) == 2);
  // Larger grids are deterministic.
  CHECK(bundle.run(task::encode_u32_args({64})) == bundle.run(task::encode_u32_args({64})));
  CHECK_THROWS_AS(bundle.run(task::encode_u32_args({0})), InputError);
}

TEST_CASE("spectral norm agrees with the dense power-iteration oracle") {
  for (std::uint32_t n : {8u, 32u, 100u})
    CHECK(spectralnorm_value(n) == Catch::Approx(spectralnorm_dense_oracle(n)).margin(1e-7));
  // Published value for the n=100 instance.
  CHECK(spectralnorm_value(100) == Catch::Approx(1.274219991).margin(1e-8));

  auto bundle = make_spectralnorm();
  auto result = bundle.run(task::encode_u32_args({100}));
  CHECK(spectralnorm_from_result(result) == spectralnorm_value(100));
}

TEST_CASE("the built-in registry carries all six workloads") {
  auto reg = make_workload_registry();
  for (const char* id :
       {"fibonacci", "nqueens", "virusscan", "imagecombine", "mandelbrot", "spectralnorm"})
    CHECK(reg.contains(id, 1));
  CHECK(reg.all().size() == 6);
}
