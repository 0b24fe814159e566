#ifndef OFFLOAD_WORKLOADS_HPP_
#define OFFLOAD_WORKLOADS_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <queue>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "offload/common.hpp"
#include "offload/task.hpp"

namespace offload::workloads {

namespace fs = std::filesystem;
using task::TaskBundle;

// --- fibonacci (naive exponential recursion) ---

inline std::uint64_t fib_naive(std::uint32_t n) {
  if (n < 2) return n;
  return fib_naive(n - 1) + fib_naive(n - 2);
}

// Number of calls the naive recursion makes: 2*F(n+1) - 1.
inline double fib_call_count(std::uint32_t n) {
  double a = 0, b = 1;  // F(0), F(1)
  for (std::uint32_t i = 0; i < n + 1; ++i) {
    double next = a + b;
    a = b;
    b = next;
  }
  return 2 * a - 1;
}

inline TaskBundle make_fibonacci() {
  TaskBundle t;
  t.id = "fibonacci";
  t.run = [](const Bytes& args) {
    auto v = task::decode_u32_args(args);
    if (v.size() != 1 || v[0] > 40) throw InputError("fibonacci: n must be 0..40");
    return task::encode_u64(fib_naive(v[0]));
  };
  t.peak_memory_mb = [](const Bytes&) { return 1.0; };
  t.work_units = [](const Bytes& args) {
    return fib_call_count(task::decode_u32_args(args)[0]) * 0.001;
  };
  t.input_size_proxy = [](const Bytes& args) {
    return static_cast<double>(task::decode_u32_args(args)[0]);
  };
  return t;
}

// --- n-queens (count solutions; splittable by first-queen column regions) ---

// Count non-attacking placements with the first row's queen restricted to
// columns [lo, hi). Backtracking prunes attacked prefixes; the count equals
// the row-constrained exhaustive enumeration.
inline std::uint64_t nqueens_count(int n, int first_lo, int first_hi) {
  std::uint64_t count = 0;
  std::vector<int> cols(static_cast<std::size_t>(n));
  auto attacked = [&](int row, int col) {
    for (int r = 0; r < row; ++r) {
      if (cols[r] == col) return true;
      if (std::abs(cols[r] - col) == row - r) return true;
    }
    return false;
  };
  std::function<void(int)> place = [&](int row) {
    if (row == n) {
      ++count;
      return;
    }
    int lo = row == 0 ? first_lo : 0;
    int hi = row == 0 ? first_hi : n;
    for (int col = lo; col < hi; ++col) {
      if (attacked(row, col)) continue;
      cols[row] = col;
      place(row + 1);
    }
  };
  place(0);
  return count;
}

inline TaskBundle make_nqueens() {
  TaskBundle t;
  t.id = "nqueens";
  t.splittable = true;
  auto parse = [](const Bytes& args) {
    auto v = task::decode_u32_args(args);
    if (v.size() != 3 || v[0] < 1 || v[0] > 10 || v[2] > v[0] || v[1] > v[2])
      throw InputError("nqueens: bad arguments");
    return v;
  };
  t.run = [parse](const Bytes& args) {
    auto v = parse(args);
    return task::encode_u64(nqueens_count(static_cast<int>(v[0]),
                                          static_cast<int>(v[1]),
                                          static_cast<int>(v[2])));
  };
  t.split = [parse](const Bytes& args, int k) {
    auto v = parse(args);
    std::uint32_t n = v[0], lo = v[1], hi = v[2];
    std::vector<Bytes> parts;
    std::uint32_t span = hi - lo;
    std::uint32_t kk = std::min<std::uint32_t>(static_cast<std::uint32_t>(k), std::max(1u, span));
    for (std::uint32_t i = 0; i < static_cast<std::uint32_t>(k); ++i) {
      std::uint32_t a = lo + span * std::min(i, kk) / kk;
      std::uint32_t b = lo + span * std::min(i + 1, kk) / kk;
      parts.push_back(task::encode_u32_args({n, a, b}));
    }
    return parts;
  };
  t.merge = [](const std::vector<Bytes>& partials) {
    std::uint64_t total = 0;
    for (const auto& p : partials) total += task::decode_u64(p);
    return task::encode_u64(total);
  };
  t.peak_memory_mb = [](const Bytes&) { return 1.0; };
  t.work_units = [parse](const Bytes& args) {
    auto v = parse(args);
    // Proportional to the enumerated region of the N^N placement space.
    return (v[2] - v[1]) * std::pow(static_cast<double>(v[0]), v[0] - 1.0) * 1e-5;
  };
  t.input_size_proxy = [parse](const Bytes& args) {
    return static_cast<double>(parse(args)[0]);
  };
  return t;
}

inline Bytes nqueens_args(std::uint32_t n) { return task::encode_u32_args({n, 0, n}); }

// --- virus scanner (substring signature scan; splittable by file partition) ---

// Aho-Corasick multi-pattern matcher; scanning a 10 MB corpus against 1000
// signatures by repeated find() would be quadratic.
class SignatureMatcher {
 public:
  explicit SignatureMatcher(const std::vector<std::string>& patterns) {
    nodes_.push_back({});
    for (const auto& p : patterns) {
      int cur = 0;
      for (unsigned char c : p) {
        if (nodes_[cur].next[c] == 0) {
          nodes_.push_back({});
          nodes_[cur].next[c] = static_cast<int>(nodes_.size()) - 1;
        }
        cur = nodes_[cur].next[c];
      }
      nodes_[cur].terminal = true;
    }
    std::queue<int> bfs;
    for (int c = 0; c < 256; ++c) {
      int v = nodes_[0].next[c];
      if (v) {
        nodes_[v].fail = 0;
        bfs.push(v);
      }
    }
    while (!bfs.empty()) {
      int u = bfs.front();
      bfs.pop();
      for (int c = 0; c < 256; ++c) {
        int v = nodes_[u].next[c];
        if (!v) continue;
        int f = nodes_[u].fail;
        while (f && !nodes_[f].next[c]) f = nodes_[f].fail;
        nodes_[v].fail = nodes_[f].next[c] != v ? nodes_[f].next[c] : 0;
        nodes_[v].terminal = nodes_[v].terminal || nodes_[nodes_[v].fail].terminal;
        bfs.push(v);
      }
    }
  }

  bool matches(const std::string& text) const {
    int state = 0;
    for (unsigned char c : text) {
      while (state && !nodes_[state].next[c]) state = nodes_[state].fail;
      state = nodes_[state].next[c];
      if (nodes_[state].terminal) return true;
    }
    return false;
  }

 private:
  struct Node {
    std::array<int, 256> next{};
    int fail = 0;
    bool terminal = false;
  };
  std::vector<Node> nodes_;
};

inline std::vector<std::string> load_signatures(const std::string& db_path) {
  std::ifstream in(db_path);
  if (!in) throw InputError("cannot read signature db: " + db_path);
  std::vector<std::string> sigs;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) sigs.push_back(line);
  return sigs;
}

inline std::vector<fs::path> list_corpus_files(const std::string& dir) {
  std::vector<fs::path> files;
  if (!fs::is_directory(dir)) throw InputError("corpus dir missing: " + dir);
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  return files;
}

// args: "corpus_dir\ndb_path\nlo\nhi" (file index range; hi clamps to count)
inline Bytes virusscan_args(const std::string& corpus_dir, const std::string& db_path,
                            std::uint64_t lo = 0,
                            std::uint64_t hi = std::uint64_t(-1)) {
  std::ostringstream out;
  out << corpus_dir << '\n' << db_path << '\n' << lo << '\n' << hi;
  return task::encode_string(out.str());
}

struct VirusScanArgs {
  std::string corpus_dir, db_path;
  std::uint64_t lo = 0, hi = 0;
};

inline VirusScanArgs parse_virusscan_args(const Bytes& args) {
  std::istringstream in(task::decode_string(args));
  VirusScanArgs a;
  std::string lo, hi;
  if (!std::getline(in, a.corpus_dir) || !std::getline(in, a.db_path) ||
      !std::getline(in, lo) || !std::getline(in, hi))
    throw InputError("virusscan: bad arguments");
  a.lo = std::stoull(lo);
  a.hi = std::stoull(hi);
  return a;
}

inline TaskBundle make_virusscan() {
  TaskBundle t;
  t.id = "virusscan";
  t.splittable = true;
  auto range = [](const VirusScanArgs& a) {
    auto files = list_corpus_files(a.corpus_dir);
    std::uint64_t hi = std::min<std::uint64_t>(a.hi, files.size());
    std::uint64_t lo = std::min(a.lo, hi);
    return std::tuple(files, lo, hi);
  };
  t.run = [range](const Bytes& args) {
    auto a = parse_virusscan_args(args);
    auto [files, lo, hi] = range(a);
    SignatureMatcher matcher(load_signatures(a.db_path));
    std::uint64_t infected = 0;
    for (std::uint64_t i = lo; i < hi; ++i) {
      std::ifstream in(files[i], std::ios::binary);
      std::ostringstream content;
      content << in.rdbuf();
      if (matcher.matches(content.str())) ++infected;
    }
    return task::encode_u64(infected);
  };
  t.split = [range](const Bytes& args, int k) {
    auto a = parse_virusscan_args(args);
    auto [files, lo, hi] = range(a);
    std::uint64_t span = hi - lo;
    std::vector<Bytes> parts;
    for (int i = 0; i < k; ++i) {
      std::uint64_t p_lo = lo + span * static_cast<std::uint64_t>(i) / k;
      std::uint64_t p_hi = lo + span * static_cast<std::uint64_t>(i + 1) / k;
      parts.push_back(virusscan_args(a.corpus_dir, a.db_path, p_lo, p_hi));
    }
    return parts;
  };
  t.merge = [](const std::vector<Bytes>& partials) {
    std::uint64_t total = 0;
    for (const auto& p : partials) total += task::decode_u64(p);
    return task::encode_u64(total);
  };
  t.peak_memory_mb = [](const Bytes&) { return 8.0; };
  t.work_units = [range](const Bytes& args) {
    auto a = parse_virusscan_args(args);
    auto [files, lo, hi] = range(a);
    return static_cast<double>(hi - lo) * 0.5;  // per-file scan cost
  };
  t.input_size_proxy = [range](const Bytes& args) {
    auto a = parse_virusscan_args(args);
    auto [files, lo, hi] = range(a);
    return static_cast<double>(hi - lo);
  };
  return t;
}

// --- image combiner (side-by-side composite; allocation-heavy) ---

inline Bytes imagecombine_args(std::uint32_t w1, std::uint32_t h1, std::uint32_t w2,
                               std::uint32_t h2) {
  return task::encode_u32_args({w1, h1, w2, h2});
}

inline double imagecombine_peak_mb(std::uint32_t w1, std::uint32_t h1,
                                   std::uint32_t w2, std::uint32_t h2) {
  return static_cast<double>(w1 + w2) * std::max(h1, h2) * 4.0 / 1e6;
}

inline TaskBundle make_imagecombine() {
  TaskBundle t;
  t.id = "imagecombine";
  auto parse = [](const Bytes& args) {
    auto v = task::decode_u32_args(args);
    if (v.size() != 4 || v[0] == 0 || v[1] == 0 || v[2] == 0 || v[3] == 0)
      throw InputError("imagecombine: dimensions must be positive");
    return v;
  };
  t.run = [parse](const Bytes& args) {
    auto v = parse(args);
    std::uint32_t w1 = v[0], h1 = v[1], w2 = v[2], h2 = v[3];
    std::uint32_t out_w = w1 + w2, out_h = std::max(h1, h2);
    // Synthetic source pixels are a function of position; the composite
    // places image 1 left of image 2 on a zeroed canvas.
    std::vector<std::uint32_t> canvas(static_cast<std::size_t>(out_w) * out_h, 0);
    auto pixel = [](std::uint32_t img, std::uint32_t x, std::uint32_t y) {
      return img * 0x9e3779b9u + x * 2654435761u + y * 40503u;
    };
    for (std::uint32_t y = 0; y < h1; ++y)
      for (std::uint32_t x = 0; x < w1; ++x)
        canvas[static_cast<std::size_t>(y) * out_w + x] = pixel(1, x, y);
    for (std::uint32_t y = 0; y < h2; ++y)
      for (std::uint32_t x = 0; x < w2; ++x)
        canvas[static_cast<std::size_t>(y) * out_w + w1 + x] = pixel(2, x, y);
    std::uint64_t checksum = fnv1a64(canvas.data(), canvas.size() * 4);
    return task::encode_u64(checksum);
  };
  t.peak_memory_mb = [parse](const Bytes& args) {
    auto v = parse(args);
    return imagecombine_peak_mb(v[0], v[1], v[2], v[3]);
  };
  t.work_units = [parse](const Bytes& args) {
    auto v = parse(args);
    return static_cast<double>(v[0] + v[2]) * std::max(v[1], v[3]) * 4.0 * 1e-6;
  };
  t.input_size_proxy = [parse](const Bytes& args) {
    auto v = parse(args);
    return static_cast<double>(v[0] + v[2]) * std::max(v[1], v[3]) * 4.0;
  };
  return t;
}

// --- mandelbrot (iteration-count digest over an n x n grid) ---

inline TaskBundle make_mandelbrot() {
  TaskBundle t;
  t.id = "mandelbrot";
  auto parse = [](const Bytes& args) {
    auto v = task::decode_u32_args(args);
    if (v.size() != 1 || v[0] < 1 || v[0] > 4000) throw InputError("mandelbrot: n must be 1..4000");
    return v[0];
  };
  t.run = [parse](const Bytes& args) {
    std::uint32_t n = parse(args);
    constexpr int kMaxIter = 50;
    std::uint64_t digest = 0;
    for (std::uint32_t py = 0; py < n; ++py) {
      for (std::uint32_t px = 0; px < n; ++px) {
        double cr = 2.0 * px / n - 1.5;
        double ci = 2.0 * py / n - 1.0;
        double zr = 0, zi = 0;
        int iter = 0;
        while (iter < kMaxIter && zr * zr + zi * zi <= 4.0) {
          double nzr = zr * zr - zi * zi + cr;
          zi = 2 * zr * zi + ci;
          zr = nzr;
          ++iter;
        }
        digest += static_cast<std::uint64_t>(iter);
      }
    }
    return task::encode_u64(digest);
  };
  t.peak_memory_mb = [](const Bytes&) { return 1.0; };
  t.work_units = [parse](const Bytes& args) {
    double n = parse(args);
    return n * n * 0.002;
  };
  t.input_size_proxy = [parse](const Bytes& args) { return static_cast<double>(parse(args)); };
  return t;
}

// --- spectralnorm (largest singular value of the shootout matrix) ---

inline double spectralnorm_a(std::size_t i, std::size_t j) {
  return 1.0 / (static_cast<double>((i + j) * (i + j + 1)) / 2 + i + 1);
}

inline double spectralnorm_value(std::uint32_t n) {
  std::vector<double> u(n, 1.0), v(n), tmp(n);
  auto mult_a = [n](const std::vector<double>& x, std::vector<double>& out, bool transpose) {
    for (std::uint32_t i = 0; i < n; ++i) {
      double sum = 0;
      for (std::uint32_t j = 0; j < n; ++j)
        sum += (transpose ? spectralnorm_a(j, i) : spectralnorm_a(i, j)) * x[j];
      out[i] = sum;
    }
  };
  for (int iter = 0; iter < 10; ++iter) {
    mult_a(u, tmp, false);
    mult_a(tmp, v, true);
    mult_a(v, tmp, false);
    mult_a(tmp, u, true);
  }
  double vbv = 0, vv = 0;
  for (std::uint32_t i = 0; i < n; ++i) {
    vbv += u[i] * v[i];
    vv += v[i] * v[i];
  }
  return std::sqrt(vbv / vv);
}

inline TaskBundle make_spectralnorm() {
  TaskBundle t;
  t.id = "spectralnorm";
  auto parse = [](const Bytes& args) {
    auto v = task::decode_u32_args(args);
    if (v.size() != 1 || v[0] < 1 || v[0] > 5000)
      throw InputError("spectralnorm: n must be 1..5000");
    return v[0];
  };
  t.run = [parse](const Bytes& args) {
    double norm = spectralnorm_value(parse(args));
    std::uint64_t bits;
    __builtin_memcpy(&bits, &norm, sizeof(bits));
    return task::encode_u64(bits);
  };
  t.peak_memory_mb = [](const Bytes&) { return 2.0; };
  t.work_units = [parse](const Bytes& args) {
    double n = parse(args);
    return n * n * 0.005;
  };
  t.input_size_proxy = [parse](const Bytes& args) { return static_cast<double>(parse(args)); };
  return t;
}

inline double spectralnorm_from_result(const Bytes& result) {
  std::uint64_t bits = task::decode_u64(result);
  double v;
  __builtin_memcpy(&v, &bits, sizeof(v));
  return v;
}

// --- fixtures ---

struct VirusFixture {
  std::string corpus_dir;
  std::string db_path;
  std::uint64_t planted = 0;
  std::uint64_t n_files = 0;
};

// Generate a corpus of random text files plus a signature database, with a
// known number of files carrying a planted signature.
inline VirusFixture make_virus_fixture(const std::string& root, std::uint64_t n_files,
                                       std::uint64_t total_bytes, std::uint64_t n_planted,
                                       std::uint64_t n_signatures, std::uint32_t seed) {
  if (n_planted > n_files) throw InputError("more planted matches than files");
  fs::create_directories(root);
  std::string corpus_dir = root + "/corpus";
  fs::remove_all(corpus_dir);
  fs::create_directories(corpus_dir);
  std::mt19937 rng(seed);
  auto rand_hex = [&rng](std::size_t len) {
    static const char* hex = "0123456789abcdef";
    std::string s;
    std::uniform_int_distribution<int> d(0, 15);
    for (std::size_t i = 0; i < len; ++i) s += hex[d(rng)];
    return s;
  };

  std::vector<std::string> signatures;
  for (std::uint64_t i = 0; i < n_signatures; ++i)
    signatures.push_back("SIG:" + rand_hex(16));
  std::string db_path = root + "/signatures.db";
  {
    std::ofstream db(db_path);
    for (const auto& s : signatures) db << s << '\n';
  }

  // Every n_files/n_planted-th file gets a signature planted mid-file.
  std::uint64_t bytes_per_file = std::max<std::uint64_t>(1, total_bytes / n_files);
  std::uniform_int_distribution<int> letter('a', 'z');
  for (std::uint64_t i = 0; i < n_files; ++i) {
    std::ostringstream name;
    name << corpus_dir << "/file_" << std::setw(6) << std::setfill('0') << i << ".dat";
    std::ofstream out(name.str(), std::ios::binary);
    std::string body(bytes_per_file, ' ');
    for (auto& ch : body) ch = static_cast<char>(letter(rng));
    bool plant = n_planted > 0 && i % std::max<std::uint64_t>(1, n_files / n_planted) == 0 &&
                 i / std::max<std::uint64_t>(1, n_files / n_planted) < n_planted;
    if (plant) {
      const std::string& sig = signatures[i % signatures.size()];
      body.insert(body.size() / 2, sig);
    }
    out << body;
  }

  VirusFixture fx;
  fx.corpus_dir = corpus_dir;
  fx.db_path = db_path;
  fx.n_files = n_files;
  fx.planted = std::min(n_planted, n_files);
  return fx;
}

// Registry with every built-in workload.
inline task::TaskRegistry make_workload_registry() {
  task::TaskRegistry reg;
  reg.add(make_fibonacci());
  reg.add(make_nqueens());
  reg.add(make_virusscan());
  reg.add(make_imagecombine());
  reg.add(make_mandelbrot());
  reg.add(make_spectralnorm());
  return reg;
}

}  // namespace offload::workloads

#endif  // OFFLOAD_WORKLOADS_HPP_
