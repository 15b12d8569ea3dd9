#pragma once

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace voxelsoft {

// ---------------------------------------------------------------------------
// errors

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ShapeMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SimulationDiverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SpawnCollision : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IncompatibleController : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MismatchedHorizons : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// benchmark setting: per-step stiffness commands vs. a field fixed at
// assembly time

enum class ControlMode { kReactive, kInvariant };

inline const char* control_mode_name(ControlMode m) {
  return m == ControlMode::kReactive ? "reactive" : "motor";
}

// ---------------------------------------------------------------------------
// 2D vector

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2 operator-() const { return {-x, -y}; }
  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }

  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::sqrt(x * x + y * y); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

// ---------------------------------------------------------------------------
// seeded RNG
//
// All stochastic code in the library draws from Rng. Distributions are
// hand-rolled on top of mt19937_64 so that a given seed produces the same
// stream on every platform, which the reproducibility contracts rely on.

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent stream seed from a master seed and up to three
// indices (e.g. generation, individual, phase).
inline uint64_t derive_seed(uint64_t master, uint64_t a = 0, uint64_t b = 0,
                            uint64_t c = 0) {
  uint64_t s = splitmix64(master);
  s = splitmix64(s ^ (a + 0x1000000001ULL));
  s = splitmix64(s ^ (b + 0x2000000003ULL));
  s = splitmix64(s ^ (c + 0x3000000005ULL));
  return s;
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(splitmix64(seed) | 1ULL) {
    // warm up: xorshift-style generators start poorly from sparse seeds
    for (int i = 0; i < 4; ++i) next_u64();
  }

  uint64_t next_u64() {
    // xorshift64* — tiny, fast, fully specified
    uint64_t x = state_;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    state_ = x;
    return x * 0x2545f4914f6cdd1dULL;
  }

  // uniform in [0, 1)
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform integer in [lo, hi], inclusive
  int uniform_int(int lo, int hi) {
    uint64_t range = uint64_t(hi - lo) + 1;
    uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return lo + int(x % range);
  }

  // standard normal via Box-Muller (cacheless variant: two uniforms per draw)
  double gaussian() {
    double u1 = double((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    double u2 = double(next_u64() >> 11) * 0x1.0p-53;        // [0, 1)
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  double gaussian(double mean, double stddev) {
    return mean + stddev * gaussian();
  }

  // in-place Fisher-Yates, stable across standard libraries
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = size_t(uniform_int(0, int(i - 1)));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  uint64_t state_;
};

// ---------------------------------------------------------------------------
// number formatting
//
// Shortest representation that round-trips exactly; keeps CSV/JSON artifacts
// byte-stable across runs.

inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// worker pool

// Worker cap: VOXELSOFT_THREADS if set, else hardware concurrency.
inline int max_workers() {
  if (const char* env = std::getenv("VOXELSOFT_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? int(hw) : 1;
}

// Runs fn(i) for i in [0, n). Work items must be independent; results should
// be written to pre-sized slots so the schedule cannot affect the outcome.
template <typename Fn>
void parallel_for(int n, Fn&& fn) {
  int workers = std::min(n, max_workers());
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(size_t(workers));
  for (int w = 0; w < workers; ++w) threads.emplace_back(body);
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace voxelsoft
