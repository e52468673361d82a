#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace saem {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// A point in the p-dimensional open parameter space. Coordinates are on the
// model's unconstrained internal scale (log/logit/atanh transformed where
// the natural parameter is constrained).
using ParamVector = Vector;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct SaemError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonFiniteEvaluation : SaemError {
  using SaemError::SaemError;
};
struct DimensionMismatch : SaemError {
  using SaemError::SaemError;
};
// Model returned something violating its own contract (e.g. an information
// matrix with asymmetry above 1e-10).
struct ModelContractError : SaemError {
  using SaemError::SaemError;
};
struct SingularGamma : SaemError {
  using SaemError::SaemError;
};
struct DivergedParameter : SaemError {
  using SaemError::SaemError;
};
struct IndefiniteInformation : SaemError {
  using SaemError::SaemError;
};
struct EmptyWindow : SaemError {
  using SaemError::SaemError;
};
struct ConfigError : SaemError {
  using SaemError::SaemError;
};
struct DataFormatError : SaemError {
  using SaemError::SaemError;
};

// ---------------------------------------------------------------------------
// RNG
// ---------------------------------------------------------------------------

// Seeded pseudorandom stream. One Rng per chain; never shared across runs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(gen_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(gen_);
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

// Fixed stream-splitting: derive an independent stream seed from a master
// seed and a stream id (splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------
// Parameter bounds
// ---------------------------------------------------------------------------

// Per-coordinate open-interval bounds. Models that transform all natural
// constraints away declare the unbounded box.
struct ParamBounds {
  Vector lower;
  Vector upper;

  static ParamBounds unbounded(Eigen::Index p) {
    ParamBounds b;
    b.lower = Vector::Constant(p, -std::numeric_limits<double>::infinity());
    b.upper = Vector::Constant(p, std::numeric_limits<double>::infinity());
    return b;
  }

  bool strictly_inside(const Vector& theta) const {
    if (theta.size() != lower.size()) return false;
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
      if (!(theta[j] > lower[j] && theta[j] < upper[j])) return false;
    }
    return true;
  }
};

inline bool all_finite(const Vector& v) { return v.allFinite(); }
inline bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace saem
