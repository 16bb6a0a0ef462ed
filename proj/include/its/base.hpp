#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace its {

using Index = Eigen::Index;
using Shape = std::vector<Index>;

/// Flat row-major value storage shared by all tensor code.
using Array = Eigen::ArrayXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;
using MatrixMap = Eigen::Map<RowMatrix>;

/// Malformed or missing input data (corpus lines, embedding files, checkpoints).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numerical failure that invalidates a run (NaN gradients, diverged loss).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string shape_str(const Shape& shape);

Index shape_size(const Shape& shape);

/// Deterministic random stream. Identical seed gives an identical sample
/// stream on every platform: uniforms are built from raw 64-bit draws of a
/// fixed generator (SplitMix64), not from std distributions.
class RngState {
public:
    explicit RngState(std::uint64_t seed) : state_(seed), seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64();

    /// Uniform draw in [lo, hi).
    double uniform(double lo, double hi);

    /// Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n);

    /// Independent child stream; deterministic function of (seed, label).
    RngState fork(std::uint64_t label) const;

private:
    RngState(std::uint64_t state, std::uint64_t seed) : state_(state), seed_(seed) {}

    std::uint64_t state_;
    std::uint64_t seed_ = 0;
};

/// Writes content to path via a temp file in the same directory plus rename,
/// so readers never observe a partial file.
void atomic_write(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

/// Shortest decimal form that round-trips the exact double (via to_chars).
std::string format_double(double v);

}  // namespace its
