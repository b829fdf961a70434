#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "softgait/evaluation.hpp"
#include "softgait/morphology.hpp"

namespace softgait {

inline constexpr int kArchiveBins = 10;

struct AxisBounds {
  double lo = 0.0;
  double hi = 1.0;
  bool operator==(const AxisBounds&) const = default;
};

struct ArchiveBounds {
  AxisBounds squish{};
  AxisBounds wobble{};

  void validate() const;
  bool operator==(const ArchiveBounds&) const = default;
};

/// Row indexes the squish axis, col the wobble axis.
struct CellIndex {
  int row = 0;
  int col = 0;
  bool operator==(const CellIndex&) const = default;
};

/// floor(bins * (d - lo) / (hi - lo)) per axis, clamped into [0, bins - 1].
/// Throws ValidationError for non-finite descriptors.
CellIndex bin_index(const GaitResult& result, const ArchiveBounds& bounds);

struct Elite {
  Genotype genotype;
  GaitResult result;
  bool operator==(const Elite&) const = default;
};

struct ArchiveStats {
  long offered = 0;
  long inserted = 0;  // into an empty cell
  long replaced = 0;  // displaced a weaker incumbent
  long rejected = 0;  // failed, tied or weaker
  bool operator==(const ArchiveStats&) const = default;
};

/// 10x10 grid of elites over (squish, wobble). Each cell keeps the fittest
/// result ever offered to it; ties keep the incumbent.
class Archive {
 public:
  explicit Archive(ArchiveBounds bounds = {});

  /// Returns true if the candidate entered the archive.
  bool offer(const Genotype& genotype, const GaitResult& result);

  const std::optional<Elite>& at(CellIndex cell) const;
  const ArchiveBounds& bounds() const { return bounds_; }
  const ArchiveStats& stats() const { return stats_; }
  std::size_t occupancy() const { return occupancy_; }
  double qd_score() const;
  /// Fittest elite, first in row-major order on ties; nullptr when empty.
  const Elite* best() const;
  /// Occupied cells in row-major order.
  std::vector<std::pair<CellIndex, Elite>> elites() const;

  /// Every elite re-bins to its own cell.
  bool is_consistent() const;

  /// Line-delimited JSON: one header line (bounds, stats, occupancy) followed
  /// by one line per elite.
  void write_jsonl(std::ostream& os) const;
  static Archive read_jsonl(std::istream& is);

  bool operator==(const Archive&) const = default;

 private:
  static std::size_t flat(CellIndex c) {
    return static_cast<std::size_t>(c.row * kArchiveBins + c.col);
  }

  ArchiveBounds bounds_;
  std::array<std::optional<Elite>, kArchiveBins * kArchiveBins> cells_{};
  std::size_t occupancy_ = 0;
  ArchiveStats stats_{};
};

}  // namespace softgait
