#include "softgait/archive.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "softgait/errors.hpp"
#include "softgait/serialization.hpp"

namespace softgait {

namespace {

constexpr int kArchiveFormatVersion = 1;

int axis_bin(double d, const AxisBounds& axis) {
  const double raw = std::floor(kArchiveBins * (d - axis.lo) / (axis.hi - axis.lo));
  if (raw < 0.0) return 0;
  if (raw > kArchiveBins - 1) return kArchiveBins - 1;
  return static_cast<int>(raw);
}

}  // namespace

void ArchiveBounds::validate() const {
  auto check = [](const AxisBounds& a, const char* name) {
    if (!std::isfinite(a.lo) || !std::isfinite(a.hi) || !(a.lo < a.hi)) {
      throw ConfigError(std::string("qda.bounds.") + name + ": need finite lo < hi");
    }
  };
  check(squish, "squish");
  check(wobble, "wobble");
}

CellIndex bin_index(const GaitResult& result, const ArchiveBounds& bounds) {
  if (!std::isfinite(result.squish) || !std::isfinite(result.wobble)) {
    throw ValidationError("bin_index: non-finite descriptor");
  }
  return {axis_bin(result.squish, bounds.squish), axis_bin(result.wobble, bounds.wobble)};
}

Archive::Archive(ArchiveBounds bounds) : bounds_(bounds) { bounds_.validate(); }

bool Archive::offer(const Genotype& genotype, const GaitResult& result) {
  ++stats_.offered;
  if (result.failed) {
    ++stats_.rejected;
    return false;
  }
  std::optional<Elite>& slot = cells_[flat(bin_index(result, bounds_))];
  if (!slot) {
    slot = Elite{genotype, result};
    ++occupancy_;
    ++stats_.inserted;
    return true;
  }
  if (result.fitness > slot->result.fitness) {
    slot = Elite{genotype, result};
    ++stats_.replaced;
    return true;
  }
  ++stats_.rejected;
  return false;
}

const std::optional<Elite>& Archive::at(CellIndex cell) const {
  if (cell.row < 0 || cell.row >= kArchiveBins || cell.col < 0 || cell.col >= kArchiveBins) {
    throw ValidationError("archive: cell index out of range");
  }
  return cells_[flat(cell)];
}

double Archive::qd_score() const {
  double score = 0.0;
  for (const auto& cell : cells_) {
    if (cell) score += cell->result.fitness;
  }
  return score;
}

const Elite* Archive::best() const {
  const Elite* best = nullptr;
  for (const auto& cell : cells_) {
    if (cell && (!best || cell->result.fitness > best->result.fitness)) best = &*cell;
  }
  return best;
}

std::vector<std::pair<CellIndex, Elite>> Archive::elites() const {
  std::vector<std::pair<CellIndex, Elite>> out;
  out.reserve(occupancy_);
  for (int r = 0; r < kArchiveBins; ++r) {
    for (int c = 0; c < kArchiveBins; ++c) {
      const auto& cell = cells_[flat({r, c})];
      if (cell) out.emplace_back(CellIndex{r, c}, *cell);
    }
  }
  return out;
}

bool Archive::is_consistent() const {
  std::size_t count = 0;
  for (int r = 0; r < kArchiveBins; ++r) {
    for (int c = 0; c < kArchiveBins; ++c) {
      const auto& cell = cells_[flat({r, c})];
      if (!cell) continue;
      ++count;
      if (cell->result.failed || !(bin_index(cell->result, bounds_) == CellIndex{r, c})) {
        return false;
      }
    }
  }
  return count == occupancy_;
}

void Archive::write_jsonl(std::ostream& os) const {
  nlohmann::json header{{"kind", "archive"},
                        {"version", kArchiveFormatVersion},
                        {"bins", kArchiveBins},
                        {"bounds", to_json(bounds_)},
                        {"occupancy", occupancy_},
                        {"stats",
                         {{"offered", stats_.offered},
                          {"inserted", stats_.inserted},
                          {"replaced", stats_.replaced},
                          {"rejected", stats_.rejected}}}};
  os << header.dump() << '\n';
  for (const auto& [cell, elite] : elites()) {
    nlohmann::json line{{"kind", "elite"},
                        {"row", cell.row},
                        {"col", cell.col},
                        {"genes", to_json(elite.genotype)},
                        {"result", to_json(elite.result)}};
    os << line.dump() << '\n';
  }
}

Archive Archive::read_jsonl(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ValidationError("archive: missing header line");
  const auto header = nlohmann::json::parse(line);
  if (header.value("kind", "") != "archive") throw ValidationError("archive: bad header kind");
  if (header.value("version", 0) != kArchiveFormatVersion) {
    throw ValidationError("archive: unsupported format version");
  }
  if (header.value("bins", 0) != kArchiveBins) throw ValidationError("archive: bin count mismatch");

  Archive archive(archive_bounds_from_json(header.at("bounds")));
  const auto& s = header.at("stats");
  archive.stats_ = {s.at("offered").get<long>(), s.at("inserted").get<long>(),
                    s.at("replaced").get<long>(), s.at("rejected").get<long>()};
  const auto count = header.at("occupancy").get<std::size_t>();
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(is, line)) throw ValidationError("archive: truncated elite list");
    const auto j = nlohmann::json::parse(line);
    if (j.value("kind", "") != "elite") throw ValidationError("archive: expected elite line");
    const CellIndex cell{j.at("row").get<int>(), j.at("col").get<int>()};
    Elite elite{genotype_from_json(j.at("genes")), gait_result_from_json(j.at("result"))};
    if (!(bin_index(elite.result, archive.bounds_) == cell)) {
      throw ValidationError("archive: elite does not bin to its recorded cell");
    }
    auto& slot = archive.cells_[flat(cell)];
    if (slot) throw ValidationError("archive: duplicate cell");
    slot = std::move(elite);
    ++archive.occupancy_;
  }
  return archive;
}

}  // namespace softgait
