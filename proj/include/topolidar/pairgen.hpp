#ifndef TOPOLIDAR_PAIRGEN_HPP
#define TOPOLIDAR_PAIRGEN_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "topolidar/geometry.hpp"

namespace topolidar {

enum class CellLabel : std::uint8_t { Invalid, Ground, Static, Dynamic };

/// Per-cell labels aligned to a RangeImage, row-major.
class SegmentationMask {
 public:
  SegmentationMask() = default;
  SegmentationMask(std::size_t height, std::size_t width,
                   CellLabel fill = CellLabel::Invalid);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  CellLabel& at(std::size_t r, std::size_t c) { return labels_[r * width_ + c]; }
  CellLabel at(std::size_t r, std::size_t c) const {
    return labels_[r * width_ + c];
  }
  const std::vector<CellLabel>& labels() const { return labels_; }

  /// Throws unless the shape matches and every invalid image cell is labeled
  /// Invalid.
  void validate_against(const RangeImage& img) const;

  bool operator==(const SegmentationMask&) const = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<CellLabel> labels_;
};

/// Half-open column range [begin, end).
struct ColumnBand {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t width() const { return end - begin; }
  bool contains(std::size_t col) const { return col >= begin && col < end; }
  bool operator==(const ColumnBand&) const = default;
};

struct SectorLayout {
  std::size_t image_width = 0;
  std::vector<ColumnBand> bands;

  std::size_t n_sectors() const { return bands.size(); }
  std::size_t sector_of(std::size_t col) const;
};

/// Contiguous, near-equal column bands; earlier bands absorb the remainder.
SectorLayout divide_sectors(std::size_t width, std::size_t n = 8);

/// Dynamic-labeled cell count per band.
std::vector<std::size_t> dynamic_counts(const SegmentationMask& mask,
                                        const SectorLayout& layout);

/// Band with the most dynamic cells (ties: smaller index).
std::size_t select_source_sector(const SegmentationMask& mask,
                                 const SectorLayout& layout);

/// Fraction of cells in each band labeled Static or Dynamic.
std::vector<double> band_occupancy(const SegmentationMask& mask,
                                   const SectorLayout& layout);

/// Up to max_targets bands other than `source` whose occupancy is below the
/// threshold, by ascending occupancy then index.
std::vector<std::size_t> select_target_sectors(const RangeImage& img,
                                               const SegmentationMask& mask,
                                               const SectorLayout& layout,
                                               std::size_t source,
                                               std::size_t max_targets,
                                               double occupancy_threshold = 0.02);

struct ScanPair {
  RangeImage static_scan;
  RangeImage dynamic_scan;
  /// Labels of dynamic_scan.
  SegmentationMask mask;
};

/// Column shift applied when moving the source band's dynamic content into
/// `target`. Throws "insufficient target width" when it does not fit.
std::ptrdiff_t transplant_shift(const SegmentationMask& mask,
                                const SectorLayout& layout, std::size_t source,
                                std::size_t target);

/// Rotation about z matching a column shift under the projection's azimuth
/// convention (columns run clockwise).
double azimuth_shift(std::ptrdiff_t column_shift, std::size_t width);

/**
 * @brief Builds a static/dynamic training pair from one labeled scan.
 *
 * The static scan drops every dynamic cell. The dynamic scan starts from the
 * static scan and receives a copy of the source band's dynamic cells in each
 * target band: columns are shifted and (x, y) rotated about z by the
 * matching azimuth so the stored range is unchanged.
 */
ScanPair generate_pair(const RangeImage& img, const SegmentationMask& mask,
                       const SectorLayout& layout, std::size_t source,
                       const std::vector<std::size_t>& targets);

}  // namespace topolidar

#endif  // TOPOLIDAR_PAIRGEN_HPP
