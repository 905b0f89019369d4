#include "topolidar/pairgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace topolidar {

SegmentationMask::SegmentationMask(std::size_t height, std::size_t width,
                                   CellLabel fill)
    : height_(height), width_(width), labels_(height * width, fill) {}

void SegmentationMask::validate_against(const RangeImage& img) const {
  if (height_ != img.height() || width_ != img.width()) {
    throw std::invalid_argument("mask shape does not match image");
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (!img.cells()[i].valid && labels_[i] != CellLabel::Invalid) {
      throw std::invalid_argument("mask labels an invalid image cell");
    }
  }
}

std::size_t SectorLayout::sector_of(std::size_t col) const {
  for (std::size_t s = 0; s < bands.size(); ++s) {
    if (bands[s].contains(col)) return s;
  }
  throw std::out_of_range("column outside sector layout");
}

SectorLayout divide_sectors(std::size_t width, std::size_t n) {
  if (n < 1) throw std::invalid_argument("need at least one sector");
  if (width < n) throw std::invalid_argument("width smaller than sector count");
  SectorLayout layout;
  layout.image_width = width;
  const std::size_t base = width / n;
  const std::size_t extra = width % n;
  std::size_t begin = 0;
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t w = base + (s < extra ? 1 : 0);
    layout.bands.push_back({begin, begin + w});
    begin += w;
  }
  return layout;
}

namespace {

void check_layout(const SegmentationMask& mask, const SectorLayout& layout) {
  if (layout.image_width != mask.width() || layout.bands.empty() ||
      layout.bands.back().end != mask.width()) {
    throw std::invalid_argument("sector layout does not match mask width");
  }
}

void check_sector(const SectorLayout& layout, std::size_t s) {
  if (s >= layout.n_sectors()) throw std::invalid_argument("sector index out of range");
}

}  // namespace

std::vector<std::size_t> dynamic_counts(const SegmentationMask& mask,
                                        const SectorLayout& layout) {
  check_layout(mask, layout);
  std::vector<std::size_t> counts(layout.n_sectors(), 0);
  for (std::size_t s = 0; s < layout.n_sectors(); ++s) {
    const ColumnBand& band = layout.bands[s];
    for (std::size_t r = 0; r < mask.height(); ++r) {
      for (std::size_t c = band.begin; c < band.end; ++c) {
        if (mask.at(r, c) == CellLabel::Dynamic) ++counts[s];
      }
    }
  }
  return counts;
}

std::size_t select_source_sector(const SegmentationMask& mask,
                                 const SectorLayout& layout) {
  const auto counts = dynamic_counts(mask, layout);
  const auto best = std::max_element(counts.begin(), counts.end());
  if (*best == 0) throw std::invalid_argument("no dynamic content");
  return static_cast<std::size_t>(best - counts.begin());
}

std::vector<double> band_occupancy(const SegmentationMask& mask,
                                   const SectorLayout& layout) {
  check_layout(mask, layout);
  std::vector<double> occupancy(layout.n_sectors(), 0.0);
  for (std::size_t s = 0; s < layout.n_sectors(); ++s) {
    const ColumnBand& band = layout.bands[s];
    std::size_t occupied = 0;
    for (std::size_t r = 0; r < mask.height(); ++r) {
      for (std::size_t c = band.begin; c < band.end; ++c) {
        const CellLabel l = mask.at(r, c);
        if (l == CellLabel::Static || l == CellLabel::Dynamic) ++occupied;
      }
    }
    const std::size_t total = mask.height() * band.width();
    occupancy[s] = total == 0 ? 0.0
                              : static_cast<double>(occupied) /
                                    static_cast<double>(total);
  }
  return occupancy;
}

std::vector<std::size_t> select_target_sectors(const RangeImage& img,
                                               const SegmentationMask& mask,
                                               const SectorLayout& layout,
                                               std::size_t source,
                                               std::size_t max_targets,
                                               double occupancy_threshold) {
  mask.validate_against(img);
  check_sector(layout, source);
  if (max_targets < 1) throw std::invalid_argument("max_targets must be >= 1");
  if (!(occupancy_threshold >= 0.0 && occupancy_threshold <= 1.0)) {
    throw std::invalid_argument("occupancy threshold must lie in [0, 1]");
  }
  const auto occupancy = band_occupancy(mask, layout);
  std::vector<std::size_t> candidates;
  for (std::size_t s = 0; s < occupancy.size(); ++s) {
    if (s != source && occupancy[s] < occupancy_threshold) candidates.push_back(s);
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](std::size_t a, std::size_t b) {
                     return occupancy[a] < occupancy[b];
                   });
  if (candidates.size() > max_targets) candidates.resize(max_targets);
  return candidates;
}

std::ptrdiff_t transplant_shift(const SegmentationMask& mask,
                                const SectorLayout& layout, std::size_t source,
                                std::size_t target) {
  check_layout(mask, layout);
  check_sector(layout, source);
  check_sector(layout, target);
  const ColumnBand& src = layout.bands[source];
  const ColumnBand& dst = layout.bands[target];
  const auto base = static_cast<std::ptrdiff_t>(dst.begin) -
                    static_cast<std::ptrdiff_t>(src.begin);

  std::size_t lo = src.width();
  std::size_t hi = 0;
  for (std::size_t r = 0; r < mask.height(); ++r) {
    for (std::size_t c = src.begin; c < src.end; ++c) {
      if (mask.at(r, c) != CellLabel::Dynamic) continue;
      lo = std::min(lo, c - src.begin);
      hi = std::max(hi, c - src.begin);
    }
  }
  if (lo > hi) return base;  // nothing to move
  if (hi - lo + 1 > dst.width()) {
    throw std::invalid_argument("insufficient target width");
  }
  // slide left just enough for the content to end inside the target band
  const std::size_t overflow = hi + 1 > dst.width() ? hi + 1 - dst.width() : 0;
  return base - static_cast<std::ptrdiff_t>(overflow);
}

double azimuth_shift(std::ptrdiff_t column_shift, std::size_t width) {
  return -2.0 * std::numbers::pi * static_cast<double>(column_shift) /
         static_cast<double>(width);
}

ScanPair generate_pair(const RangeImage& img, const SegmentationMask& mask,
                       const SectorLayout& layout, std::size_t source,
                       const std::vector<std::size_t>& targets) {
  mask.validate_against(img);
  check_layout(mask, layout);
  check_sector(layout, source);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    check_sector(layout, targets[i]);
    if (targets[i] == source) {
      throw std::invalid_argument("target sector equals source sector");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (targets[j] == targets[i]) {
        throw std::invalid_argument("duplicate target sector");
      }
    }
  }
  std::vector<std::ptrdiff_t> shifts;
  shifts.reserve(targets.size());
  for (std::size_t t : targets) {
    shifts.push_back(transplant_shift(mask, layout, source, t));
  }

  ScanPair out{img, img, mask};
  SegmentationMask static_mask = mask;
  for (std::size_t r = 0; r < img.height(); ++r) {
    for (std::size_t c = 0; c < img.width(); ++c) {
      if (mask.at(r, c) != CellLabel::Dynamic) continue;
      out.static_scan.invalidate(r, c);
      static_mask.at(r, c) = CellLabel::Invalid;
    }
  }
  out.dynamic_scan = out.static_scan;
  out.mask = static_mask;

  const ColumnBand& src = layout.bands[source];
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const double theta = azimuth_shift(shifts[t], img.width());
    const double cs = std::cos(theta);
    const double sn = std::sin(theta);
    for (std::size_t r = 0; r < img.height(); ++r) {
      for (std::size_t c = src.begin; c < src.end; ++c) {
        if (mask.at(r, c) != CellLabel::Dynamic) continue;
        const RangeCell& from = img.at(r, c);
        const auto dest = static_cast<std::size_t>(
            static_cast<std::ptrdiff_t>(c) + shifts[t]);
        RangeCell& to = out.dynamic_scan.at(r, dest);
        to.x = cs * from.x - sn * from.y;
        to.y = sn * from.x + cs * from.y;
        to.z = from.z;
        to.range = from.range;
        to.valid = true;
        out.mask.at(r, dest) = CellLabel::Dynamic;
      }
    }
  }
  return out;
}

}  // namespace topolidar
