#include "dhdp/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dhdp/errors.hpp"

namespace dhdp {

void Vocabulary::validate() const {
  if (size < 1) {
    throw DataError("vocabulary size must be >= 1, got " + std::to_string(size));
  }
  if (grid && grid->vocab_size() != size) {
    throw DataError("vocabulary size " + std::to_string(size) +
                    " does not match grid " + std::to_string(grid->cells_x) +
                    "x" + std::to_string(grid->cells_y) + "x4");
  }
}

std::size_t Corpus::total_tokens() const {
  std::size_t n = 0;
  for (const auto& d : documents) n += d.tokens.size();
  return n;
}

std::size_t Corpus::empty_document_count() const {
  std::size_t n = 0;
  for (const auto& d : documents) {
    if (d.empty()) ++n;
  }
  return n;
}

void Corpus::validate() const {
  vocabulary.validate();
  for (std::size_t j = 0; j < documents.size(); ++j) {
    if (documents[j].doc_index != static_cast<int>(j)) {
      throw DataError("document indices must be consecutive from 0, got " +
                      std::to_string(documents[j].doc_index) + " at position " +
                      std::to_string(j));
    }
    for (int w : documents[j].tokens) {
      if (w < 0 || w >= vocabulary.size) {
        throw DataError("word id out of range: " + std::to_string(w) +
                        " with vocabulary size " + std::to_string(vocabulary.size));
      }
    }
  }
}

Direction quantize_direction(double u, double v) {
  if (u == 0.0 && v == 0.0) {
    throw DataError("no motion direction for the zero flow vector");
  }
  // On (a, b) = (v-u, v+u) the four half-open quadrants are the +-45
  // degree bins; boundary assignment matches the stated convention.
  const double a = v - u;
  const double b = v + u;
  if (a >= 0.0 && b > 0.0) return Direction::kDown;
  if (a < 0.0 && b >= 0.0) return Direction::kRight;
  if (a <= 0.0 && b < 0.0) return Direction::kUp;
  return Direction::kLeft;
}

int word_id(int cell_x, int cell_y, Direction direction, const GridSpec& grid) {
  if (cell_x < 0 || cell_x >= grid.cells_x || cell_y < 0 || cell_y >= grid.cells_y) {
    throw DataError("grid cell (" + std::to_string(cell_x) + "," +
                    std::to_string(cell_y) + ") outside " +
                    std::to_string(grid.cells_x) + "x" + std::to_string(grid.cells_y) +
                    " grid");
  }
  return (cell_y * grid.cells_x + cell_x) * kNumDirections + static_cast<int>(direction);
}

WordParts word_parts(int word, const GridSpec& grid) {
  if (word < 0 || word >= grid.vocab_size()) {
    throw DataError("word id out of range: " + std::to_string(word));
  }
  WordParts p;
  p.direction = static_cast<Direction>(word % kNumDirections);
  const int cell = word / kNumDirections;
  p.cell_x = cell % grid.cells_x;
  p.cell_y = cell / grid.cells_x;
  return p;
}

Corpus extract_words(std::vector<FlowRecord> records, const GridSpec& grid,
                     int frames_per_clip, double magnitude_threshold,
                     ExtractStats* stats) {
  if (frames_per_clip < 1) {
    throw DataError("frames_per_clip must be >= 1");
  }
  if (magnitude_threshold < 0.0) {
    throw DataError("magnitude threshold must be >= 0");
  }

  ExtractStats local;
  local.records = records.size();

  bool sorted = std::is_sorted(records.begin(), records.end(),
                               [](const FlowRecord& a, const FlowRecord& b) {
                                 return a.frame < b.frame;
                               });
  if (!sorted) {
    std::stable_sort(records.begin(), records.end(),
                     [](const FlowRecord& a, const FlowRecord& b) {
                       return a.frame < b.frame;
                     });
    local.resorted = true;
  }

  Corpus corpus;
  corpus.vocabulary.size = grid.vocab_size();
  corpus.vocabulary.grid = grid;
  corpus.vocabulary.validate();

  auto ensure_clip = [&corpus](long clip) {
    while (static_cast<long>(corpus.documents.size()) <= clip) {
      Document d;
      d.doc_index = static_cast<int>(corpus.documents.size());
      corpus.documents.push_back(std::move(d));
    }
  };

  for (const FlowRecord& rec : records) {
    if (rec.frame < 0) {
      throw DataError("negative frame index " + std::to_string(rec.frame));
    }
    // Clips stay aligned with wall clock even when a clip emits no words.
    ensure_clip(rec.frame / frames_per_clip);
    if (std::hypot(rec.u, rec.v) < magnitude_threshold) continue;
    const Direction dir = quantize_direction(rec.u, rec.v);
    const int w = word_id(rec.cell_x, rec.cell_y, dir, grid);
    const long clip = rec.frame / frames_per_clip;
    corpus.documents[static_cast<std::size_t>(clip)].tokens.push_back(w);
    ++local.tokens;
  }

  if (stats) *stats = local;
  return corpus;
}

}  // namespace dhdp
