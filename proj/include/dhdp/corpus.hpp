#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace dhdp {

// Quantised motion direction in image coordinates (x right, y down).
enum class Direction : int { kUp = 0, kRight = 1, kDown = 2, kLeft = 3 };

inline constexpr int kNumDirections = 4;

struct GridSpec {
  int cells_x = 0;
  int cells_y = 0;

  int vocab_size() const { return cells_x * cells_y * kNumDirections; }
};

struct Vocabulary {
  int size = 0;
  std::optional<GridSpec> grid;

  // size >= 1; when grid metadata is present, size == cells_x*cells_y*4.
  void validate() const;
};

struct Document {
  int doc_index = 0;
  std::vector<int> tokens;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
};

// Ordered: documents are not exchangeable under the dynamic model.
struct Corpus {
  Vocabulary vocabulary;
  std::vector<Document> documents;

  std::size_t total_tokens() const;
  std::size_t empty_document_count() const;
  // Consecutive doc indices from 0, all token ids in [0, V).
  void validate() const;
};

// One grid cell's mean optical flow on one frame, in pixels/frame.
struct FlowRecord {
  long frame = 0;
  int cell_x = 0;
  int cell_y = 0;
  double u = 0.0;
  double v = 0.0;
};

// Bins at +-45 degrees, half open so every nonzero vector lands in
// exactly one bin: right [-45,45), down [45,135), left [135,180] u
// [-180,-135), up [-135,-45). Throws on the zero vector.
Direction quantize_direction(double u, double v);

// Cell-major, direction-minor packing: (cell_y*cells_x + cell_x)*4 + dir.
int word_id(int cell_x, int cell_y, Direction direction, const GridSpec& grid);

struct WordParts {
  int cell_x = 0;
  int cell_y = 0;
  Direction direction = Direction::kUp;
};
WordParts word_parts(int word, const GridSpec& grid);

struct ExtractStats {
  std::size_t records = 0;
  std::size_t tokens = 0;
  bool resorted = false;
};

// Flow records -> visual-word corpus. A record emits a token iff its
// magnitude is >= threshold; clip index is frame / frames_per_clip and
// clips without words become empty documents.
Corpus extract_words(std::vector<FlowRecord> records, const GridSpec& grid,
                     int frames_per_clip, double magnitude_threshold,
                     ExtractStats* stats = nullptr);

}  // namespace dhdp
