#include "dhdp/corpus_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "dhdp/errors.hpp"

namespace dhdp {

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

long parse_long(const std::string& text, const std::string& context) {
  long value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw DataError(context + ": bad integer '" + text + "'");
  }
  return value;
}

double parse_double(const std::string& text, const std::string& context) {
  if (text == "nan" || text == "-nan") {
    return std::numeric_limits<double>::quiet_NaN();
  }
  try {
    std::size_t pos = 0;
    double value = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    throw DataError(context + ": bad number '" + text + "'");
  }
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) fields.push_back(field);
  if (!line.empty() && line.back() == sep) fields.push_back("");
  return fields;
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  int n = std::snprintf(buf, sizeof(buf), "%.17g", x);
  // Prefer the shortest representation that still round-trips.
  for (int prec = 1; prec < 17; ++prec) {
    char shorter[40];
    std::snprintf(shorter, sizeof(shorter), "%.*g", prec, x);
    if (std::strtod(shorter, nullptr) == x) return shorter;
  }
  return std::string(buf, static_cast<std::size_t>(n));
}

Corpus read_corpus(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError(path + ": missing header line");
  }
  strip_cr(line);
  const std::string prefix = "#vocab_size=";
  if (line.rfind(prefix, 0) != 0) {
    throw DataError(path + ": missing '#vocab_size=' header");
  }
  Corpus corpus;
  corpus.vocabulary.size =
      static_cast<int>(parse_long(line.substr(prefix.size()), path + " header"));
  if (corpus.vocabulary.size < 1) {
    throw DataError(path + ": vocabulary size must be >= 1");
  }

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    Document doc;
    doc.doc_index = static_cast<int>(corpus.documents.size());
    if (!line.empty()) {
      const std::string where = path + ":" + std::to_string(line_no);
      std::size_t tab = line.find('\t');
      const std::string id_text = line.substr(0, tab);
      const long id = parse_long(id_text, where + " doc id");
      if (id != doc.doc_index) {
        throw DataError(where + ": doc ids must be consecutive from 0, expected " +
                        std::to_string(doc.doc_index) + " got " + std::to_string(id));
      }
      if (tab != std::string::npos) {
        std::istringstream tokens(line.substr(tab + 1));
        std::string tok;
        while (tokens >> tok) {
          const long w = parse_long(tok, where + " token");
          if (w < 0 || w >= corpus.vocabulary.size) {
            throw DataError(where + ": word id out of range: " + tok +
                            " with vocabulary size " +
                            std::to_string(corpus.vocabulary.size));
          }
          doc.tokens.push_back(static_cast<int>(w));
        }
      }
    }
    corpus.documents.push_back(std::move(doc));
  }
  corpus.validate();
  return corpus;
}

void write_corpus(const Corpus& corpus, const std::string& path) {
  corpus.validate();
  std::ofstream out = open_output(path);
  out << "#vocab_size=" << corpus.vocabulary.size << "\n";
  for (const Document& doc : corpus.documents) {
    out << doc.doc_index << '\t';
    for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
      if (i) out << ' ';
      out << doc.tokens[i];
    }
    out << '\n';
  }
  if (!out) throw DataError("failed writing " + path);
}

std::vector<FlowRecord> read_flow_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError(path + ": empty flow file, expected header");
  }
  strip_cr(line);
  if (line != "frame,cell_x,cell_y,u,v") {
    throw DataError(path + ": expected header 'frame,cell_x,cell_y,u,v'");
  }
  std::vector<FlowRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    auto fields = split(line, ',');
    if (fields.size() != 5) {
      throw DataError(where + ": expected 5 fields, got " +
                      std::to_string(fields.size()));
    }
    FlowRecord rec;
    rec.frame = parse_long(fields[0], where + " frame");
    rec.cell_x = static_cast<int>(parse_long(fields[1], where + " cell_x"));
    rec.cell_y = static_cast<int>(parse_long(fields[2], where + " cell_y"));
    rec.u = parse_double(fields[3], where + " u");
    rec.v = parse_double(fields[4], where + " v");
    records.push_back(rec);
  }
  return records;
}

void write_flow_csv(const std::vector<FlowRecord>& records, const std::string& path) {
  std::ofstream out = open_output(path);
  out << "frame,cell_x,cell_y,u,v\n";
  for (const FlowRecord& rec : records) {
    out << rec.frame << ',' << rec.cell_x << ',' << rec.cell_y << ','
        << format_double(rec.u) << ',' << format_double(rec.v) << '\n';
  }
  if (!out) throw DataError("failed writing " + path);
}

std::vector<LabeledDoc> read_labels_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError(path + ": empty labels file, expected header");
  }
  strip_cr(line);
  if (line != "doc_id,label") {
    throw DataError(path + ": expected header 'doc_id,label'");
  }
  std::vector<LabeledDoc> labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    auto fields = split(line, ',');
    if (fields.size() != 2) {
      throw DataError(where + ": expected 2 fields");
    }
    LabeledDoc l;
    l.doc_index = static_cast<int>(parse_long(fields[0], where + " doc_id"));
    l.label = static_cast<int>(parse_long(fields[1], where + " label"));
    if (l.label != 0 && l.label != 1) {
      throw DataError(where + ": label must be 0 or 1, got " + fields[1]);
    }
    labels.push_back(l);
  }
  return labels;
}

void write_labels_csv(const std::vector<LabeledDoc>& labels, const std::string& path) {
  std::ofstream out = open_output(path);
  out << "doc_id,label\n";
  for (const LabeledDoc& l : labels) {
    out << l.doc_index << ',' << l.label << '\n';
  }
  if (!out) throw DataError("failed writing " + path);
}

std::vector<ScoredDoc> read_scores_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError(path + ": empty scores file, expected header");
  }
  strip_cr(line);
  if (line != "doc_id,score,n_tokens") {
    throw DataError(path + ": expected header 'doc_id,score,n_tokens'");
  }
  std::vector<ScoredDoc> scores;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    auto fields = split(line, ',');
    if (fields.size() != 3) {
      throw DataError(where + ": expected 3 fields");
    }
    ScoredDoc s;
    s.doc_index = static_cast<int>(parse_long(fields[0], where + " doc_id"));
    s.score = parse_double(fields[1], where + " score");
    s.n_tokens = parse_long(fields[2], where + " n_tokens");
    scores.push_back(s);
  }
  return scores;
}

void write_scores_csv(const std::vector<ScoredDoc>& scores, const std::string& path) {
  std::ofstream out = open_output(path);
  out << "doc_id,score,n_tokens\n";
  for (const ScoredDoc& s : scores) {
    out << s.doc_index << ',' << format_double(s.score) << ',' << s.n_tokens << '\n';
  }
  if (!out) throw DataError("failed writing " + path);
}

}  // namespace dhdp
