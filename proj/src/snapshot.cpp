#include "dhdp/snapshot.hpp"

#include <fstream>
#include <sstream>

#include "dhdp/corpus_io.hpp"
#include "dhdp/errors.hpp"

namespace dhdp {

namespace {

std::string expect_line(std::istream& in, const std::string& path) {
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError(path + ": truncated snapshot");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::string expect_field(std::istream& in, const std::string& key,
                         const std::string& path) {
  const std::string line = expect_line(in, path);
  const std::string prefix = key + "=";
  if (line.rfind(prefix, 0) != 0) {
    throw DataError(path + ": expected '" + key + "=', got '" + line + "'");
  }
  return line.substr(prefix.size());
}

template <typename T>
std::vector<T> parse_row(const std::string& text, std::size_t count,
                         const std::string& path, const std::string& what) {
  std::istringstream ss(text);
  std::vector<T> values;
  T v;
  while (ss >> v) values.push_back(v);
  if (values.size() != count) {
    throw DataError(path + ": expected " + std::to_string(count) + " " + what +
                    " values, got " + std::to_string(values.size()));
  }
  return values;
}

}  // namespace

void write_snapshot(const ModelSnapshot& snap, const std::string& path) {
  snap.validate();
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "dhdp-snapshot\n";
  out << "format_version=" << snap.format_version << "\n";
  out << "model=" << to_string(snap.hyper.model_kind) << "\n";
  out << "vocab_size=" << snap.vocab_size << "\n";
  out << "alpha=" << format_double(snap.hyper.alpha) << "\n";
  out << "gamma=" << format_double(snap.hyper.gamma) << "\n";
  out << "eta=" << format_double(snap.hyper.eta) << "\n";
  out << "delta=" << format_double(snap.hyper.delta) << "\n";
  out << "topics=" << snap.num_topics << "\n";

  auto write_row = [&out](const std::string& key, const auto& values) {
    out << key << "=";
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out << ' ';
      out << values[i];
    }
    out << "\n";
  };
  write_row("m_all", snap.m_all);
  write_row("m_window", snap.m_window);
  write_row("m_last_doc", snap.m_last_doc);
  write_row("l_total", snap.l_total);

  std::size_t triples = 0;
  for (const auto& row : snap.l_words) triples += row.size();
  out << "l_sparse=" << triples << "\n";
  for (int topic = 0; topic < snap.num_topics; ++topic) {
    for (const auto& [word, count] : snap.l_words[static_cast<std::size_t>(topic)]) {
      out << topic << ' ' << word << ' ' << count << "\n";
    }
  }
  out << "end\n";
  if (!out) throw DataError("failed writing " + path);
}

ModelSnapshot read_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  if (expect_line(in, path) != "dhdp-snapshot") {
    throw DataError(path + ": not a dhdp snapshot file");
  }
  ModelSnapshot snap;
  snap.format_version = std::stoi(expect_field(in, "format_version", path));
  if (snap.format_version != 1) {
    throw DataError(path + ": unsupported format_version " +
                    std::to_string(snap.format_version));
  }
  snap.hyper.model_kind = model_kind_from_string(expect_field(in, "model", path));
  snap.vocab_size = std::stoi(expect_field(in, "vocab_size", path));
  snap.hyper.alpha = std::stod(expect_field(in, "alpha", path));
  snap.hyper.gamma = std::stod(expect_field(in, "gamma", path));
  snap.hyper.eta = std::stod(expect_field(in, "eta", path));
  snap.hyper.delta = std::stod(expect_field(in, "delta", path));
  snap.num_topics = std::stoi(expect_field(in, "topics", path));
  if (snap.num_topics < 0) throw DataError(path + ": negative topic count");

  const auto k = static_cast<std::size_t>(snap.num_topics);
  snap.m_all = parse_row<int>(expect_field(in, "m_all", path), k, path, "m_all");
  snap.m_window = parse_row<int>(expect_field(in, "m_window", path), k, path, "m_window");
  snap.m_last_doc =
      parse_row<int>(expect_field(in, "m_last_doc", path), k, path, "m_last_doc");
  snap.l_total =
      parse_row<std::int64_t>(expect_field(in, "l_total", path), k, path, "l_total");

  const long triples = std::stol(expect_field(in, "l_sparse", path));
  snap.l_words.assign(k, {});
  for (long i = 0; i < triples; ++i) {
    std::istringstream ss(expect_line(in, path));
    int topic = 0, word = 0, count = 0;
    if (!(ss >> topic >> word >> count)) {
      throw DataError(path + ": bad l_sparse triple");
    }
    if (topic < 0 || topic >= snap.num_topics) {
      throw DataError(path + ": l_sparse topic out of range");
    }
    snap.l_words[static_cast<std::size_t>(topic)].emplace_back(word, count);
  }
  if (expect_line(in, path) != "end") {
    throw DataError(path + ": missing end marker");
  }
  snap.validate();
  return snap;
}

}  // namespace dhdp
