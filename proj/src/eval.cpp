#include "msseg/eval.hpp"

#include "msseg/error.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>

namespace msseg {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double pairs(double n) { return 0.5 * n * (n - 1.0); }

}  // namespace

FaceLabeling parse_seg(std::istream& source) {
  FaceLabeling out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    const std::string_view t = trim(line);
    if (t.empty()) continue;
    long value = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size() || value < 0) {
      throw FormatError(static_cast<int>(line_no), "expected a non-negative integer label, got '" + std::string(t) + "'");
    }
    out.labels.push_back(value);
  }
  return out;
}

FaceLabeling load_seg_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open segmentation file");
  return parse_seg(in);
}

void write_seg(std::ostream& out, const FaceLabeling& labeling) {
  for (long l : labeling.labels) out << l << '\n';
}

double rand_index_dissimilarity(const FaceLabeling& a, const FaceLabeling& b) {
  if (a.size() != b.size()) {
    throw DimensionError("rand index: labelings have " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()) + " faces");
  }
  const std::size_t n = a.size();
  if (n < 2) throw PreconditionError("rand index needs at least two faces");

  std::map<long, double> count_a, count_b;
  std::map<std::pair<long, long>, double> joint;
  for (std::size_t i = 0; i < n; ++i) {
    count_a[a.labels[i]] += 1.0;
    count_b[b.labels[i]] += 1.0;
    joint[{a.labels[i], b.labels[i]}] += 1.0;
  }
  double same_both = 0.0, same_a = 0.0, same_b = 0.0;
  for (const auto& [key, c] : joint) same_both += pairs(c);
  for (const auto& [key, c] : count_a) same_a += pairs(c);
  for (const auto& [key, c] : count_b) same_b += pairs(c);
  const double total = pairs(static_cast<double>(n));
  // agreements = pairs together in both + pairs apart in both
  const double agree = total + 2.0 * same_both - same_a - same_b;
  return 100.0 * (1.0 - agree / total);
}

double rand_index_dissimilarity(const FaceLabeling& a, const std::vector<FaceLabeling>& truths) {
  if (truths.empty()) throw PreconditionError("rand index: no ground truth given");
  double sum = 0.0;
  for (const auto& t : truths) sum += rand_index_dissimilarity(a, t);
  return sum / static_cast<double>(truths.size());
}

void write_score_header(std::ostream& out) { out << "mesh_id,method,K,score\n"; }

void write_score_row(std::ostream& out, const ScoreRow& row) {
  out << row.mesh_id << ',' << row.method << ',' << row.K << ',' << std::fixed << std::setprecision(4) << row.score
      << std::defaultfloat << '\n';
}

}  // namespace msseg
