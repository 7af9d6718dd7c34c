#ifndef MSSEG_EVAL_HPP
#define MSSEG_EVAL_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace msseg {

/// Per-face segment ids; ids need not be contiguous.
struct FaceLabeling {
  std::vector<long> labels;

  std::size_t size() const { return labels.size(); }
};

/// One integer per non-blank line. Throws FormatError naming the line.
FaceLabeling parse_seg(std::istream& source);
FaceLabeling load_seg_file(const std::string& path);
void write_seg(std::ostream& out, const FaceLabeling& labeling);

/// 100 (1 - RI), computed from the contingency table in O(N + labels^2).
double rand_index_dissimilarity(const FaceLabeling& a, const FaceLabeling& b);

/// Mean dissimilarity against several ground truths.
double rand_index_dissimilarity(const FaceLabeling& a, const std::vector<FaceLabeling>& truths);

struct ScoreRow {
  std::string mesh_id;
  std::string method;
  int K = 0;
  double score = 0.0;
};

void write_score_header(std::ostream& out);
void write_score_row(std::ostream& out, const ScoreRow& row);

}  // namespace msseg

#endif  // MSSEG_EVAL_HPP
