#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "ernmf/matrix.hpp"
#include "ernmf/types.hpp"

namespace ernmf {

// Bag-of-words corpus: documents are rows, words are columns.
struct Corpus {
  Index doc_count = 0;
  std::vector<std::string> vocab;            // optional; size = word count
  Eigen::SparseMatrix<double> counts;        // doc_count x word_count
  std::vector<int> labels;                   // optional; size = doc_count
};

struct TfidfResult {
  DataMatrix matrix;     // tf * ln(d / df), rows scaled to unit 1-norm
  IndexList empty_docs;  // rows that had nothing left to normalize
};

TfidfResult tfidf(const Corpus& corpus);

struct ClusterOptions {
  std::string algorithm = "er-spa";  // pipeline tag
  bool use_low_rank = false;
  std::uint64_t seed = 0;
  Index top_k = 5;
  double nnls_tol = 1e-10;
  const std::vector<std::string>* vocab = nullptr;  // for readable reports
  const std::vector<int>* labels = nullptr;         // enables ac / nmi
};

struct ClusterReport {
  std::vector<Index> assignments;    // cluster id per document, in {1..r}
  IndexList anchor_indices;          // anchor word column per topic
  std::vector<std::string> anchor_words;
  std::vector<std::vector<Index>> top_word_indices;  // r rows of top_k columns
  std::vector<std::vector<std::string>> top_words;
  double ac = -1.0;   // -1 when no labels were supplied
  double nmi = -1.0;  // likewise
  bool used_low_rank = false;
  Index zero_row_warnings = 0;  // documents with an all-zero coefficient row
  Index candidate_count = 0;    // ellipsoid candidate-set size, 0 otherwise
};

// Anchor-word discovery on a documents-by-words matrix: pick r word columns
// with the configured pipeline, read cluster coefficients off the anchor
// columns (of the matrix itself, or of its rank-r approximation), assign each
// document to its largest coefficient.
ClusterReport cluster(const DataMatrix& Mdw, Index r,
                      const ClusterOptions& opts = {});

// Best class-to-cluster matching score: the two label vectors partition the
// same documents into at most r parts each; the overlap matrix is matched by
// max_assignment and the matched mass divided by the document count.
double accuracy(const std::vector<int>& classes,
                const std::vector<int>& clusters, Index r);

// Mutual information over the joint contingency table, natural log, divided
// by the mean entropy of the two partitions; 0/0 gives 0.
double nmi(const std::vector<int>& classes, const std::vector<int>& clusters);

// Synthetic corpus with a planted topic structure: a row-stochastic topic
// matrix with one anchor word per topic, and documents drawn as mixtures with
// one dominant topic that defines the label.  noise in [0, 0.5] controls both
// the mixing spread and the count jitter.
Corpus gen_corpus(Index d, Index m, Index r, double noise, std::uint64_t seed);

// Counts file: header "d m nnz", then 1-based "doc word count" triplets.
// Vocab: one word per line.  Labels: one integer per line.
Corpus read_corpus(const std::string& counts_path,
                   const std::string& vocab_path = "",
                   const std::string& labels_path = "");
void write_corpus(const Corpus& corpus, const std::string& counts_path,
                  const std::string& vocab_path = "",
                  const std::string& labels_path = "");

// Plain-text table: one row per topic, anchor word plus its top words.
std::string format_topic_table(const ClusterReport& report);

}  // namespace ernmf
