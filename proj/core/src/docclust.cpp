#include "ernmf/docclust.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <utility>

#include "ernmf/evalbench.hpp"
#include "ernmf/hungarian.hpp"
#include "ernmf/rng.hpp"
#include "ernmf/svd.hpp"

namespace ernmf {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Triplet = Eigen::Triplet<double>;

// Maps arbitrary label values to dense ids 0..k-1, assigned in sorted order
// of the original values so reports stay deterministic.
std::vector<int> relabel(const std::vector<int>& raw, int* parts) {
  std::map<int, int> ids;
  for (int v : raw) ids.emplace(v, 0);
  int next = 0;
  for (auto& [value, id] : ids) id = next++;
  std::vector<int> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = ids[raw[i]];
  if (parts) *parts = next;
  return out;
}

double entropy(const std::vector<double>& counts, double total) {
  double h = 0.0;
  for (double c : counts)
    if (c > 0.0) h -= (c / total) * std::log(c / total);
  return h;
}

}  // namespace

TfidfResult tfidf(const Corpus& corpus) {
  const Index d = corpus.doc_count;
  const Index m = corpus.counts.cols();
  if (d < 1 || m < 1) throw InputError("tfidf: empty corpus");
  if (corpus.counts.rows() != d)
    throw InputError("tfidf: counts row count does not match doc_count");

  std::vector<Index> df(static_cast<std::size_t>(m), 0);
  for (Index j = 0; j < m; ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(corpus.counts, j); it;
         ++it) {
      if (it.value() < 0.0)
        throw InputError("tfidf: counts must be nonnegative");
      if (it.value() > 0.0) ++df[static_cast<std::size_t>(j)];
    }
  std::vector<double> idf(static_cast<std::size_t>(m));
  for (Index j = 0; j < m; ++j) {
    if (df[static_cast<std::size_t>(j)] == 0)
      throw InputError("tfidf: word " + std::to_string(j + 1) +
                       " appears in no document");
    idf[static_cast<std::size_t>(j)] =
        std::log(static_cast<double>(d) /
                 static_cast<double>(df[static_cast<std::size_t>(j)]));
  }

  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(corpus.counts.nonZeros()));
  std::vector<double> row_sums(static_cast<std::size_t>(d), 0.0);
  for (Index j = 0; j < m; ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(corpus.counts, j); it;
         ++it) {
      const double w = it.value() * idf[static_cast<std::size_t>(j)];
      if (w > 0.0) {
        triplets.emplace_back(it.row(), j, w);
        row_sums[static_cast<std::size_t>(it.row())] += w;
      }
    }

  TfidfResult out;
  for (Index i = 0; i < d; ++i)
    if (row_sums[static_cast<std::size_t>(i)] <= 0.0)
      out.empty_docs.push_back(i);
  for (Triplet& t : triplets) {
    const double s = row_sums[static_cast<std::size_t>(t.row())];
    t = Triplet(t.row(), t.col(), t.value() / s);
  }
  Eigen::SparseMatrix<double> W(d, m);
  W.setFromTriplets(triplets.begin(), triplets.end());
  out.matrix = DataMatrix::sparse(std::move(W));
  return out;
}

ClusterReport cluster(const DataMatrix& Mdw, Index r,
                      const ClusterOptions& opts) {
  const Index d = Mdw.rows();
  if (r < 1) throw InputError("cluster: r must be >= 1");
  if (opts.top_k < 1) throw InputError("cluster: top_k must be >= 1");
  if (opts.vocab && static_cast<Index>(opts.vocab->size()) != Mdw.cols())
    throw InputError("cluster: vocab size does not match the word count");
  if (opts.labels && static_cast<Index>(opts.labels->size()) != d)
    throw InputError("cluster: labels size does not match the document count");
  require_nonnegative(Mdw, "document-word matrix");

  PipelineSpec spec = parse_pipeline_tag(opts.algorithm);
  spec.selector.seed = opts.seed;
  spec.selector.nnls_tol = opts.nnls_tol;
  ClusterReport report;
  report.used_low_rank = opts.use_low_rank;
  report.anchor_indices = run_pipeline(Mdw, r, spec, &report.candidate_count);

  MatrixXd F;
  if (opts.use_low_rank) {
    // Rank-r coefficients without materializing the full approximation:
    // only the anchor columns of U * P are needed.
    const ReducedEmbedding emb = reduce(Mdw, r);
    F.noalias() = emb.U * emb.P(Eigen::all, report.anchor_indices);
  } else {
    F = Mdw.gather_cols(report.anchor_indices);
  }

  report.assignments.resize(static_cast<std::size_t>(d));
  for (Index i = 0; i < d; ++i) {
    Index best = 0;
    double best_value = F(i, 0);
    for (Index j = 1; j < r; ++j)
      if (F(i, j) > best_value) {
        best_value = F(i, j);
        best = j;
      }
    if (F.row(i).cwiseAbs().maxCoeff() == 0.0) {
      best = 0;
      ++report.zero_row_warnings;
    }
    report.assignments[static_cast<std::size_t>(i)] = best + 1;
  }

  const MatrixXd W = weight_matrix(Mdw, report.anchor_indices, opts.nnls_tol);
  report.top_word_indices.resize(static_cast<std::size_t>(r));
  const Index k = std::min(opts.top_k, Mdw.cols());
  for (Index t = 0; t < r; ++t) {
    std::vector<Index> order(static_cast<std::size_t>(Mdw.cols()));
    std::iota(order.begin(), order.end(), Index{0});
    std::partial_sort(order.begin(), order.begin() + k, order.end(),
                      [&](Index a, Index b) {
                        if (W(t, a) != W(t, b)) return W(t, a) > W(t, b);
                        return a < b;
                      });
    order.resize(static_cast<std::size_t>(k));
    report.top_word_indices[static_cast<std::size_t>(t)] = std::move(order);
  }

  if (opts.vocab) {
    for (Index j : report.anchor_indices)
      report.anchor_words.push_back((*opts.vocab)[static_cast<std::size_t>(j)]);
    for (const IndexList& row : report.top_word_indices) {
      std::vector<std::string> words;
      for (Index j : row)
        words.push_back((*opts.vocab)[static_cast<std::size_t>(j)]);
      report.top_words.push_back(std::move(words));
    }
  }

  if (opts.labels) {
    std::vector<int> clusters(report.assignments.size());
    for (std::size_t i = 0; i < clusters.size(); ++i)
      clusters[i] = static_cast<int>(report.assignments[i]);
    report.ac = accuracy(*opts.labels, clusters, r);
    report.nmi = nmi(*opts.labels, clusters);
  }
  return report;
}

double accuracy(const std::vector<int>& classes,
                const std::vector<int>& clusters, Index r) {
  if (classes.size() != clusters.size() || classes.empty())
    throw InputError("accuracy: partitions must cover the same documents");
  if (r < 1) throw InputError("accuracy: r must be >= 1");
  int class_parts = 0, cluster_parts = 0;
  const std::vector<int> a = relabel(classes, &class_parts);
  const std::vector<int> b = relabel(clusters, &cluster_parts);
  if (class_parts > r || cluster_parts > r)
    throw InputError("accuracy: a partition has more than r parts");
  MatrixXd overlap = MatrixXd::Zero(r, r);
  for (std::size_t i = 0; i < a.size(); ++i) overlap(a[i], b[i]) += 1.0;
  double total = 0.0;
  max_assignment(overlap, &total);
  return total / static_cast<double>(a.size());
}

double nmi(const std::vector<int>& classes, const std::vector<int>& clusters) {
  if (classes.size() != clusters.size() || classes.empty())
    throw InputError("nmi: partitions must cover the same documents");
  int ka = 0, kb = 0;
  const std::vector<int> a = relabel(classes, &ka);
  const std::vector<int> b = relabel(clusters, &kb);
  const double n = static_cast<double>(a.size());
  MatrixXd joint = MatrixXd::Zero(ka, kb);
  std::vector<double> ca(static_cast<std::size_t>(ka), 0.0);
  std::vector<double> cb(static_cast<std::size_t>(kb), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint(a[i], b[i]) += 1.0;
    ca[static_cast<std::size_t>(a[i])] += 1.0;
    cb[static_cast<std::size_t>(b[i])] += 1.0;
  }
  double info = 0.0;
  for (int i = 0; i < ka; ++i)
    for (int j = 0; j < kb; ++j) {
      const double nij = joint(i, j);
      if (nij > 0.0)
        info += (nij / n) *
                std::log(n * nij / (ca[static_cast<std::size_t>(i)] *
                                    cb[static_cast<std::size_t>(j)]));
    }
  const double denom = 0.5 * (entropy(ca, n) + entropy(cb, n));
  if (denom <= 0.0) return 0.0;
  return std::clamp(info / denom, 0.0, 1.0);
}

Corpus gen_corpus(Index d, Index m, Index r, double noise,
                  std::uint64_t seed) {
  if (r < 1 || m < r || d < 1)
    throw InputError("gen_corpus: need d >= 1 and m >= r >= 1");
  if (!(noise >= 0.0 && noise <= 0.5))
    throw InputError("gen_corpus: noise must lie in [0, 0.5]");
  rng::Stream stream(seed);

  VectorXd alpha(r);
  for (Index i = 0; i < r; ++i) alpha[i] = std::max(stream.uniform01(), 1e-12);
  MatrixXd W0(r, m);
  W0.leftCols(r) = MatrixXd::Identity(r, r);
  for (Index j = r; j < m; ++j) W0.col(j) = stream.dirichlet(alpha);
  const std::vector<Index> perm = stream.permutation(m);
  MatrixXd W(r, m);
  for (Index j = 0; j < m; ++j) W.col(perm[static_cast<std::size_t>(j)]) = W0.col(j);
  for (Index t = 0; t < r; ++t) W.row(t) /= W.row(t).sum();

  constexpr double kDocLength = 2000.0;
  const VectorXd flat = VectorXd::Ones(r);
  std::vector<Triplet> triplets;
  Corpus corpus;
  corpus.doc_count = d;
  corpus.labels.resize(static_cast<std::size_t>(d));
  for (Index i = 0; i < d; ++i) {
    const Index topic = static_cast<Index>(stream.below(
        static_cast<std::uint64_t>(r)));
    corpus.labels[static_cast<std::size_t>(i)] = static_cast<int>(topic) + 1;
    // Dominance at least 1 - noise >= 0.5 keeps the label the argmax topic.
    const double beta = 1.0 - noise * stream.uniform01();
    VectorXd f = (1.0 - beta) * stream.dirichlet(flat);
    f[topic] += beta;
    const VectorXd doc = W.transpose() * f;
    for (Index j = 0; j < m; ++j) {
      double mass = kDocLength * doc[j];
      if (noise > 0.0)
        mass += noise * std::sqrt(std::max(mass, 0.0)) * stream.gauss();
      const double rounded = std::round(mass);
      if (rounded > 0.0) triplets.emplace_back(i, j, rounded);
    }
  }
  corpus.counts.resize(d, m);
  corpus.counts.setFromTriplets(triplets.begin(), triplets.end());

  corpus.vocab.resize(static_cast<std::size_t>(m));
  for (Index j = 0; j < m; ++j) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "w%04lld", static_cast<long long>(j + 1));
    corpus.vocab[static_cast<std::size_t>(j)] = buf;
  }
  return corpus;
}

Corpus read_corpus(const std::string& counts_path,
                   const std::string& vocab_path,
                   const std::string& labels_path) {
  Corpus corpus;
  const DataMatrix counts = read_sparse_coord(counts_path);
  corpus.doc_count = counts.rows();
  corpus.counts = counts.sparse_values();
  for (Index j = 0; j < corpus.counts.cols(); ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(corpus.counts, j); it;
         ++it)
      if (it.value() < 0.0 || it.value() != std::floor(it.value()))
        throw InputError("read_corpus: counts must be nonnegative integers");

  if (!vocab_path.empty()) {
    std::ifstream in(vocab_path);
    if (!in) throw InputError("read_corpus: cannot open " + vocab_path);
    std::string word;
    while (std::getline(in, word)) {
      if (!word.empty() && word.back() == '\r') word.pop_back();
      if (!word.empty()) corpus.vocab.push_back(word);
    }
    if (static_cast<Index>(corpus.vocab.size()) != corpus.counts.cols())
      throw InputError("read_corpus: vocab size does not match the counts");
  }
  if (!labels_path.empty()) {
    std::ifstream in(labels_path);
    if (!in) throw InputError("read_corpus: cannot open " + labels_path);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      std::istringstream parse(line);
      int value = 0;
      if (!(parse >> value))
        throw InputError("read_corpus: bad label line: " + line);
      corpus.labels.push_back(value);
    }
    if (static_cast<Index>(corpus.labels.size()) != corpus.doc_count)
      throw InputError("read_corpus: label count does not match doc count");
  }
  return corpus;
}

void write_corpus(const Corpus& corpus, const std::string& counts_path,
                  const std::string& vocab_path,
                  const std::string& labels_path) {
  write_sparse_coord(DataMatrix::sparse(corpus.counts), counts_path);
  if (!vocab_path.empty()) {
    std::ofstream out(vocab_path);
    if (!out) throw InputError("write_corpus: cannot open " + vocab_path);
    for (const std::string& word : corpus.vocab) out << word << '\n';
  }
  if (!labels_path.empty()) {
    std::ofstream out(labels_path);
    if (!out) throw InputError("write_corpus: cannot open " + labels_path);
    for (int label : corpus.labels) out << label << '\n';
  }
}

std::string format_topic_table(const ClusterReport& report) {
  std::ostringstream out;
  out << "topic  anchor          top words\n";
  for (std::size_t t = 0; t < report.anchor_indices.size(); ++t) {
    const std::string anchor =
        t < report.anchor_words.size()
            ? report.anchor_words[t]
            : "#" + std::to_string(report.anchor_indices[t] + 1);
    char head[40];
    std::snprintf(head, sizeof head, "%-6zu %-15s ", t + 1, anchor.c_str());
    out << head;
    const bool have_words = t < report.top_words.size();
    const IndexList& ids = report.top_word_indices[t];
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (k) out << ", ";
      if (have_words)
        out << report.top_words[t][k];
      else
        out << "#" << (ids[k] + 1);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace ernmf
