#pragma once

#include "akmine/corpus.hpp"

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace akmine {

// a = co-occurring articles, b = has A not B, c = has B not A, d = neither.
struct ContingencyTable2x2 {
    long long a{0};
    long long b{0};
    long long c{0};
    long long d{0};

    long long n() const { return a + b + c + d; }
};

struct ChiSquareResult {
    double chi2{0.0};
    double p{1.0};
    bool significant{false};
};

struct SignificanceThresholds {
    double chi2_min{10.0};
    double p_max{0.05};
};

// Upper-tail probability of the chi-square distribution, computed via the
// regularized incomplete gamma function.
double chi_square_survival(double x, int df);

// Pearson chi-square for a 2x2 table, n*(ad-bc)^2 / ((a+b)(c+d)(a+c)(b+d)),
// no continuity correction; p at 1 degree of freedom. Significant only
// when chi2 exceeds thresholds.chi2_min and p is below thresholds.p_max.
// A zero marginal is a degenerate table and an error.
ChiSquareResult chi_square_2x2(const ContingencyTable2x2& t,
                               const SignificanceThresholds& thresholds = {});

struct GroupSummary {
    std::size_t n{0};
    double mean{0.0};
    double median{0.0};
};

struct KruskalResult {
    double h{0.0};
    int df{0};
    double p{1.0};
    std::vector<GroupSummary> group_summaries;
};

// Kruskal-Wallis H with mid-ranks for ties and the tie correction
// C = 1 - sum(t^3 - t) / (N^3 - N); p from the chi-square approximation
// at df = groups - 1. All values identical across groups is an error
// ("no variance").
KruskalResult kruskal_wallis(const std::vector<std::vector<double>>& groups);

struct PairwiseResult {
    std::size_t first{0};
    std::size_t second{0};
    double h{0.0};
    double p{1.0};
    double p_adjusted{1.0};
    bool significant{false};
};

// Two-group Kruskal-Wallis per group pair. Uncorrected p < alpha by
// default; Holm step-down adjustment behind the flag. A pair with no
// variance at all reports h = 0, p = 1.
std::vector<PairwiseResult> pairwise_group_tests(
    const std::vector<std::vector<double>>& groups,
    double alpha = 0.05,
    bool holm = false);

struct KappaResult {
    double kappa{0.0};
    double observed_agreement{0.0};
    double expected_agreement{0.0};
};

// Cohen's kappa between two labelings of the same item set. Expected
// agreement from the raters' marginal label distributions; when both
// raters are constant and equal (p_e = 1), kappa is 1.
KappaResult cohen_kappa(const std::map<std::string, std::string>& rater1,
                        const std::map<std::string, std::string>& rater2);

// A named labeling of articles, e.g. set_name "blog_type".
struct LabelMap {
    std::string set_name;
    std::map<std::string, std::string> labels;  // article id -> value
};

struct CooccurrenceEdge {
    std::string set_a;
    std::string value_a;
    std::string set_b;
    std::string value_b;
    double chi2{0.0};
    double p{1.0};
    int direction{0};  // sign of (a*d - b*c)
};

// One 2x2 table per (value of A, value of B) pair over the shared
// article set; every table sums to the article count.
std::vector<std::pair<std::pair<std::string, std::string>, ContingencyTable2x2>>
build_cooccurrence_tables(const std::map<std::string, std::string>& labels_a,
                          const std::map<std::string, std::string>& labels_b);

// Edges for every value pair passing both significance thresholds with
// positive association; degenerate tables and negative (avoidance)
// associations are skipped and logged.
std::vector<CooccurrenceEdge> significant_cooccurrences(
    const LabelMap& labels_a,
    const LabelMap& labels_b,
    const SignificanceThresholds& thresholds = {},
    std::vector<std::string>* skipped_log = nullptr);

// Undirected DOT graph with edge pen width proportional to chi2.
std::string render_cooccurrence_dot(const std::vector<CooccurrenceEdge>& edges);

struct RelevanceRow {
    std::string topic;
    int relevant_articles{0};
    // Over the pooled qualifying ratings; NaN when no article qualifies.
    double mean_rating;
    double median_rating;
};

// Per topic: articles relevant to the step (any rating >= 2 for a task of
// that step) and the mean/median of their pooled qualifying ratings.
// Level-1 ratings never contribute.
std::vector<RelevanceRow> relevance_table(
    const Corpus& corpus,
    const std::map<std::string, std::string>& topic_labels,
    AddStep step);

}  // namespace akmine
