#include "akmine/stats.hpp"

#include "akmine/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace akmine {

namespace {

// Regularized lower incomplete gamma P(a,x) by series expansion,
// converges fast for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a,x) by continued fraction
// (modified Lentz), converges fast for x >= a + 1.
double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double regularized_gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw InputError("invalid incomplete gamma arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_contfrac(a, x);
}

}  // namespace

double chi_square_survival(double x, int df) {
    if (df < 1) throw InputError("degrees of freedom must be >= 1");
    if (x < 0.0) throw InputError("chi-square statistic must be >= 0");
    return regularized_gamma_q(0.5 * df, 0.5 * x);
}

ChiSquareResult chi_square_2x2(const ContingencyTable2x2& t,
                               const SignificanceThresholds& thresholds) {
    if (t.a < 0 || t.b < 0 || t.c < 0 || t.d < 0) {
        throw InputError("contingency table counts must be nonnegative");
    }
    const double a = static_cast<double>(t.a);
    const double b = static_cast<double>(t.b);
    const double c = static_cast<double>(t.c);
    const double d = static_cast<double>(t.d);
    const double n = a + b + c + d;
    if (n < 1) throw InputError("contingency table is empty");
    const double r1 = a + b, r2 = c + d, c1 = a + c, c2 = b + d;
    if (r1 == 0 || r2 == 0 || c1 == 0 || c2 == 0) {
        throw InputError("degenerate table: a marginal is zero");
    }
    ChiSquareResult result;
    const double det = a * d - b * c;
    result.chi2 = n * det * det / (r1 * r2 * c1 * c2);
    result.p = chi_square_survival(result.chi2, 1);
    result.significant =
        result.chi2 > thresholds.chi2_min && result.p < thresholds.p_max;
    return result;
}

namespace {

struct RankedValue {
    double value;
    std::size_t group;
    double rank;
};

// Pools the groups, sorts, assigns mid-ranks to ties. Returns the ranked
// values and the tie term sum(t^3 - t).
std::pair<std::vector<RankedValue>, double> rank_with_ties(
    const std::vector<std::vector<double>>& groups) {
    std::vector<RankedValue> pooled;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (double v : groups[g]) pooled.push_back({v, g, 0.0});
    }
    std::sort(pooled.begin(), pooled.end(),
              [](const RankedValue& x, const RankedValue& y) {
                  return x.value < y.value;
              });
    double tie_term = 0.0;
    std::size_t i = 0;
    while (i < pooled.size()) {
        std::size_t j = i;
        while (j < pooled.size() && pooled[j].value == pooled[i].value) ++j;
        const double mid =
            (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t m = i; m < j; ++m) pooled[m].rank = mid;
        const double t = static_cast<double>(j - i);
        if (t > 1.0) tie_term += t * t * t - t;
        i = j;
    }
    return {std::move(pooled), tie_term};
}

double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    std::size_t n = values.size();
    if (n == 0) return std::numeric_limits<double>::quiet_NaN();
    return n % 2 == 1 ? values[n / 2]
                      : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

KruskalResult kruskal_wallis(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) throw InputError("need at least 2 groups");
    for (const auto& g : groups) {
        if (g.empty()) throw InputError("groups must be nonempty");
    }
    std::size_t total = 0;
    for (const auto& g : groups) total += g.size();
    if (total < 3) throw InputError("need at least 3 values overall");

    auto [pooled, tie_term] = rank_with_ties(groups);
    const double n = static_cast<double>(total);
    const double correction = 1.0 - tie_term / (n * n * n - n);
    if (correction == 0.0) {
        throw InputError("no variance: all values are identical");
    }

    std::vector<double> rank_sum(groups.size(), 0.0);
    for (const auto& rv : pooled) rank_sum[rv.group] += rv.rank;

    double sum_term = 0.0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        sum_term += rank_sum[g] * rank_sum[g] / static_cast<double>(groups[g].size());
    }
    double h = (12.0 * sum_term) / (n * (n + 1.0)) - 3.0 * (n + 1.0);
    h /= correction;
    if (h < 0.0) h = 0.0;  // guard fp noise from the rank identity

    KruskalResult result;
    result.h = h;
    result.df = static_cast<int>(groups.size()) - 1;
    result.p = chi_square_survival(h, result.df);
    for (const auto& g : groups) {
        GroupSummary s;
        s.n = g.size();
        s.mean = std::accumulate(g.begin(), g.end(), 0.0) /
                 static_cast<double>(g.size());
        s.median = median_of(g);
        result.group_summaries.push_back(s);
    }
    return result;
}

std::vector<PairwiseResult> pairwise_group_tests(
    const std::vector<std::vector<double>>& groups,
    double alpha,
    bool holm) {
    if (groups.size() < 2) throw InputError("need at least 2 groups");
    std::vector<PairwiseResult> results;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        for (std::size_t j = i + 1; j < groups.size(); ++j) {
            PairwiseResult r;
            r.first = i;
            r.second = j;
            try {
                auto kw = kruskal_wallis({groups[i], groups[j]});
                r.h = kw.h;
                r.p = kw.p;
            } catch (const InputError&) {
                // a constant pair shows no difference
                r.h = 0.0;
                r.p = 1.0;
            }
            results.push_back(r);
        }
    }
    if (holm) {
        std::vector<std::size_t> order(results.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return results[a].p < results[b].p;
        });
        const double m = static_cast<double>(results.size());
        double running = 0.0;
        for (std::size_t rank = 0; rank < order.size(); ++rank) {
            double adjusted = (m - static_cast<double>(rank)) * results[order[rank]].p;
            running = std::max(running, std::min(1.0, adjusted));
            results[order[rank]].p_adjusted = running;
        }
        for (auto& r : results) r.significant = r.p_adjusted < alpha;
    } else {
        for (auto& r : results) {
            r.p_adjusted = r.p;
            r.significant = r.p < alpha;
        }
    }
    return results;
}

KappaResult cohen_kappa(const std::map<std::string, std::string>& rater1,
                        const std::map<std::string, std::string>& rater2) {
    if (rater1.empty()) throw InputError("kappa needs at least one item");
    std::string unmatched;
    for (const auto& [id, label] : rater1) {
        if (rater2.count(id) == 0) unmatched += (unmatched.empty() ? "" : ", ") + id;
    }
    for (const auto& [id, label] : rater2) {
        if (rater1.count(id) == 0) unmatched += (unmatched.empty() ? "" : ", ") + id;
    }
    if (!unmatched.empty()) {
        throw InputError("item sets differ between raters; unmatched: " + unmatched);
    }

    std::map<std::string, double> marginal1, marginal2;
    double agree = 0.0;
    const double n = static_cast<double>(rater1.size());
    for (const auto& [id, label1] : rater1) {
        const std::string& label2 = rater2.at(id);
        marginal1[label1] += 1.0;
        marginal2[label2] += 1.0;
        if (label1 == label2) agree += 1.0;
    }

    KappaResult result;
    result.observed_agreement = agree / n;
    double expected = 0.0;
    for (const auto& [label, count1] : marginal1) {
        auto it = marginal2.find(label);
        if (it != marginal2.end()) {
            expected += (count1 / n) * (it->second / n);
        }
    }
    result.expected_agreement = expected;
    if (expected >= 1.0) {
        // both raters constant and equal: observed agreement is 1
        result.kappa = 1.0;
    } else {
        result.kappa = (result.observed_agreement - expected) / (1.0 - expected);
    }
    return result;
}

std::vector<std::pair<std::pair<std::string, std::string>, ContingencyTable2x2>>
build_cooccurrence_tables(const std::map<std::string, std::string>& labels_a,
                          const std::map<std::string, std::string>& labels_b) {
    if (labels_a.size() != labels_b.size()) {
        throw InputError("label maps must cover the same article set");
    }
    std::set<std::string> values_a, values_b;
    for (const auto& [id, v] : labels_a) {
        if (labels_b.count(id) == 0) {
            throw InputError("label maps must cover the same article set; '" +
                             id + "' is missing");
        }
        values_a.insert(v);
    }
    for (const auto& [id, v] : labels_b) values_b.insert(v);

    std::vector<std::pair<std::pair<std::string, std::string>, ContingencyTable2x2>>
        tables;
    for (const auto& va : values_a) {
        for (const auto& vb : values_b) {
            ContingencyTable2x2 t;
            for (const auto& [id, a_value] : labels_a) {
                const bool has_a = a_value == va;
                const bool has_b = labels_b.at(id) == vb;
                if (has_a && has_b) ++t.a;
                else if (has_a) ++t.b;
                else if (has_b) ++t.c;
                else ++t.d;
            }
            tables.push_back({{va, vb}, t});
        }
    }
    return tables;
}

std::vector<CooccurrenceEdge> significant_cooccurrences(
    const LabelMap& labels_a,
    const LabelMap& labels_b,
    const SignificanceThresholds& thresholds,
    std::vector<std::string>* skipped_log) {
    auto log = [&](const std::string& line) {
        if (skipped_log) skipped_log->push_back(line);
    };
    std::vector<CooccurrenceEdge> edges;
    for (const auto& [pair, table] : build_cooccurrence_tables(labels_a.labels,
                                                               labels_b.labels)) {
        const long long det = table.a * table.d - table.b * table.c;
        ChiSquareResult r;
        try {
            r = chi_square_2x2(table, thresholds);
        } catch (const InputError&) {
            log("skipped degenerate table (" + labels_a.set_name + "=" +
                pair.first + ", " + labels_b.set_name + "=" + pair.second + ")");
            continue;
        }
        if (!r.significant) continue;
        if (det <= 0) {
            log("skipped negative association (" + labels_a.set_name + "=" +
                pair.first + ", " + labels_b.set_name + "=" + pair.second + ")");
            continue;
        }
        CooccurrenceEdge e;
        e.set_a = labels_a.set_name;
        e.value_a = pair.first;
        e.set_b = labels_b.set_name;
        e.value_b = pair.second;
        e.chi2 = r.chi2;
        e.p = r.p;
        e.direction = det > 0 ? 1 : (det < 0 ? -1 : 0);
        edges.push_back(std::move(e));
    }
    return edges;
}

namespace {

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

}  // namespace

std::string render_cooccurrence_dot(const std::vector<CooccurrenceEdge>& edges) {
    std::ostringstream out;
    out << "graph cooccurrence {\n";
    out << "  node [shape=box];\n";
    std::set<std::pair<std::string, std::string>> nodes;
    for (const auto& e : edges) {
        nodes.insert({e.set_a, e.value_a});
        nodes.insert({e.set_b, e.value_b});
    }
    for (const auto& [set_name, value] : nodes) {
        out << "  \"" << dot_escape(set_name + ":" + value) << "\" [label=\""
            << dot_escape(value) << "\"];\n";
    }
    char buf[64];
    for (const auto& e : edges) {
        std::snprintf(buf, sizeof(buf), "%.3f", e.chi2 / 10.0);
        out << "  \"" << dot_escape(e.set_a + ":" + e.value_a) << "\" -- \""
            << dot_escape(e.set_b + ":" + e.value_b) << "\" [penwidth=" << buf;
        std::snprintf(buf, sizeof(buf), "%.2f", e.chi2);
        out << ", label=\"chi2=" << buf << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

std::vector<RelevanceRow> relevance_table(
    const Corpus& corpus,
    const std::map<std::string, std::string>& topic_labels,
    AddStep step) {
    std::map<std::string, std::pair<int, std::vector<double>>> per_topic;
    for (const auto& [id, topic] : topic_labels) {
        per_topic.try_emplace(topic);
    }
    for (const auto& article : corpus.articles) {
        auto it = topic_labels.find(article.id);
        if (it == topic_labels.end()) continue;
        std::vector<double> qualifying;
        for (const auto& r : article.ratings) {
            if (r.add_step == step && r.rating >= 2) {
                qualifying.push_back(static_cast<double>(r.rating));
            }
        }
        if (qualifying.empty()) continue;
        auto& [count, pooled] = per_topic[it->second];
        ++count;
        pooled.insert(pooled.end(), qualifying.begin(), qualifying.end());
    }
    std::vector<RelevanceRow> rows;
    for (const auto& [topic, data] : per_topic) {
        RelevanceRow row;
        row.topic = topic;
        row.relevant_articles = data.first;
        if (data.second.empty()) {
            row.mean_rating = std::numeric_limits<double>::quiet_NaN();
            row.median_rating = std::numeric_limits<double>::quiet_NaN();
        } else {
            row.mean_rating = std::accumulate(data.second.begin(),
                                              data.second.end(), 0.0) /
                              static_cast<double>(data.second.size());
            row.median_rating = median_of(data.second);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace akmine
