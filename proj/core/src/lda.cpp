#include "akmine/lda.hpp"

#include "akmine/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <random>
#include <sstream>
#include <unordered_map>

namespace akmine {

namespace {

void validate_config(const LdaConfig& cfg) {
    if (cfg.k < 2) throw InputError("topic count k must be >= 2");
    if (cfg.alpha && *cfg.alpha <= 0.0) throw InputError("alpha must be > 0");
    if (cfg.beta <= 0.0) throw InputError("beta must be > 0");
    if (cfg.burn_in < 0 || cfg.iterations <= cfg.burn_in) {
        throw InputError("need iterations > burn_in >= 0");
    }
}

// 53-bit uniform in [0,1); tied to the mt19937_64 stream so runs are
// reproducible across platforms.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct SamplerState {
    int n_docs{0};
    int n_topics{0};
    int vocab_size{0};
    std::vector<std::vector<int>> doc_tokens;   // word ids
    std::vector<std::vector<int>> z;            // topic per token
    std::vector<std::vector<int>> doc_topic;    // D x k
    std::vector<std::vector<int>> word_topic;   // V x k
    std::vector<long long> topic_total;         // k

    void check_consistency(long long expected_tokens) const {
        long long assigned = 0;
        for (int t = 0; t < n_topics; ++t) assigned += topic_total[t];
        if (assigned != expected_tokens) {
            throw RuntimeFailure("count conservation violated: " +
                                 std::to_string(assigned) + " assigned of " +
                                 std::to_string(expected_tokens));
        }
        for (int d = 0; d < n_docs; ++d) {
            long long doc_sum = 0;
            for (int t = 0; t < n_topics; ++t) doc_sum += doc_topic[d][t];
            if (doc_sum != static_cast<long long>(doc_tokens[d].size())) {
                throw RuntimeFailure("document topic counts out of sync for doc " +
                                     std::to_string(d));
            }
        }
        std::vector<long long> per_topic(n_topics, 0);
        for (int v = 0; v < vocab_size; ++v) {
            for (int t = 0; t < n_topics; ++t) per_topic[t] += word_topic[v][t];
        }
        for (int t = 0; t < n_topics; ++t) {
            if (per_topic[t] != topic_total[t]) {
                throw RuntimeFailure("word-topic counts out of sync for topic " +
                                     std::to_string(t));
            }
        }
    }
};

}  // namespace

int LdaModel::vocab_index(const std::string& symbol) const {
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        if (vocab[i] == symbol) return static_cast<int>(i);
    }
    return -1;
}

LdaModel fit(const std::vector<TaggedDocument>& docs, const LdaConfig& cfg) {
    validate_config(cfg);

    LdaModel model;
    model.config = cfg;
    model.alpha_used = cfg.resolved_alpha();

    std::unordered_map<std::string, int> vocab_index;
    SamplerState s;
    s.n_docs = static_cast<int>(docs.size());
    s.n_topics = cfg.k;
    s.doc_tokens.resize(docs.size());

    int non_empty = 0;
    for (std::size_t d = 0; d < docs.size(); ++d) {
        model.doc_ids.push_back(docs[d].article_id);
        for (const auto& tok : docs[d].tokens) {
            std::string sym = tok.symbol();
            auto [it, inserted] =
                vocab_index.try_emplace(sym, static_cast<int>(model.vocab.size()));
            if (inserted) model.vocab.push_back(sym);
            s.doc_tokens[d].push_back(it->second);
        }
        if (!s.doc_tokens[d].empty()) ++non_empty;
    }
    if (model.vocab.empty()) throw InputError("empty vocabulary: no tokens in any document");
    if (non_empty < 2) throw InputError("need at least 2 documents with tokens");
    if (cfg.k > s.n_docs) {
        std::cerr << "warning: k=" << cfg.k << " exceeds document count "
                  << s.n_docs << "\n";
    }

    s.vocab_size = static_cast<int>(model.vocab.size());
    const int K = cfg.k;
    const int V = s.vocab_size;
    const double alpha = model.alpha_used;
    const double beta = cfg.beta;

    s.z.resize(s.doc_tokens.size());
    s.doc_topic.assign(s.n_docs, std::vector<int>(K, 0));
    s.word_topic.assign(V, std::vector<int>(K, 0));
    s.topic_total.assign(K, 0);

    std::mt19937_64 rng(cfg.seed);
    long long total_tokens = 0;
    for (int d = 0; d < s.n_docs; ++d) {
        s.z[d].resize(s.doc_tokens[d].size());
        for (std::size_t i = 0; i < s.doc_tokens[d].size(); ++i) {
            int t = std::min(K - 1, static_cast<int>(uniform01(rng) * K));
            s.z[d][i] = t;
            ++s.doc_topic[d][t];
            ++s.word_topic[s.doc_tokens[d][i]][t];
            ++s.topic_total[t];
            ++total_tokens;
        }
    }

    std::vector<double> cumulative(K);
    const double v_beta = V * beta;
    for (int sweep = 0; sweep < cfg.iterations; ++sweep) {
        for (int d = 0; d < s.n_docs; ++d) {
            auto& zd = s.z[d];
            auto& nd = s.doc_topic[d];
            const auto& words = s.doc_tokens[d];
            for (std::size_t i = 0; i < words.size(); ++i) {
                const int w = words[i];
                const int old_t = zd[i];
                --nd[old_t];
                --s.word_topic[w][old_t];
                --s.topic_total[old_t];

                double sum = 0.0;
                auto& nw = s.word_topic[w];
                for (int t = 0; t < K; ++t) {
                    sum += (nd[t] + alpha) * (nw[t] + beta) /
                           (s.topic_total[t] + v_beta);
                    cumulative[t] = sum;
                }
                const double u = uniform01(rng) * sum;
                int new_t = 0;
                while (new_t < K - 1 && cumulative[new_t] < u) ++new_t;

                zd[i] = new_t;
                ++nd[new_t];
                ++nw[new_t];
                ++s.topic_total[new_t];
            }
        }
        if (cfg.validate_every_sweep) s.check_consistency(total_tokens);
    }
    s.check_consistency(total_tokens);

    // point estimates from the final state, priors included
    model.phi.assign(K, std::vector<double>(V, 0.0));
    for (int t = 0; t < K; ++t) {
        const double denom = s.topic_total[t] + v_beta;
        for (int v = 0; v < V; ++v) {
            model.phi[t][v] = (s.word_topic[v][t] + beta) / denom;
        }
    }
    model.theta.assign(s.n_docs, std::vector<double>(K, 0.0));
    for (int d = 0; d < s.n_docs; ++d) {
        const double denom = s.doc_tokens[d].size() + K * alpha;
        for (int t = 0; t < K; ++t) {
            model.theta[d][t] = (s.doc_topic[d][t] + alpha) / denom;
        }
    }
    model.assignments = std::move(s.z);
    model.doc_tokens = std::move(s.doc_tokens);
    return model;
}

int assign_topic(const LdaModel& model, int doc_index) {
    if (doc_index < 0 || doc_index >= static_cast<int>(model.theta.size())) {
        throw InputError("document index out of range: " + std::to_string(doc_index));
    }
    const auto& row = model.theta[doc_index];
    int best = 0;
    for (int t = 1; t < static_cast<int>(row.size()); ++t) {
        if (row[t] > row[best]) best = t;  // ties keep the lowest index
    }
    return best;
}

std::vector<int> assign_all(const LdaModel& model) {
    std::vector<int> topics(model.theta.size());
    for (std::size_t d = 0; d < model.theta.size(); ++d) {
        topics[d] = assign_topic(model, static_cast<int>(d));
    }
    return topics;
}

namespace {

// Within-topic corpus frequency per vocabulary index.
std::vector<std::vector<long long>> topic_symbol_counts(const LdaModel& m) {
    std::vector<std::vector<long long>> counts(
        m.config.k, std::vector<long long>(m.vocab.size(), 0));
    for (std::size_t d = 0; d < m.doc_tokens.size(); ++d) {
        for (std::size_t i = 0; i < m.doc_tokens[d].size(); ++i) {
            counts[m.assignments[d][i]][m.doc_tokens[d][i]] += 1;
        }
    }
    return counts;
}

}  // namespace

std::vector<std::string> top_symbols(const LdaModel& model, int topic, int n) {
    auto counts = topic_symbol_counts(model);
    const auto& row = counts.at(topic);
    std::vector<int> order(model.vocab.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (row[a] != row[b]) return row[a] > row[b];
        return a < b;
    });
    std::vector<std::string> out;
    for (int i = 0; i < n && i < static_cast<int>(order.size()); ++i) {
        out.push_back(model.vocab[order[i]]);
    }
    return out;
}

std::vector<TopicReport> topic_report(const LdaModel& model,
                                      const std::vector<TaggedDocument>& docs,
                                      int n_terms) {
    if (docs.size() != model.doc_ids.size()) {
        throw InputError("topic report needs the documents the model was fitted on");
    }
    const int K = model.config.k;
    auto counts = topic_symbol_counts(model);
    auto doc_topics = assign_all(model);

    std::vector<TopicReport> reports(K);
    std::vector<int> assigned(K, 0);
    for (int t : doc_topics) ++assigned[t];

    for (int t = 0; t < K; ++t) {
        reports[t].topic = t;
        reports[t].share = model.doc_ids.empty()
                               ? 0.0
                               : static_cast<double>(assigned[t]) /
                                     static_cast<double>(model.doc_ids.size());

        // word terms, ranked by within-topic frequency
        std::vector<std::pair<std::string, long long>> words;
        std::vector<long long> concept_freq(kAkConceptCount, 0);
        for (std::size_t v = 0; v < model.vocab.size(); ++v) {
            if (counts[t][v] == 0) continue;
            if (auto tag = parse_tag_symbol(model.vocab[v])) {
                concept_freq[static_cast<std::size_t>(tag->first)] += counts[t][v];
            } else {
                words.emplace_back(model.vocab[v], counts[t][v]);
            }
        }
        std::stable_sort(words.begin(), words.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        if (static_cast<int>(words.size()) > n_terms) words.resize(n_terms);
        reports[t].top_terms = std::move(words);

        for (AkConcept c : all_concepts()) {
            long long f = concept_freq[static_cast<std::size_t>(c)];
            if (f > 0) reports[t].top_concepts.emplace_back(c, f);
        }
        std::stable_sort(reports[t].top_concepts.begin(),
                         reports[t].top_concepts.end(),
                         [](const auto& a, const auto& b) {
                             return a.second > b.second;
                         });
    }

    // distinct tagged terms per article, over the articles assigned to
    // each topic that use the concept at all
    for (std::size_t d = 0; d < docs.size(); ++d) {
        int t = doc_topics[d];
        std::array<int, kAkConceptCount> distinct{};
        for (const auto& [key, term] : docs[d].tag_map) {
            ++distinct[static_cast<std::size_t>(key.first)];
        }
        for (AkConcept c : all_concepts()) {
            int n = distinct[static_cast<std::size_t>(c)];
            if (n == 0) continue;
            auto& table = reports[t].terms_per_article;
            auto it = table.find(c);
            if (it == table.end()) {
                table[c] = {n, n};
            } else {
                it->second.first = std::min(it->second.first, n);
                it->second.second = std::max(it->second.second, n);
            }
        }
    }
    return reports;
}

double coherence(const LdaModel& model,
                 const std::vector<TaggedDocument>& docs,
                 int topic,
                 int n_terms) {
    if (n_terms < 2) throw InputError("coherence needs at least 2 top terms");
    auto top = top_symbols(model, topic, n_terms);
    if (top.size() < 2) return 0.0;

    // document sets of the top symbols
    std::vector<std::vector<bool>> present(top.size(),
                                           std::vector<bool>(docs.size(), false));
    for (std::size_t d = 0; d < docs.size(); ++d) {
        for (const auto& tok : docs[d].tokens) {
            std::string sym = tok.symbol();
            for (std::size_t i = 0; i < top.size(); ++i) {
                if (top[i] == sym) present[i][d] = true;
            }
        }
    }
    std::vector<long long> df(top.size(), 0);
    for (std::size_t i = 0; i < top.size(); ++i) {
        df[i] = std::count(present[i].begin(), present[i].end(), true);
    }

    double score = 0.0;
    for (std::size_t j = 1; j < top.size(); ++j) {
        for (std::size_t i = 0; i < j; ++i) {
            long long co = 0;
            for (std::size_t d = 0; d < docs.size(); ++d) {
                if (present[i][d] && present[j][d]) ++co;
            }
            // df of a top symbol is >= 1: it was assigned in some document
            score += std::log((static_cast<double>(co) + 1.0) /
                              static_cast<double>(std::max<long long>(df[i], 1)));
        }
    }
    return score;
}

double topic_density(const std::vector<int>& doc_topics, int k) {
    if (doc_topics.empty()) throw InputError("topic density needs assignments");
    if (k < 2) throw InputError("topic density needs k >= 2");
    std::vector<long long> histogram(k, 0);
    for (int t : doc_topics) {
        if (t < 0 || t >= k) throw InputError("assignment outside 0..k-1");
        ++histogram[t];
    }
    const double n = static_cast<double>(doc_topics.size());
    double entropy = 0.0;
    for (long long c : histogram) {
        if (c == 0) continue;
        double p = static_cast<double>(c) / n;
        entropy -= p * std::log(p);
    }
    return entropy / std::log(static_cast<double>(k));
}

std::vector<SweepEntry> sweep_k(const std::vector<TaggedDocument>& docs,
                                const std::vector<int>& ks,
                                const LdaConfig& config_template,
                                int n_terms) {
    if (ks.empty()) throw InputError("k sweep needs at least one k");
    std::vector<std::future<SweepEntry>> futures;
    for (int k : ks) {
        LdaConfig cfg = config_template;
        cfg.k = k;
        cfg.seed = config_template.seed + static_cast<std::uint64_t>(k);
        futures.push_back(std::async(std::launch::async, [&docs, cfg, n_terms] {
            LdaModel m = fit(docs, cfg);
            double mean = 0.0;
            for (int t = 0; t < cfg.k; ++t) {
                mean += coherence(m, docs, t, n_terms);
            }
            mean /= cfg.k;
            return SweepEntry{static_cast<double>(cfg.k), mean, cfg.seed};
        }));
    }
    std::vector<SweepEntry> out;
    for (auto& f : futures) out.push_back(f.get());
    return out;
}

std::vector<SweepEntry> sweep_alpha(const std::vector<TaggedDocument>& docs,
                                    const std::vector<double>& alphas,
                                    const LdaConfig& config_template) {
    if (alphas.empty()) throw InputError("alpha sweep needs at least one alpha");
    std::vector<std::future<SweepEntry>> futures;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        LdaConfig cfg = config_template;
        if (alphas[i] <= 0.0) throw InputError("alpha must be > 0");
        cfg.alpha = alphas[i];
        cfg.seed = config_template.seed + i;
        futures.push_back(std::async(std::launch::async, [&docs, cfg] {
            LdaModel m = fit(docs, cfg);
            double density = topic_density(assign_all(m), cfg.k);
            return SweepEntry{*cfg.alpha, density, cfg.seed};
        }));
    }
    std::vector<SweepEntry> out;
    for (auto& f : futures) out.push_back(f.get());
    return out;
}

namespace {

void write_matrix(const std::filesystem::path& path,
                  const std::vector<std::vector<double>>& m) {
    std::ofstream out(path);
    if (!out) throw RuntimeFailure("cannot open for write: " + path.string());
    char buf[64];
    for (const auto& row : m) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.12g", row[i]);
            if (i > 0) out << ' ';
            out << buf;
        }
        out << '\n';
    }
    if (!out) throw RuntimeFailure("write failed: " + path.string());
}

std::vector<std::vector<double>> read_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open matrix file: " + path.string());
    std::vector<std::vector<double>> m;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::vector<double> row;
        double v;
        while (ss >> v) row.push_back(v);
        m.push_back(std::move(row));
    }
    return m;
}

}  // namespace

void save_model(const LdaModel& model, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    {
        std::ofstream out(dir / "vocab.tsv");
        if (!out) throw RuntimeFailure("cannot write vocab table");
        for (std::size_t i = 0; i < model.vocab.size(); ++i) {
            out << i << '\t' << model.vocab[i] << '\n';
        }
    }
    write_matrix(dir / "phi.txt", model.phi);
    write_matrix(dir / "theta.txt", model.theta);
    {
        std::ofstream out(dir / "assignments.tsv");
        for (std::size_t d = 0; d < model.doc_ids.size(); ++d) {
            out << model.doc_ids[d] << '\t'
                << assign_topic(model, static_cast<int>(d)) << '\n';
        }
    }
    {
        std::ofstream out(dir / "token_assignments.tsv");
        for (std::size_t d = 0; d < model.doc_ids.size(); ++d) {
            out << model.doc_ids[d];
            for (std::size_t i = 0; i < model.assignments[d].size(); ++i) {
                out << (i == 0 ? '\t' : ' ') << model.assignments[d][i];
            }
            out << '\n';
        }
    }
    {
        std::ofstream out(dir / "tokens.tsv");
        for (std::size_t d = 0; d < model.doc_ids.size(); ++d) {
            out << model.doc_ids[d];
            for (std::size_t i = 0; i < model.doc_tokens[d].size(); ++i) {
                out << (i == 0 ? '\t' : ' ') << model.doc_tokens[d][i];
            }
            out << '\n';
        }
    }
    {
        nlohmann::ordered_json j;
        j["k"] = model.config.k;
        j["alpha"] = model.alpha_used;
        j["alpha_derived"] = !model.config.alpha.has_value();
        j["beta"] = model.config.beta;
        j["iterations"] = model.config.iterations;
        j["burn_in"] = model.config.burn_in;
        j["seed"] = model.config.seed;
        j["documents"] = model.doc_ids.size();
        j["vocabulary"] = model.vocab.size();
        std::ofstream out(dir / "config.json");
        out << j.dump(2) << '\n';
        if (!out) throw RuntimeFailure("cannot write model config");
    }
}

namespace {

std::vector<std::pair<std::string, std::vector<int>>> read_id_int_lines(
    const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open model file: " + path.string());
    std::vector<std::pair<std::string, std::vector<int>>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string id;
        ss >> id;
        std::vector<int> values;
        int v;
        while (ss >> v) values.push_back(v);
        rows.emplace_back(std::move(id), std::move(values));
    }
    return rows;
}

}  // namespace

LdaModel load_model(const std::filesystem::path& dir) {
    LdaModel model;
    {
        std::ifstream in(dir / "config.json");
        if (!in) throw InputError("cannot open model config in " + dir.string());
        nlohmann::json j = nlohmann::json::parse(in);
        model.config.k = j.at("k").get<int>();
        model.alpha_used = j.at("alpha").get<double>();
        if (!j.value("alpha_derived", false)) {
            model.config.alpha = model.alpha_used;
        }
        model.config.beta = j.at("beta").get<double>();
        model.config.iterations = j.at("iterations").get<int>();
        model.config.burn_in = j.at("burn_in").get<int>();
        model.config.seed = j.at("seed").get<std::uint64_t>();
    }
    {
        std::ifstream in(dir / "vocab.tsv");
        if (!in) throw InputError("cannot open vocab table in " + dir.string());
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::size_t tab = line.find('\t');
            if (tab == std::string::npos) throw InputError("malformed vocab line: " + line);
            model.vocab.push_back(line.substr(tab + 1));
        }
    }
    model.phi = read_matrix(dir / "phi.txt");
    model.theta = read_matrix(dir / "theta.txt");
    for (auto& [id, topics] : read_id_int_lines(dir / "token_assignments.tsv")) {
        model.doc_ids.push_back(id);
        model.assignments.push_back(std::move(topics));
    }
    auto tokens = read_id_int_lines(dir / "tokens.tsv");
    if (tokens.size() != model.doc_ids.size()) {
        throw InputError("model files disagree on document count");
    }
    for (auto& [id, ids] : tokens) {
        model.doc_tokens.push_back(std::move(ids));
    }
    return model;
}

}  // namespace akmine
