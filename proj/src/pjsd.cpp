// Copyright 2026 The Scalefit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "scalefit/pjsd.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "scalefit/errors.hpp"

namespace scalefit::pjsd {

namespace {

std::unordered_map<NGram, std::uint64_t> corpus_counts(
    const std::vector<PhonemeSequence>& corpus, int n) {
    std::unordered_map<NGram, std::uint64_t> counts;
    for (const auto& seq : corpus) {
        if (static_cast<int>(seq.tokens.size()) < n) continue;
        for (std::size_t i = 0; i + n <= seq.tokens.size(); ++i)
            ++counts[encode_ngram(seq.tokens, i, n)];
    }
    return counts;
}

std::uint64_t token_count(const std::vector<PhonemeSequence>& corpus) {
    std::uint64_t total = 0;
    for (const auto& seq : corpus) total += seq.tokens.size();
    return total;
}

}  // namespace

NGram encode_ngram(const std::vector<std::string>& tokens, std::size_t first, int n) {
    NGram out;
    for (std::size_t j = first; j < first + static_cast<std::size_t>(n); ++j) {
        out += std::to_string(tokens[j].size());
        out += ':';
        out += tokens[j];
    }
    return out;
}

int ngram_order(const NGram& g) {
    int order = 0;
    std::size_t pos = 0;
    while (pos < g.size()) {
        const std::size_t colon = g.find(':', pos);
        if (colon == std::string::npos) throw Error("malformed n-gram key");
        const std::size_t len = std::stoul(g.substr(pos, colon - pos));
        pos = colon + 1 + len;
        ++order;
    }
    return order;
}

std::map<NGram, std::uint64_t> extract_ngrams(const PhonemeSequence& seq, int n) {
    if (n < 1) throw Error("n-gram order must be >= 1");
    std::map<NGram, std::uint64_t> grams;
    if (static_cast<int>(seq.tokens.size()) < n) return grams;
    for (std::size_t i = 0; i + n <= seq.tokens.size(); ++i)
        ++grams[encode_ngram(seq.tokens, i, n)];
    return grams;
}

std::vector<NGram> union_support(const std::vector<PhonemeSequence>& a,
                                 const std::vector<PhonemeSequence>& b, int n) {
    if (n < 1) throw Error("n-gram order must be >= 1");
    std::unordered_set<NGram> seen;
    for (const auto* corpus : {&a, &b})
        for (const auto& seq : *corpus) {
            if (static_cast<int>(seq.tokens.size()) < n) continue;
            for (std::size_t i = 0; i + n <= seq.tokens.size(); ++i)
                seen.insert(encode_ngram(seq.tokens, i, n));
        }
    std::vector<NGram> support(seen.begin(), seen.end());
    std::sort(support.begin(), support.end());
    return support;
}

NGramDistribution build_distribution(const std::vector<PhonemeSequence>& corpus, int n,
                                     const std::vector<NGram>& support) {
    if (n < 1) throw Error("n-gram order must be >= 1");
    const auto counts = corpus_counts(corpus, n);

    NGramDistribution dist;
    dist.order = n;
    dist.support = support;
    dist.counts.reserve(support.size());
    for (const auto& g : support) {
        const auto it = counts.find(g);
        const std::uint64_t c = it == counts.end() ? 0 : it->second;
        dist.counts.push_back(c);
        dist.total += c;
    }
    if (dist.total == 0) throw Error("empty distribution: corpus yields no supported n-grams");
    dist.probs.reserve(support.size());
    for (const std::uint64_t c : dist.counts)
        dist.probs.push_back(static_cast<double>(c) / static_cast<double>(dist.total));
    return dist;
}

double jsd(const NGramDistribution& p, const NGramDistribution& q) {
    if (p.order != q.order) throw Error("jsd: mismatched n-gram order");
    if (p.support != q.support) throw Error("jsd: mismatched support");
    // Summed in support order with commutative per-element contributions,
    // so jsd(p, q) and jsd(q, p) are bit-identical.
    double acc = 0.0;
    for (std::size_t i = 0; i < p.probs.size(); ++i) {
        const double pi = p.probs[i];
        const double qi = q.probs[i];
        const double mi = 0.5 * (pi + qi);
        double term = 0.0;
        if (pi > 0.0) term += 0.5 * pi * std::log2(pi / mi);
        if (qi > 0.0) term += 0.5 * qi * std::log2(qi / mi);
        acc += term;
    }
    return std::min(1.0, std::max(0.0, acc));
}

PjsdReport pjsd_report(const std::vector<PhonemeSequence>& generated,
                       const std::vector<PhonemeSequence>& real_corpus,
                       const std::vector<int>& n_values) {
    PjsdReport report;
    report.generated_sequences = generated.size();
    report.real_sequences = real_corpus.size();
    report.generated_tokens = token_count(generated);
    report.real_tokens = token_count(real_corpus);

    for (const int n : n_values) {
        const auto support = union_support(generated, real_corpus, n);
        const auto describe = [n](const char* corpus) {
            return std::string("empty distribution: ") + corpus +
                   " corpus yields no n-grams at n=" + std::to_string(n);
        };
        NGramDistribution gen_dist, real_dist;
        try {
            gen_dist = build_distribution(generated, n, support);
        } catch (const Error&) {
            throw Error(describe("generated"));
        }
        try {
            real_dist = build_distribution(real_corpus, n, support);
        } catch (const Error&) {
            throw Error(describe("real"));
        }
        report.divergence[n] = jsd(gen_dist, real_dist);
        report.support_sizes[n] = support.size();
    }
    return report;
}

std::vector<PhonemeSequence> read_corpus(std::istream& in, const std::string& source_id) {
    std::vector<PhonemeSequence> corpus;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        PhonemeSequence seq;
        seq.source_id = source_id + ":" + std::to_string(line_no);
        std::istringstream tokens(line);
        std::string token;
        while (tokens >> token) seq.tokens.push_back(std::move(token));
        corpus.push_back(std::move(seq));
    }
    return corpus;
}

std::vector<PhonemeSequence> read_corpus_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open corpus file: " + path);
    return read_corpus(in, path);
}

}  // namespace scalefit::pjsd
