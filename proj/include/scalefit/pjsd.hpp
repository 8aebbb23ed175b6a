// Copyright 2026 The Scalefit Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Phoneme n-gram Jensen-Shannon divergence between a generated corpus
// and a real corpus. Divergences use log base 2, so values live in
// [0, 1]. n-grams never span sequence boundaries.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace scalefit::pjsd {

// One utterance: an ordered list of opaque phoneme symbols. Symbols are
// compared by exact string equality; normalization is the caller's job.
struct PhonemeSequence {
    std::vector<std::string> tokens;
    std::string source_id;
};

// n-grams are stored length-prefix encoded ("2:ab" + "1:c" for (ab, c)),
// which is collision-free for arbitrary symbol strings and cheap to key.
using NGram = std::string;

NGram encode_ngram(const std::vector<std::string>& tokens, std::size_t first, int n);
int ngram_order(const NGram& g);  // number of symbols in an encoded key

// All L-n+1 contiguous windows of `seq` as a count map; empty when the
// sequence is shorter than n. Throws for n < 1.
std::map<NGram, std::uint64_t> extract_ngrams(const PhonemeSequence& seq, int n);

// Sorted union of the n-grams observed in either corpus.
std::vector<NGram> union_support(const std::vector<PhonemeSequence>& a,
                                 const std::vector<PhonemeSequence>& b, int n);

// Empirical distribution over a fixed support; zero-mass support elements
// are retained so two distributions over the same support align index-wise.
struct NGramDistribution {
    int order = 0;             // n
    std::uint64_t total = 0;   // Z: corpus count restricted to the support
    std::vector<NGram> support;        // sorted
    std::vector<std::uint64_t> counts; // aligned with support
    std::vector<double> probs;         // counts / Z

    std::size_t support_size() const { return support.size(); }
};

// Aggregates counts across sequences and normalizes over `support`.
// Throws "empty distribution" when no supported n-gram occurs.
NGramDistribution build_distribution(const std::vector<PhonemeSequence>& corpus, int n,
                                     const std::vector<NGram>& support);

// Jensen-Shannon divergence in bits: with m = (p+q)/2,
// jsd = KL(p||m)/2 + KL(q||m)/2. Requires identical order and support.
double jsd(const NGramDistribution& p, const NGramDistribution& q);

struct PjsdReport {
    std::map<int, double> divergence;          // n -> pJSD_n
    std::map<int, std::size_t> support_sizes;  // n -> |union support|
    std::size_t generated_sequences = 0;
    std::size_t real_sequences = 0;
    std::uint64_t generated_tokens = 0;
    std::uint64_t real_tokens = 0;
};

// Divergence per n over the union support of the two corpora.
PjsdReport pjsd_report(const std::vector<PhonemeSequence>& generated,
                       const std::vector<PhonemeSequence>& real_corpus,
                       const std::vector<int>& n_values = {1, 2, 3, 4, 5});

// One sequence per line, whitespace-separated phoneme tokens, UTF-8.
std::vector<PhonemeSequence> read_corpus(std::istream& in, const std::string& source_id);
std::vector<PhonemeSequence> read_corpus_file(const std::string& path);

}  // namespace scalefit::pjsd
