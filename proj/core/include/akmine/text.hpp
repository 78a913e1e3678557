#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace akmine {

// Removes markup from an HTML fragment and returns the visible text.
// Script, style and comment blocks are dropped entirely, character
// entities are decoded, and whitespace is collapsed to single spaces.
// Malformed markup is handled by tolerant scanning: an unclosed tag or
// block is treated as closed at end of input.
std::string strip_html(std::string_view html);

// Splits text into lowercase terms. Letters, digits and non-ASCII bytes
// form tokens; everything else separates. Digits-only tokens are dropped,
// mixed alphanumerics ("activemq5") are kept.
std::vector<std::string> tokenize(std::string_view text);

// Surface form -> lemma overrides, consulted before the suffix rules.
using LemmaDict = std::unordered_map<std::string, std::string>;

// Reads a lemma exception dictionary: lines of "surface<TAB>lemma",
// '#' starts a comment line.
LemmaDict load_lemma_exceptions(const std::filesystem::path& path);

// Reduces a lowercase term to a single form. The exception dictionary is
// consulted first; otherwise an ordered suffix-rule table is applied
// (see text.cpp for the rule table). The result is a fixed point:
// lemmatize(lemmatize(t)) == lemmatize(t).
std::string lemmatize(const std::string& term, const LemmaDict& exceptions);

using WordList = std::unordered_set<std::string>;

// Reads a word-list file: one entry per line, '#' starts a comment line.
// Entries are lowercased.
WordList load_word_list(const std::filesystem::path& path);

// Appends terms to a word-list file, one per line. Creates the file if
// missing.
void append_to_word_list(const std::filesystem::path& path,
                         const std::vector<std::string>& terms);

// Fraction of tokens that are common English function words. Used as an
// opt-in language heuristic for records without a language label.
double english_function_word_ratio(std::string_view text);

}  // namespace akmine
