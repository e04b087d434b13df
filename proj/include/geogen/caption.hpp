#pragma once

#include <optional>

#include "geogen/facts.hpp"

namespace geogen {

struct UnrecognizedSentenceError : Error {
    std::size_t index;
    UnrecognizedSentenceError(std::size_t i, const std::string& sentence)
        : Error("sentence " + std::to_string(i) + " matches no caption template: \"" +
                sentence + "\""),
          index(i) {}
};

struct CaptionText {
    std::vector<std::string> sentences;
    std::string flat() const;  // sentences joined with single spaces
};

// One English sentence per fact kind; templates are injective, so distinct
// facts always produce distinct sentences.
std::string fact_to_sentence(const Fact& fact);

// Preamble (point roster) + one sentence per fact, in input order, or in a
// seeded shuffle when shuffle_seed is set (the preamble stays first).
CaptionText caption_facts(const FactSet& facts,
                          std::optional<std::uint64_t> shuffle_seed = std::nullopt);

// Inverse of caption_facts over template output; returns the canonical
// (sorted) fact set regardless of sentence order.
FactSet parse_caption(const std::string& text);

// Sentence splitter used by both parse_caption and the QA leak filter;
// respects decimal points inside numbers.
std::vector<std::string> split_caption_sentences(const std::string& text);

// The template table as shipped in data/templates/caption_templates.txt;
// the file and this constant are pinned to each other by a test.
const std::string& caption_template_table();

}  // namespace geogen
