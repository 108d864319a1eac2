#pragma once

namespace crisisgt::resources {

// Contents of data/stopwords-en-v1.txt, data/disaster_keywords.txt and
// data/lexicon.json, embedded at build time.
extern const char* const kStopwords;
extern const char* const kDisasterKeywords;
extern const char* const kLexicon;

}  // namespace crisisgt::resources
