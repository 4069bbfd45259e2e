#include "bookml/app/synth.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "bookml/error.hpp"
#include "bookml/rng.hpp"

namespace bookml::app {

namespace {

constexpr std::array<std::string_view, 10> kNegative = {"terrible", "awful",  "boring",  "waste", "disappointing",
                                                        "poorly",   "worst",  "dull",    "bad",   "tedious"};
constexpr std::array<std::string_view, 8> kMixed = {"okay",     "average", "decent", "mixed",
                                                    "alright",  "uneven",  "fair",   "mediocre"};
constexpr std::array<std::string_view, 10> kPositive = {"great",     "excellent", "wonderful", "loved",  "amazing",
                                                        "fantastic", "enjoyable", "superb",    "best",   "brilliant"};
constexpr std::array<std::string_view, 12> kFiller = {"the", "a",    "this", "and", "of",  "it",
                                                      "is",  "very", "was",  "for", "but", "to"};
constexpr std::array<std::string_view, 16> kSyllables = {"ka", "lo", "mi", "ren", "to", "sa", "vel", "dor",
                                                         "an", "bri", "co", "ta", "mur", "el", "is", "pon"};
constexpr std::array<double, 5> kScoreShare = {0.07, 0.05, 0.09, 0.19, 0.60};

std::vector<std::string> neutral_words(Rng& rng, std::size_t n) {
  std::vector<std::string> words;
  for (std::size_t i = 0; i < n; ++i) {
    std::string w;
    const auto parts = 2 + uniform_index(rng, 2);
    for (std::uint64_t p = 0; p < parts; ++p) w += kSyllables[uniform_index(rng, kSyllables.size())];
    words.push_back(std::move(w));
  }
  return words;
}

int draw_score(Rng& rng) {
  double u = uniform01(rng);
  for (int s = 0; s < 5; ++s) {
    if (u < kScoreShare[static_cast<std::size_t>(s)]) return s + 1;
    u -= kScoreShare[static_cast<std::size_t>(s)];
  }
  return 5;
}

// Adjacent scores share pools, so 1/2 and 4/5 are hard to tell apart while
// low versus high stays easy.
std::string_view polar_word(Rng& rng, int score) {
  const double u = uniform01(rng);
  int pool = score <= 2 ? 0 : score == 3 ? 1 : 2;
  if (score == 2 && u < 0.3) pool = 1;
  if (score == 4 && u < 0.3) pool = 1;
  if (score == 3 && u < 0.4) pool = u < 0.2 ? 0 : 2;
  if (pool == 0) return kNegative[uniform_index(rng, kNegative.size())];
  if (pool == 1) return kMixed[uniform_index(rng, kMixed.size())];
  return kPositive[uniform_index(rng, kPositive.size())];
}

class Writer {
 public:
  Writer(const SynthOptions& o, Rng& rng, const std::vector<std::string>& neutral)
      : opts_(o), rng_(rng), neutral_(neutral) {}

  std::string text(int score, std::size_t words, bool punctuate) {
    std::string out;
    for (std::size_t i = 0; i < words; ++i) {
      if (i > 0) {
        if (punctuate && uniform01(rng_) < 0.08) out += ',';
        if (punctuate && uniform01(rng_) < 0.02) {
          out += '\n';
        } else {
          out += ' ';
        }
      }
      if (uniform01(rng_) < opts_.correlation) {
        out += polar_word(rng_, score);
      } else if (uniform01(rng_) < 0.35) {
        out += kFiller[uniform_index(rng_, kFiller.size())];
      } else {
        out += neutral_[uniform_index(rng_, neutral_.size())];
      }
    }
    if (punctuate && uniform01(rng_) < 0.05) out += " \"really\" so";
    return out;
  }

 private:
  const SynthOptions& opts_;
  Rng& rng_;
  const std::vector<std::string>& neutral_;
};

void put_field(std::string& line, std::string_view v, bool first = false) {
  if (!first) line += ',';
  const bool quote = v.empty() || v.find_first_of(",\"\n\r") != std::string_view::npos;
  if (!quote) {
    line += v;
    return;
  }
  line += '"';
  for (char c : v) {
    if (c == '"') line += '"';
    line += c;
  }
  line += '"';
}

void put_empty(std::string& line) { line += ','; }

std::string book_title(std::size_t b, const std::vector<std::string>& neutral) {
  std::string t = neutral[b % neutral.size()];
  t[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(t[0])));
  t += ' ' + neutral[(b * 7 + 3) % neutral.size()];
  if (b % 5 == 0) t += ", Volume " + std::to_string(b / 5 + 1);
  if (b % 11 == 0) t += " (\"Collected\" Edition)";
  t += " #" + std::to_string(b);
  return t;
}

}  // namespace

SynthStats write_synthetic(const SynthOptions& opts, std::ostream& ratings, std::ostream& books) {
  if (opts.rows == 0 || opts.books == 0 || opts.users == 0) throw_config("synth: rows, books and users must be positive");
  if (!(opts.correlation >= 0.0 && opts.correlation <= 1.0)) throw_config("synth: correlation must be in [0, 1]");
  if (opts.fixed_score && (*opts.fixed_score < 1 || *opts.fixed_score > 5)) throw_config("synth: score must be 1..5");

  Rng rng(opts.seed);
  const auto neutral = neutral_words(rng, 300);
  Writer writer(opts, rng, neutral);
  SynthStats stats;

  std::string line;
  line.reserve(4096);
  line = "Title,description,authors,image,previewLink,publisher,publishedDate,infoLink,categories,ratingsCount\n";
  books << line;
  for (std::size_t b = 0; b < opts.books; ++b) {
    line.clear();
    put_field(line, book_title(b, neutral), true);
    put_field(line, writer.text(4, 12, true));
    put_field(line, "['Author " + std::to_string(b % 97) + "']");
    put_field(line, "http://books.example/img/" + std::to_string(b));
    put_field(line, "http://books.example/preview/" + std::to_string(b));
    put_field(line, "Publisher " + std::to_string(b % 13));
    put_field(line, std::to_string(1950 + b % 70));
    put_field(line, "http://books.example/info/" + std::to_string(b));
    put_field(line, b % 3 == 0 ? "['Fiction']" : "['Nonfiction']");
    if (b % 4 == 0) {
      put_empty(line);
    } else {
      put_field(line, std::to_string(1 + b % 40) + ".0");
    }
    line += '\n';
    books << line;
    ++stats.book_records;
    if (b % 250 == 7) {
      // Same title again; prepare keeps the first row.
      books << line;
      ++stats.book_records;
    }
  }

  ratings << "Id,Title,Price,User_id,profileName,review/helpfulness,review/score,review/time,review/summary,review/text\n";
  const auto malformed_target = static_cast<std::size_t>(std::llround(opts.malformed_fraction * double(opts.rows)));
  // Malformed records are spread evenly so their count is exact.
  const std::size_t malformed_stride = malformed_target > 0 ? opts.rows / malformed_target : 0;
  char buf[64];
  for (std::size_t r = 0; r < opts.rows; ++r) {
    const auto book = static_cast<std::size_t>(uniform_index(rng, opts.books));
    const auto user = static_cast<std::size_t>(uniform_index(rng, opts.users));
    const int score = opts.fixed_score ? *opts.fixed_score : draw_score(rng);
    const bool unmatched = uniform01(rng) < opts.unmatched_title_fraction;
    const bool no_price = uniform01(rng) < opts.missing_price_fraction;
    const bool malformed = malformed_stride > 0 && r % malformed_stride == malformed_stride / 2 &&
                           stats.malformed_records < malformed_target;

    line.clear();
    put_field(line, std::to_string(1000000000ULL + book), true);
    put_field(line, unmatched ? "Missing Book " + std::to_string(r) : book_title(book, neutral));
    if (no_price) {
      put_empty(line);
    } else {
      std::snprintf(buf, sizeof buf, "%.2f", 5.0 + double(book % 400) * 0.13 + double(score) * 0.01);
      put_field(line, buf);
    }
    std::snprintf(buf, sizeof buf, "A%011llX", static_cast<unsigned long long>(user) * 2654435761ULL % 0xFFFFFFFFFFFULL);
    put_field(line, buf);
    put_field(line, "Reader " + std::to_string(user));
    put_field(line, std::to_string(r % 7) + "/" + std::to_string(r % 7 + r % 3));
    put_field(line, std::to_string(score) + ".0");
    put_field(line, std::to_string(900000000 + uniform_index(rng, 400000000)));
    put_field(line, writer.text(score, 3 + uniform_index(rng, 4), false));
    if (!malformed) put_field(line, writer.text(score, opts.review_words, true));
    line += '\n';
    ratings << line;

    ++stats.rating_records;
    stats.malformed_records += malformed ? 1 : 0;
    stats.unmatched_title += unmatched ? 1 : 0;
    stats.missing_price += no_price ? 1 : 0;
  }
  if (!ratings || !books) throw_data("synth: write failed");
  return stats;
}

SynthStats write_synthetic_files(const SynthOptions& opts, const std::filesystem::path& ratings,
                                 const std::filesystem::path& books) {
  for (const auto& p : {ratings, books}) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  }
  std::ofstream r(ratings, std::ios::binary);
  std::ofstream b(books, std::ios::binary);
  if (!r || !b) throw_data("synth: cannot open output files");
  return write_synthetic(opts, r, b);
}

}  // namespace bookml::app
