#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "dld/dataset.hpp"
#include "dld/synth.hpp"

namespace testutil {

inline dld::Sample make_sample(std::string id, std::optional<dld::Group> g,
                               double perception, double rt, double vocabulary,
                               double morphosyntax, double repetition) {
  dld::Sample s;
  s.id = std::move(id);
  s.group = g;
  s.perception = perception;
  s.rt_perception = rt;
  s.vocabulary = vocabulary;
  s.morphosyntax = morphosyntax;
  s.repetition = repetition;
  return s;
}

/// Linearly separable toy cohort: perception and vocabulary carry a huge
/// class separation (60 within-class sds), the other features are identical
/// noise in both classes.
inline dld::Dataset separable_toy(int n_per_class = 10,
                                  std::uint64_t seed = 42) {
  dld::SynthSpec spec;
  spec.n_per_class = n_per_class;
  spec.seed = seed;
  spec.dld = {{{4.0, 0.1}, {2.5, 0.1}, {10.0, 0.1}, {20.0, 0.1}, {20.0, 0.1}}};
  spec.td = {{{10.0, 0.1}, {2.5, 0.1}, {4.0, 0.1}, {20.0, 0.1}, {20.0, 0.1}}};
  return dld::generate(spec);
}

inline dld::Dataset paper_like_cohort(std::uint64_t seed,
                                      int n_per_class = 15) {
  dld::SynthSpec spec = dld::default_paper_like_spec();
  spec.seed = seed;
  spec.n_per_class = n_per_class;
  return dld::generate(spec);
}

inline std::string cohort_csv_text(const dld::Dataset& ds) {
  std::ostringstream os;
  dld::write_cohort_csv(ds, os);
  return os.str();
}

/// Per-test scratch directory under the current working directory; wiped on
/// construction so reruns start clean.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& name)
      : path_(std::filesystem::current_path() / ("scratch_" + name)) {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }

  const std::filesystem::path& path() const { return path_; }

  std::filesystem::path file(const std::string& name) const {
    return path_ / name;
  }

  std::filesystem::path write(const std::string& name,
                              const std::string& content) const {
    const auto p = path_ / name;
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << content;
    return p;
  }

 private:
  std::filesystem::path path_;
};

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

}  // namespace testutil
