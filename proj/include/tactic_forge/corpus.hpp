#pragma once

#include <algorithm>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "tactic_forge/features.hpp"
#include "tactic_forge/script.hpp"
#include "tactic_forge/tactic_db.hpp"

namespace tactic_forge {

/// One recorded (state, tactic) pair. `children` holds the goals the tactic
/// produced when known; replay needs it, learning does not.
struct PairRecord {
  std::string file;
  std::string lemma;
  Seq seq = 0;
  ProofState state;
  std::string tactic;
  std::optional<std::vector<ProofState>> children;
};

struct Lemma {
  std::string name;
  std::vector<PairRecord> pairs;      // ascending seq
  std::optional<std::string> script;  // original script text, if known
  std::optional<ProofState> root;     // statement, if known

  /// Statement to prove: explicit root, else the first recorded state.
  std::optional<ProofState> statement() const {
    if (root) return root;
    if (!pairs.empty()) return pairs.front().state;
    return std::nullopt;
  }
};

struct CorpusFile {
  std::string name;
  std::vector<std::string> deps;
  std::vector<Lemma> lemmas;
};

struct CorpusIssue {
  std::string source;
  std::size_t line = 0;  // 1-based; 0 for whole-corpus problems
  std::string reason;
};

class CorpusError : public std::runtime_error {
 public:
  explicit CorpusError(std::vector<CorpusIssue> issues)
      : std::runtime_error(summarize(issues)), issues_(std::move(issues)) {}
  explicit CorpusError(const std::string& reason) : CorpusError(std::vector<CorpusIssue>{{"", 0, reason}}) {}

  const std::vector<CorpusIssue>& issues() const { return issues_; }

 private:
  static std::string summarize(const std::vector<CorpusIssue>& issues) {
    std::ostringstream out;
    for (std::size_t i = 0; i < issues.size(); ++i) {
      if (i) out << '\n';
      if (!issues[i].source.empty()) out << issues[i].source << ':';
      if (issues[i].line) out << issues[i].line << ": ";
      out << issues[i].reason;
    }
    return out.str();
  }

  std::vector<CorpusIssue> issues_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Corpus {
  std::vector<CorpusFile> files;

  const CorpusFile* find(std::string_view name) const {
    for (const auto& f : files)
      if (f.name == name) return &f;
    return nullptr;
  }

  std::size_t pair_count() const {
    std::size_t n = 0;
    for (const auto& f : files)
      for (const auto& l : f.lemmas) n += l.pairs.size();
    return n;
  }

  std::size_t lemma_count() const {
    std::size_t n = 0;
    for (const auto& f : files) n += f.lemmas.size();
    return n;
  }

  /// Transitive dependencies of `name`, listed in corpus file order.
  std::vector<const CorpusFile*> dependency_cone(std::string_view name) const {
    std::set<std::string, std::less<>> seen;
    std::vector<std::string_view> stack{name};
    while (!stack.empty()) {
      std::string_view cur = stack.back();
      stack.pop_back();
      const CorpusFile* f = find(cur);
      if (!f) throw CorpusError("unresolved dependency " + std::string(cur));
      for (const auto& d : f->deps)
        if (seen.insert(d).second) stack.push_back(d);
    }
    std::vector<const CorpusFile*> out;
    for (const auto& f : files)
      if (seen.count(f.name) && f.name != name) out.push_back(&f);
    return out;
  }

  /// Throws CorpusError on unresolved or cyclic dependencies.
  void validate_dependencies() const {
    std::vector<CorpusIssue> issues;
    for (const auto& f : files)
      for (const auto& d : f.deps)
        if (!find(d)) issues.push_back({f.name, 0, "unresolved dependency " + d});
    if (!issues.empty()) throw CorpusError(std::move(issues));

    enum class Mark { None, Active, Done };
    std::unordered_map<std::string, Mark> mark;
    std::function<void(const CorpusFile&)> visit = [&](const CorpusFile& f) {
      Mark& m = mark[f.name];
      if (m == Mark::Done) return;
      if (m == Mark::Active) throw CorpusError("dependency cycle through " + f.name);
      m = Mark::Active;
      for (const auto& d : f.deps) visit(*find(d));
      mark[f.name] = Mark::Done;
    };
    for (const auto& f : files) visit(f);
  }
};

namespace detail {

inline ProofState state_from_json(const nlohmann::json& j) {
  ProofState s;
  for (const auto& h : j.value("hyps", nlohmann::json::array())) s.hypotheses.push_back(parse_term(h.get<std::string>()));
  s.goal = parse_term(j.at("goal").get<std::string>());
  return s;
}

inline nlohmann::ordered_json state_to_json(const ProofState& s) {
  nlohmann::ordered_json j;
  j["hyps"] = nlohmann::ordered_json::array();
  for (const Term& h : s.hypotheses) j["hyps"].push_back(print_term(h));
  j["goal"] = print_term(s.goal);
  return j;
}

class CorpusBuilder {
 public:
  void add_line(const std::string& source, std::size_t line_no, const std::string& line) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) return;
    try {
      nlohmann::json j = nlohmann::json::parse(line);
      if (!j.is_object()) throw std::invalid_argument("record must be a JSON object");
      std::string file = j.at("file").get<std::string>();
      if (j.contains("script")) {
        add_script(j, file);
      } else if (j.contains("tactic")) {
        add_pair(j, file);
      } else if (j.contains("deps")) {
        add_header(j, file);
      } else {
        throw std::invalid_argument("unrecognised record");
      }
    } catch (const std::exception& e) {
      issues_.push_back({source, line_no, e.what()});
    }
  }

  Corpus finish() {
    if (!issues_.empty()) throw CorpusError(std::move(issues_));
    for (auto& f : corpus_.files)
      for (auto& l : f.lemmas)
        std::sort(l.pairs.begin(), l.pairs.end(), [](const PairRecord& a, const PairRecord& b) { return a.seq < b.seq; });
    corpus_.validate_dependencies();
    return std::move(corpus_);
  }

 private:
  CorpusFile& file_for(const std::string& file) {
    auto it = file_index_.find(file);
    if (it == file_index_.end()) throw std::invalid_argument("record for file '" + file + "' before its header");
    return corpus_.files[it->second];
  }

  Lemma& lemma_for(CorpusFile& f, const std::string& lemma) {
    auto& index = lemma_index_[f.name];
    auto [it, inserted] = index.try_emplace(lemma, f.lemmas.size());
    if (inserted) f.lemmas.push_back(Lemma{lemma, {}, std::nullopt, std::nullopt});
    return f.lemmas[it->second];
  }

  void add_header(const nlohmann::json& j, const std::string& file) {
    if (file_index_.count(file)) throw std::invalid_argument("duplicate header for file '" + file + "'");
    CorpusFile f{file, j.at("deps").get<std::vector<std::string>>(), {}};
    file_index_[file] = corpus_.files.size();
    corpus_.files.push_back(std::move(f));
  }

  void add_pair(const nlohmann::json& j, const std::string& file) {
    CorpusFile& f = file_for(file);
    PairRecord p;
    p.file = file;
    p.lemma = j.at("lemma").get<std::string>();
    p.seq = j.at("seq").get<Seq>();
    p.state = state_from_json(j.at("state"));
    p.tactic = normalize_tactic(j.at("tactic").get<std::string>());
    if (p.tactic.empty()) throw std::invalid_argument("empty tactic");
    if (j.contains("children")) {
      std::vector<ProofState> children;
      for (const auto& c : j["children"]) children.push_back(state_from_json(c));
      p.children = std::move(children);
    }
    if (!seqs_[file].insert(p.seq).second) throw std::invalid_argument("duplicate seq " + std::to_string(p.seq));
    lemma_for(f, p.lemma).pairs.push_back(std::move(p));
  }

  void add_script(const nlohmann::json& j, const std::string& file) {
    CorpusFile& f = file_for(file);
    std::string text = j.at("script").get<std::string>();
    parse_script(text);
    Lemma& l = lemma_for(f, j.at("lemma").get<std::string>());
    if (l.script) throw std::invalid_argument("duplicate script for lemma '" + l.name + "'");
    l.script = text;
    if (j.contains("goal")) l.root = state_from_json(j);
  }

  Corpus corpus_;
  std::unordered_map<std::string, std::size_t> file_index_;
  std::unordered_map<std::string, std::unordered_map<std::string, std::size_t>> lemma_index_;
  std::unordered_map<std::string, std::set<Seq>> seqs_;
  std::vector<CorpusIssue> issues_;
};

}  // namespace detail

/// Reads JSONL corpus records from several streams (treated as one corpus).
inline Corpus ingest_streams(const std::vector<std::pair<std::string, std::istream*>>& sources) {
  detail::CorpusBuilder builder;
  for (const auto& [name, in] : sources) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(*in, line)) builder.add_line(name, ++line_no, line);
  }
  return builder.finish();
}

inline Corpus ingest_text(const std::string& text, const std::string& name = "<memory>") {
  std::istringstream in(text);
  return ingest_streams({{name, &in}});
}

inline Corpus ingest(const std::vector<std::string>& paths) {
  std::vector<std::ifstream> streams;
  std::vector<std::pair<std::string, std::istream*>> sources;
  streams.reserve(paths.size());
  for (const auto& p : paths) {
    streams.emplace_back(p);
    if (!streams.back()) throw IoError("cannot open " + p);
  }
  for (std::size_t i = 0; i < paths.size(); ++i) sources.emplace_back(paths[i], &streams[i]);
  return ingest_streams(sources);
}

inline nlohmann::ordered_json header_json(const CorpusFile& f) {
  nlohmann::ordered_json j;
  j["file"] = f.name;
  j["deps"] = f.deps;
  return j;
}

inline nlohmann::ordered_json pair_json(const PairRecord& p) {
  nlohmann::ordered_json j;
  j["file"] = p.file;
  j["lemma"] = p.lemma;
  j["seq"] = p.seq;
  j["state"] = detail::state_to_json(p.state);
  j["tactic"] = p.tactic;
  if (p.children) {
    j["children"] = nlohmann::ordered_json::array();
    for (const auto& c : *p.children) j["children"].push_back(detail::state_to_json(c));
  }
  return j;
}

inline nlohmann::ordered_json script_json(const std::string& file, const Lemma& l) {
  nlohmann::ordered_json j;
  j["file"] = file;
  j["lemma"] = l.name;
  j["script"] = *l.script;
  if (l.root) {
    auto s = detail::state_to_json(*l.root);
    j["hyps"] = s["hyps"];
    j["goal"] = s["goal"];
  }
  return j;
}

/// Canonical JSONL: header, then per lemma its script record and its pairs.
inline void export_corpus(const Corpus& c, std::ostream& out) {
  for (const auto& f : c.files) {
    out << header_json(f).dump() << '\n';
    for (const auto& l : f.lemmas) {
      if (l.script) out << script_json(f.name, l).dump() << '\n';
      for (const auto& p : l.pairs) out << pair_json(p).dump() << '\n';
    }
  }
}

/// Directory part used to group files into developments: "Arith/Plus" -> "Arith".
inline std::string development_of(std::string_view file) {
  auto slash = file.find('/');
  return std::string(slash == std::string_view::npos ? file : file.substr(0, slash));
}

}  // namespace tactic_forge
