#pragma once

// Synthetic C-subset program generators for property and acceptance tests:
// structure-stable random programs for renaming invariance, the two worked
// snippets from the motivating comparison, and labeled corpora with
// controllable global-variable naming behaviour.

#include <cctype>
#include <map>
#include <string>
#include <vector>

#include "cassim/cst.hpp"
#include "cassim/evalkit.hpp"
#include "cassim/rng.hpp"

namespace synth {

using cassim::Rng;

// --- random programs with pluggable identifier names -----------------------

struct NameSet {
  std::vector<std::string> locals;
  std::vector<std::string> globals;
  std::vector<std::string> funcs;
};

inline NameSet default_names() {
  return NameSet{{"a", "b", "c", "acc"}, {"g_total", "g_mode"}, {"step", "emit", "probe"}};
}

// All structural choices draw from rng in a fixed order, so two calls with
// the same seed and different name sets yield token-identical programs
// except at identifier positions.
class ProgramGen {
 public:
  ProgramGen(uint64_t structure_seed, NameSet names)
      : rng_(structure_seed), names_(std::move(names)) {}

  std::string generate() {
    std::string out;
    for (const std::string& g : names_.globals) out += "int " + g + ";\n";
    out += "int main() {\n";
    for (const std::string& l : names_.locals) out += "  int " + l + ";\n";
    int n = 4 + static_cast<int>(rng_.bounded(4));
    for (int i = 0; i < n; ++i) out += stmt(1);
    out += "  return 0;\n}\n";
    return out;
  }

 private:
  std::string local() { return names_.locals[rng_.bounded(names_.locals.size())]; }
  std::string global() { return names_.globals[rng_.bounded(names_.globals.size())]; }
  std::string func() { return names_.funcs[rng_.bounded(names_.funcs.size())]; }

  std::string expr(int depth) {
    switch (rng_.bounded(depth >= 2 ? 4 : 6)) {
      case 0: return local();
      case 1: return global();
      case 2: return std::to_string(rng_.bounded(100));
      case 3: return local();
      case 4: {
        static const char* ops[] = {"+", "-", "*", "<", "==", "&&"};
        std::string op = ops[rng_.bounded(6)];
        return "(" + expr(depth + 1) + " " + op + " " + expr(depth + 1) + ")";
      }
      default: return func() + "(" + expr(depth + 1) + ")";
    }
  }

  std::string stmt(int depth) {
    std::string pad(static_cast<size_t>(depth) * 2, ' ');
    switch (rng_.bounded(depth >= 3 ? 4 : 7)) {
      case 0: return pad + local() + " = " + expr(0) + ";\n";
      case 1: return pad + global() + " = " + expr(0) + ";\n";
      case 2: return pad + func() + "(" + expr(0) + ");\n";
      case 3: return pad + local() + " = " + local() + " + 1;\n";
      case 4:
        return pad + "if (" + expr(0) + ") {\n" + stmt(depth + 1) + pad + "}\n";
      case 5:
        return pad + "while (" + expr(0) + ") {\n" + stmt(depth + 1) + pad + "}\n";
      default:
        return pad + "for (" + local() + " = 0; " + local() + " < 10; " + local() + " = " +
               local() + " + 1) {\n" + stmt(depth + 1) + pad + "}\n";
    }
  }

  Rng rng_;
  NameSet names_;
};

inline std::string random_program(uint64_t structure_seed, const NameSet& names) {
  return ProgramGen(structure_seed, names).generate();
}

// --- the two digit-extraction snippets and an unrelated sorter -------------

inline std::string program_a() {
  return R"(int main() {
  int a;
  while (!cin_eof()) {
    while (!cin_eof() && !isdigit(cin_peek()))
      cin_get();
    if (cin_read(a))
      cout_print(a);
  }
  return 0;
}
)";
}

inline std::string program_b() {
  return R"(int main() {
  char buf[30];
  char *p;
  char *head;
  p = buf;
  head = p;
  scan_string(p);
  while (*p != '\n') { p = p + 1; *p = getchar(); }
  *p = '\0';
  p = head;
  for (; *p != '\0'; p = p + 1) {
    if (*p <= '9' && *p >= '0') { print_char(*p); }
    else if (*(p + 1) < 58 && *(p + 1) > 47) { put_newline(); }
  }
  return 0;
}
)";
}

inline std::string program_sort() {
  return R"(int main() {
  int arr[100];
  int n;
  int i;
  int j;
  int tmp;
  n = read_count();
  for (i = 0; i < n; i = i + 1) { arr[i] = read_int(); }
  for (i = 0; i < n - 1; i = i + 1) {
    for (j = 0; j < n - 1 - i; j = j + 1) {
      if (arr[j] > arr[j + 1]) {
        tmp = arr[j];
        arr[j] = arr[j + 1];
        arr[j + 1] = tmp;
      }
    }
  }
  for (i = 0; i < n; i = i + 1) { print_int(arr[i]); }
  return 0;
}
)";
}

// --- labeled corpora ---------------------------------------------------------

// class label -> program sources
using CorpusSources = std::map<std::string, std::vector<std::string>>;

inline cassim::evalkit::SourceCorpus parse_corpus(const CorpusSources& sources) {
  std::vector<cassim::evalkit::SourceProgram> programs;
  for (const auto& [label, bodies] : sources) {
    int n = 0;
    for (const std::string& body : bodies) {
      std::string id = label + "/p" + std::to_string(n++) + ".c";
      cassim::cst::SourceFile file{id, body, cassim::cst::Dialect::c_subset};
      programs.push_back(
          cassim::evalkit::SourceProgram{id, label, cassim::cst::parse_or_throw(file)});
    }
  }
  return cassim::evalkit::SourceCorpus::from_programs(std::move(programs));
}

// Operation statements: 12 "concept" operations (six concepts of two
// operations each) plus 8 pure-noise operations. Everything occurs across
// the corpus, so all features stay in-vocabulary for any class split.
inline std::vector<std::string> op_alphabet() {
  std::vector<std::string> ops;
  for (int j = 0; j < 20; ++j) {
    std::string id = std::to_string(j);
    switch (j % 4) {
      case 0: ops.push_back("acc = op" + id + "_apply(acc);"); break;
      case 1: ops.push_back("if (op" + id + "_gate(acc)) { acc = op" + id + "_fix(acc); }"); break;
      case 2: ops.push_back("t = t + op" + id + "_cost(t);"); break;
      default: ops.push_back("while (op" + id + "_more(t)) { t = op" + id + "_next(t); }"); break;
    }
  }
  return ops;
}

inline constexpr int kConceptOps = 12;  // ops 12..19 are noise-only

// Boilerplate present in every program regardless of class; this is what an
// untrained mean-pooled embedding mostly sees.
inline std::vector<std::string> boilerplate_lines() {
  return {
      "init_runtime();",
      "acc = read_input();",
      "t = configure(acc);",
      "log_begin(acc, t);",
      "log_end(acc);",
      "flush_output(acc);",
      "audit(acc, t);",
      "t = budget_left();",
      "heartbeat(t);",
      "release_runtime();",
  };
}

// Each class is a pair of concepts; a concept is two operations. Distinct
// classes share at most one concept, and held-out classes are new blends of
// concepts the training classes already separate.
inline std::vector<int> class_ops(int cls) {
  static const int pairs[8][2] = {{0, 1}, {2, 3}, {4, 5}, {0, 2},
                                  {1, 4}, {3, 5}, {0, 3}, {2, 4}};
  int a = pairs[cls % 8][0];
  int b = pairs[cls % 8][1];
  return {2 * a, 2 * a + 1, 2 * b, 2 * b + 1};
}

// Corpus for the desk-scale learning experiment: every program carries its
// class's four signature operations, a majority of random operations and
// fixed boilerplate, with per-program local names and statement order.
inline CorpusSources learnable_corpus(int n_classes, int per_class, uint64_t seed) {
  Rng rng(seed);
  CorpusSources sources;
  std::vector<std::string> ops = op_alphabet();
  for (int cls = 0; cls < n_classes; ++cls) {
    std::string label = "cls" + std::to_string(cls);
    std::vector<int> core = class_ops(cls);
    for (int p = 0; p < per_class; ++p) {
      std::string l0 = "v" + std::to_string(rng.bounded(1000));
      std::string l1 = "w" + std::to_string(rng.bounded(1000));
      std::vector<std::string> lines = boilerplate_lines();
      for (int op : core) lines.push_back(ops[static_cast<size_t>(op)]);
      int n_distract = 4 + static_cast<int>(rng.bounded(4));
      for (int d = 0; d < n_distract; ++d) {
        lines.push_back(ops[kConceptOps + rng.bounded(ops.size() - kConceptOps)]);
      }
      rng.shuffle(lines);

      std::string body = "int main() {\n  int acc;\n  int " + l0 + ";\n  int " + l1 + ";\n";
      for (const std::string& line : lines) body += "  " + line + "\n";
      body += "  return 0;\n}\n";
      // rewrite the pool's locals t/u into the per-program names
      std::string rewritten;
      for (size_t i = 0; i < body.size(); ++i) {
        char prev = i == 0 ? ' ' : body[i - 1];
        char next = i + 1 < body.size() ? body[i + 1] : ' ';
        auto is_word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
        if (body[i] == 't' && !is_word(prev) && !is_word(next)) {
          rewritten += l0;
        } else if (body[i] == 'u' && !is_word(prev) && !is_word(next)) {
          rewritten += l1;
        } else {
          rewritten += body[i];
        }
      }
      sources[label].push_back(rewritten);
    }
  }
  return sources;
}

// Shared skeleton used by the two global-variable corpora. The gXX markers
// are substituted with either per-program or per-class global names.
inline std::string global_template(const std::string& ga, const std::string& gb, int variant) {
  std::string body;
  body += "int " + ga + ";\n";
  body += "int " + gb + ";\n";
  body += "int main() {\n";
  body += "  int i;\n";
  body += "  " + ga + " = read_int();\n";
  body += "  " + gb + " = 0;\n";
  body += "  for (i = 0; i < " + ga + "; i = i + 1) {\n";
  body += "    " + gb + " = " + gb + " + step(i);\n";
  body += "  }\n";
  body += "  if (" + gb + " < 0) { " + gb + " = 0 - " + gb + "; }\n";
  body += "  " + ga + " = " + ga + " + " + gb + ";\n";
  switch (variant % 3) {
    case 0: body += "  if (" + gb + " > 10) { emit(" + gb + "); }\n"; break;
    case 1: body += "  while (" + gb + " > 10) { " + gb + " = " + gb + " - 10; }\n"; break;
    default: body += "  emit(" + gb + " + " + ga + ");\n"; break;
  }
  body += "  print_int(" + gb + ");\n";
  body += "  print_int(" + ga + " * " + gb + ");\n";
  body += "  return 0;\n}\n";
  return body;
}

// Some class-to-class structural difference on top of the shared skeleton.
inline std::string class_tail(int cls, const std::string& ga, const std::string& gb) {
  switch (cls % 4) {
    case 0: return "  " + gb + " = scale_c" + std::to_string(cls) + "(" + ga + ");\n";
    case 1: return "  if (" + ga + " < 0) { " + gb + " = fix_c" + std::to_string(cls) + "(); }\n";
    case 2: return "  " + ga + " = " + ga + " * mass_c" + std::to_string(cls) + "();\n";
    default: return "  emit_c" + std::to_string(cls) + "(" + gb + ");\n";
  }
}

inline std::string with_tail(std::string body, const std::string& tail) {
  size_t pos = body.rfind("  return 0;");
  body.insert(pos, tail);
  return body;
}

// Global names random per program: verbatim names are cross-program noise,
// abstracting them should help.
inline CorpusSources randomized_global_corpus(int n_classes, int per_class, uint64_t seed) {
  Rng rng(seed);
  CorpusSources sources;
  for (int cls = 0; cls < n_classes; ++cls) {
    std::string label = "cls" + std::to_string(cls);
    for (int p = 0; p < per_class; ++p) {
      std::string ga = "g" + std::to_string(rng.bounded(1000000)) + "a";
      std::string gb = "g" + std::to_string(rng.bounded(1000000)) + "b";
      std::string body = global_template(ga, gb, cls);
      body = with_tail(std::move(body), class_tail(cls, ga, gb));
      sources[label].push_back(std::move(body));
    }
  }
  return sources;
}

// Global names consistent within a class and distinct across classes: the
// names *are* the class signal, abstracting them should hurt.
inline CorpusSources consistent_global_corpus(int n_classes, int per_class, uint64_t seed) {
  Rng rng(seed);
  CorpusSources sources;
  for (int cls = 0; cls < n_classes; ++cls) {
    std::string label = "cls" + std::to_string(cls);
    std::string ga = "cfg_c" + std::to_string(cls);
    std::string gb = "sum_c" + std::to_string(cls);
    for (int p = 0; p < per_class; ++p) {
      // all classes share the same skeleton; only names and the variant
      // statement (chosen per program, not per class) differ
      std::string body = global_template(ga, gb, static_cast<int>(rng.bounded(3)));
      sources[label].push_back(std::move(body));
    }
  }
  return sources;
}

}  // namespace synth
