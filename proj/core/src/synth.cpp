#include "fixgraph/synth.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <regex>

#include "fixgraph/errors.hpp"
#include "fixgraph/random.hpp"

namespace fixgraph {

FixSignal fix_signal_from_string(const std::string& name) {
  if (name == "bounds-check") return FixSignal::BoundsCheck;
  if (name == "off-by-one") return FixSignal::OffByOne;
  if (name == "mixed") return FixSignal::Mixed;
  throw BadConfig("unknown signal '" + name + "' (expected bounds-check, off-by-one or mixed)");
}

std::string to_string(FixSignal signal) {
  switch (signal) {
    case FixSignal::BoundsCheck:
      return "bounds-check";
    case FixSignal::OffByOne:
      return "off-by-one";
    case FixSignal::Mixed:
      break;
  }
  return "mixed";
}

namespace {

constexpr std::array kNouns{"buf",   "count", "index", "offset", "length", "size",  "value",
                            "item",  "node",  "entry", "total",  "result", "data",  "key",
                            "slot",  "pos",   "limit", "step",   "temp",   "flag",  "acc",
                            "width", "depth", "score", "level",  "chunk",  "frame", "block"};
constexpr std::array kVerbs{"copy", "fill", "sum",   "scan",  "load", "store", "update",
                            "read", "emit", "merge", "check", "pack", "parse", "apply"};
constexpr std::array kRenameSuffix{"2", "New", "Tmp", "Val", "Cur"};

enum class Template { Store, Loop, Calc, While };

struct Function {
  Template kind = Template::Calc;
  std::vector<std::string> lines;
  std::vector<std::string> locals;  // renameable names
  int store_line = -1;              // Store: the indexed assignment
  std::string index, bound;         // Store: guard operands
  int loop_line = -1;               // Loop: the for header
  bool inclusive = false;           // Loop: header uses <=
};

struct Names {
  Rng* rng;
  std::vector<std::string> used;

  std::string pick(const std::vector<std::string>& pool) {
    for (int attempt = 0; attempt < 64; ++attempt) {
      const std::string& w = pool[uniform_index(*rng, pool.size())];
      if (std::find(used.begin(), used.end(), w) == used.end()) {
        used.push_back(w);
        return w;
      }
    }
    std::string w = pool[uniform_index(*rng, pool.size())] + std::to_string(used.size());
    used.push_back(w);
    return w;
  }
};

std::vector<std::string> Pool(const auto& words) { return {words.begin(), words.end()}; }

int Constant(Rng& rng) { return 2 + static_cast<int>(uniform_index(rng, 30)); }

std::string FunctionName(Rng& rng, const std::string& prefix) {
  return prefix + kVerbs[uniform_index(rng, kVerbs.size())] + "_" +
         kNouns[uniform_index(rng, kNouns.size())];
}

Function MakeStore(Rng& rng, const std::string& name) {
  Names names{&rng, {}};
  const auto pool = Pool(kNouns);
  const std::string arr = names.pick(pool), len = names.pick(pool), idx = names.pick(pool),
                    val = names.pick(pool), tmp = names.pick(pool);
  Function f;
  f.kind = Template::Store;
  f.lines = {
      "void " + name + "(int *" + arr + ", int " + len + ", int " + idx + ", int " + val + ") {",
      "  int " + tmp + " = " + val + " * " + std::to_string(Constant(rng)) + ";",
      "  " + arr + "[" + idx + "] = " + tmp + ";",
      "}",
  };
  f.store_line = 2;
  f.index = idx;
  f.bound = len;
  f.locals = {tmp, val};
  return f;
}

Function MakeLoop(Rng& rng, const std::string& name, bool inclusive) {
  Names names{&rng, {}};
  const auto pool = Pool(kNouns);
  const std::string arr = names.pick(pool), len = names.pick(pool), i = names.pick(pool),
                    acc = names.pick(pool);
  Function f;
  f.kind = Template::Loop;
  f.lines = {
      "int " + name + "(int *" + arr + ", int " + len + ") {",
      "  int " + i + ";",
      "  int " + acc + " = " + std::to_string(Constant(rng)) + ";",
      "  for (" + i + " = 0; " + i + (inclusive ? " <= " : " < ") + len + "; " + i + "++) {",
      "    " + acc + " = " + acc + " + " + arr + "[" + i + "];",
      "  }",
      "  return " + acc + ";",
      "}",
  };
  f.loop_line = 3;
  f.inclusive = inclusive;
  f.locals = {acc, i};
  return f;
}

Function MakeCalc(Rng& rng, const std::string& name) {
  Names names{&rng, {}};
  const auto pool = Pool(kNouns);
  const std::string a = names.pick(pool), b = names.pick(pool), r = names.pick(pool);
  const std::string k2 = std::to_string(Constant(rng) * 10);
  Function f;
  f.kind = Template::Calc;
  f.lines = {
      "int " + name + "(int " + a + ", int " + b + ") {",
      "  int " + r + " = " + a + " * " + std::to_string(Constant(rng)) + " + " + b + ";",
      "  if (" + r + " > " + k2 + ") {",
      "    " + r + " = " + r + " - " + k2 + ";",
      "  }",
      "  return " + r + ";",
      "}",
  };
  f.locals = {r, a};
  return f;
}

Function MakeWhile(Rng& rng, const std::string& name) {
  Names names{&rng, {}};
  const auto pool = Pool(kNouns);
  const std::string n = names.pick(pool), c = names.pick(pool);
  Function f;
  f.kind = Template::While;
  f.lines = {
      "int " + name + "(int " + n + ") {",
      "  int " + c + " = 0;",
      "  while (" + n + " > 0) {",
      "    " + n + " = " + n + " / " + std::to_string(Constant(rng)) + ";",
      "    " + c + "++;",
      "  }",
      "  return " + c + ";",
      "}",
  };
  f.locals = {c, n};
  return f;
}

std::string Render(const std::vector<Function>& fns) {
  std::string out;
  for (std::size_t i = 0; i < fns.size(); ++i) {
    if (i > 0) out += "\n";
    for (const auto& line : fns[i].lines) out += line + "\n";
  }
  return out;
}

void RenameIn(Function& f, const std::string& from, const std::string& to) {
  const std::regex word("\\b" + from + "\\b");
  for (std::size_t i = 1; i < f.lines.size(); ++i) {
    f.lines[i] = std::regex_replace(f.lines[i], word, to);
  }
  // The signature line is left alone unless the name is a parameter.
  const std::string& sig = f.lines[0];
  if (std::regex_search(sig, word)) f.lines[0] = std::regex_replace(sig, word, to);
}

// Label-neutral refactoring edits.
void NeutralEdit(std::vector<Function>& fns, Rng& rng, const std::string& prefix) {
  // Rename one local in every function.
  for (Function& f : fns) {
    {
      const std::string& from = f.locals[uniform_index(rng, f.locals.size())];
      const std::string to = from + kRenameSuffix[uniform_index(rng, kRenameSuffix.size())];
      RenameIn(f, from, to);
      for (auto& l : f.locals) {
        if (l == from) l = to;
      }
    }
  }
  // Constant tweak.
  if (uniform01(rng) < 0.5) {
    Function& f = fns[uniform_index(rng, fns.size())];
    const std::regex number("\\b([0-9]+)\\b");
    for (std::size_t i = 1; i < f.lines.size(); ++i) {
      std::smatch m;
      if (std::regex_search(f.lines[i], m, number) && m.str(1) != "0") {
        const int v = std::stoi(m.str(1)) + 1 + static_cast<int>(uniform_index(rng, 5));
        f.lines[i] = m.prefix().str() + std::to_string(v) + m.suffix().str();
        break;
      }
    }
  }
  // Logging calls.
  const std::size_t logs = 2 + uniform_index(rng, 3);
  for (std::size_t k = 0; k < logs; ++k) {
    Function& f = fns[uniform_index(rng, fns.size())];
    const std::string& var = f.locals[uniform_index(rng, f.locals.size())];
    const std::size_t at = 2 + uniform_index(rng, f.lines.size() - 2);
    if (f.lines[at - 1].find("for (") != std::string::npos ||
        f.lines[at - 1].find("while (") != std::string::npos ||
        f.lines[at - 1].find("if (") != std::string::npos) {
      continue;
    }
    f.lines.insert(f.lines.begin() + static_cast<long>(at),
                   "  log_debug(\"" + f.lines[0].substr(0, f.lines[0].find('(')) + "\", " + var + ");");
  }
  // New helper functions.
  const std::size_t helpers = 1 + uniform_index(rng, 2);
  for (std::size_t k = 0; k < helpers; ++k) {
    const std::string name = FunctionName(rng, prefix);
    fns.push_back(uniform01(rng) < 0.5 ? MakeWhile(rng, name) : MakeLoop(rng, name, false));
  }
}

void BoundsCheckFix(Function& f, Rng& rng) {
  std::string& line = f.lines[static_cast<std::size_t>(f.store_line)];
  const std::string stmt = line.substr(2);
  const bool both_sides = uniform01(rng) < 0.3;
  const std::string cond = both_sides ? f.index + " >= 0 && " + f.index + " < " + f.bound
                                      : f.index + " < " + f.bound;
  if (uniform01(rng) < 0.5) {
    line = "  if (" + cond + ") " + stmt;
  } else {
    line = "  if (" + cond + ") {";
    f.lines.insert(f.lines.begin() + f.store_line + 1, {"    " + stmt, "  }"});
  }
}

void OffByOneFix(Function& f) {
  std::string& line = f.lines[static_cast<std::size_t>(f.loop_line)];
  line.replace(line.find(" <= "), 4, " < ");
  f.inclusive = false;
}

}  // namespace

Dataset synthesize(std::size_t n, FixSignal signal, std::uint64_t seed) {
  if (n < 2) throw BadConfig("synthesize needs n >= 2");
  Rng rng(seed);
  const std::size_t project_count = std::max<std::size_t>(2, (n + 5) / 10);
  std::vector<std::string> projects;
  std::vector<std::string> prefixes;
  for (std::size_t p = 0; p < project_count; ++p) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "proj-%03zu", p);
    projects.emplace_back(buf);
    prefixes.push_back(std::string(kNouns[p % kNouns.size()]) + "_");
  }

  std::vector<int> labels(n, 0);
  for (std::size_t i = 0; i < n / 2; ++i) labels[i] = 1;
  shuffle(labels, rng);

  Dataset ds;
  for (std::size_t s = 0; s < n; ++s) {
    CommitSample sample;
    char id[32];
    std::snprintf(id, sizeof(id), "synth-%05zu", s);
    sample.id = id;
    const std::size_t p = s % project_count;
    sample.project = projects[p];
    sample.label = labels[s];
    const std::string& prefix = prefixes[p];

    FixSignal kind = signal;
    if (kind == FixSignal::Mixed) {
      kind = uniform01(rng) < 0.5 ? FixSignal::BoundsCheck : FixSignal::OffByOne;
    }

    std::vector<Function> fns;
    const std::size_t count = 2 + uniform_index(rng, 3);
    for (std::size_t k = 0; k < count; ++k) {
      const std::string name = FunctionName(rng, prefix);
      switch (uniform_index(rng, 4)) {
        case 0:
          fns.push_back(MakeStore(rng, name));
          break;
        case 1:
          fns.push_back(MakeLoop(rng, name, uniform01(rng) < 0.5));
          break;
        case 2:
          fns.push_back(MakeCalc(rng, name));
          break;
        default:
          fns.push_back(MakeWhile(rng, name));
          break;
      }
    }
    // Every sample holds a fix site so presence alone says nothing.
    const std::size_t site = uniform_index(rng, fns.size() + 1);
    Function target = kind == FixSignal::BoundsCheck ? MakeStore(rng, FunctionName(rng, prefix))
                                                     : MakeLoop(rng, FunctionName(rng, prefix), true);
    fns.insert(fns.begin() + static_cast<long>(site), target);

    const std::string path = "src/" + prefix + "module.c";
    const std::string old_text = Render(fns);
    if (sample.label == 1) {
      if (kind == FixSignal::BoundsCheck) {
        BoundsCheckFix(fns[site], rng);
      } else {
        OffByOneFix(fns[site]);
      }
    } else {
      NeutralEdit(fns, rng, prefix);
    }
    sample.files.push_back(ChangedFile{path, old_text, Render(fns)});
    ds.samples.push_back(std::move(sample));
  }
  return ds;
}

}  // namespace fixgraph
