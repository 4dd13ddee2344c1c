// Acceptance run: one PASS/FAIL line per criterion; exit status 1 if any fail.

#include <chrono>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "memrec/compiler.hpp"
#include "memrec/engine.hpp"
#include "memrec/recfun.hpp"
#include "memrec/trace_json.hpp"
#include "support.hpp"

using namespace memrec;

namespace {

const std::string kAdd = "P(U[1,1], C(S; U[3,3]))";
const std::string kMult = "P(Z[1], C(" + kAdd + "; U[3,1], U[3,3]))";
const std::string kMonus = "P(U[1,1], C(P(Z[0], U[2,1]); U[3,3]))";

struct Verdict {
  bool ok = true;
  std::string detail;
  std::vector<std::string> failures;

  void fail(const std::string& what) {
    ok = false;
    if (failures.size() < 5) failures.push_back(what);
  }
};

std::string show(const std::vector<Nat>& xs) {
  std::string s = "(";
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + std::to_string(xs[i]);
  return s + ")";
}

// Calls f on every tuple of length n with entries 0..hi.
void tuples(std::size_t n, Nat hi, const std::function<void(const std::vector<Nat>&)>& f) {
  std::vector<Nat> xs(n, 0);
  while (true) {
    f(xs);
    std::size_t i = 0;
    while (i < n && xs[i] == hi) xs[i++] = 0;
    if (i == n) return;
    ++xs[i];
  }
}

Outcome run_compiled(const RecExpr& e, const std::vector<Nat>& args, std::uint64_t seed,
                     std::uint64_t max_steps = kDefaultMaxSteps) {
  const CompiledUnit cu = compile(e, args);
  return Engine(cu.system).run_outcome(SeededRandom{seed}, max_steps);
}

// Runs e on args under seeds 0..seeds-1 and compares with want.
void expect_value(Verdict& v, std::size_t& runs, const RecExpr& e, const std::vector<Nat>& args, Nat want,
                  std::uint64_t seeds) {
  const CompiledUnit cu = compile(e, args);
  const Engine engine(cu.system);
  for (std::uint64_t s = 0; s < seeds; ++s) {
    const Outcome o = engine.run_outcome(SeededRandom{s});
    ++runs;
    if (!o.halted() || o.output != want)
      v.fail(e.to_string() + show(args) + " seed " + std::to_string(s) + ": got " +
             (o.halted() ? std::to_string(o.output) : "step_limit") + ", want " + std::to_string(want));
  }
}

Verdict basic_functions() {
  Verdict v;
  std::size_t runs = 0;
  for (std::size_t n = 0; n <= 3; ++n) {
    tuples(n, 10, [&](const auto& xs) { expect_value(v, runs, RecExpr::zero(n), xs, 0, 25); });
    for (std::size_t i = 1; i <= n; ++i)
      tuples(n, 10, [&](const auto& xs) { expect_value(v, runs, RecExpr::proj(n, i), xs, xs[i - 1], 25); });
  }
  for (Nat x = 0; x <= 10; ++x) expect_value(v, runs, RecExpr::succ(), {x}, x + 1, 25);
  v.detail = std::to_string(runs) + " runs";
  return v;
}

Verdict add_mult() {
  Verdict v;
  std::size_t runs = 0;
  const RecExpr add = parse(kAdd), mult = parse(kMult);
  for (Nat x = 0; x <= 8; ++x)
    for (Nat y = 0; y <= 8; ++y) {
      if (eval(add, {x, y}, 1'000'000).value != x + y) v.fail("oracle add" + show({x, y}));
      expect_value(v, runs, add, {x, y}, x + y, 5);
    }
  for (Nat x = 0; x <= 5; ++x)
    for (Nat y = 0; y <= 5; ++y) {
      if (eval(mult, {x, y}, 1'000'000).value != x * y) v.fail("oracle mult" + show({x, y}));
      expect_value(v, runs, mult, {x, y}, x * y, 5);
    }
  v.detail = std::to_string(runs) + " runs";
  return v;
}

Verdict minimalization() {
  Verdict v;
  std::size_t runs = 0;
  const RecExpr m = parse("M(" + kMonus + ")");
  for (Nat x = 0; x <= 6; ++x) expect_value(v, runs, m, {x}, x, 5);
  const RecExpr never = parse("M(C(S; U[2,2]))");
  for (Nat x = 0; x <= 2; ++x)
    for (std::uint64_t s = 0; s < 5; ++s) {
      ++runs;
      if (run_compiled(never, {x}, s, 2000).halted()) v.fail(never.to_string() + show({x}) + " halted");
    }
  v.detail = std::to_string(runs) + " runs";
  return v;
}

Verdict confluence() {
  Verdict v;
  struct Case {
    std::string expr;
    std::vector<Nat> args;
  };
  std::vector<Case> cases;
  for (Nat x = 0; x <= 3; ++x) cases.push_back({"S", {x}});
  tuples(2, 2, [&](const auto& xs) {
    cases.push_back({"Z[2]", xs});
    cases.push_back({"U[2,1]", xs});
    cases.push_back({"U[2,2]", xs});
  });
  for (Nat x = 0; x <= 2; ++x) cases.push_back({"C(S; U[1,1])", {x}});
  std::size_t total = 0, widest = 0;
  for (const auto& c : cases) {
    const RecExpr e = parse(c.expr);
    std::vector<Trace> branches;
    try {
      branches = Engine(compile(e, c.args).system).explore(1000, 10000);
    } catch (const BranchLimitExceeded&) {
      v.fail(c.expr + show(c.args) + " exceeded branch limit");
      continue;
    }
    total += branches.size();
    widest = std::max(widest, branches.size());
    for (const auto& b : branches)
      if (!b.outcome.halted() || b.outcome.output != branches.front().outcome.output)
        v.fail(c.expr + show(c.args) + " branches disagree");
  }
  v.detail = std::to_string(cases.size()) + " systems, " + std::to_string(total) +
             " branches total, at most " + std::to_string(widest) + " per system";
  return v;
}

Verdict engine_invariants() {
  Verdict v;
  test_support::InvariantReport rep;
  std::map<std::string, std::size_t> systems;
  std::uint64_t seed = 0;
  const std::vector<std::string> names{"maximality", "conservation", "one_shot", "priority", "promoter", "gate"};
  auto covered = [&] {
    for (const auto& n : names)
      if (systems[n] < 100) return false;
    return true;
  };
  for (; seed < 20000 && !covered(); ++seed) {
    const PSystem sys = test_support::random_system(seed, seed % 3 != 0);
    for (const auto& n : test_support::check_run(sys, seed, 15, rep)) ++systems[n];
  }
  for (const auto& n : names)
    if (systems[n] < 100) v.fail(n + " exercised by only " + std::to_string(systems[n]) + " systems");
  for (const auto& f : rep.failures) v.fail(f);
  std::ostringstream d;
  d << seed << " systems, " << rep.violations() << " violations;";
  for (const auto& n : names) d << ' ' << n << '=' << systems[n];
  v.detail = d.str();
  return v;
}

struct CorpusEntry {
  std::string expr;
  std::vector<Nat> args;
  std::string expected;
};

std::vector<CorpusEntry> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::vector<CorpusEntry> out;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(' ');
    const auto e = s.find_last_not_of(' ');
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    const auto p1 = line.find('|'), p2 = line.rfind('|');
    CorpusEntry c{trim(line.substr(0, p1)), {}, trim(line.substr(p2 + 1))};
    std::stringstream args(trim(line.substr(p1 + 1, p2 - p1 - 1)));
    for (std::string a; std::getline(args, a, ',');) c.args.push_back(std::stoull(a));
    out.push_back(std::move(c));
  }
  return out;
}

Verdict determinism() {
  Verdict v;
  const auto corpus = load_corpus(std::string(MEMREC_SOURCE_DIR) + "/corpus/corpus.txt");
  constexpr std::uint64_t kSeed = 1;
  std::vector<std::string> dumps;
  for (int rep = 0; rep < 3; ++rep) {
    std::ostringstream os;
    for (const auto& c : corpus) {
      const RecExpr e = parse(c.expr);
      const bool diverges = c.expected == "diverged";
      const Trace t = Engine(compile(e, c.args).system).run(SeededRandom{kSeed}, diverges ? 2000 : kDefaultMaxSteps);
      write_trace(os, t);
      if (rep > 0) continue;
      // The corpus values come from the reference evaluator.
      const EvalResult ref = eval(e, c.args, 1'000'000);
      const std::string oracle = ref.has_value() ? std::to_string(ref.value) : "diverged";
      if (oracle != c.expected) v.fail(c.expr + show(c.args) + ": corpus says " + c.expected + ", oracle " + oracle);
      const std::string got = t.outcome.halted() ? std::to_string(t.outcome.output) : "diverged";
      if (got != c.expected) v.fail(c.expr + show(c.args) + ": engine " + got + ", expected " + c.expected);
    }
    dumps.push_back(os.str());
  }
  if (dumps[0] != dumps[1] || dumps[1] != dumps[2]) v.fail("traces differ between runs");
  v.detail = std::to_string(corpus.size()) + " corpus entries, " + std::to_string(dumps[0].size()) +
             " trace bytes per run";
  return v;
}

Verdict step_counts() {
  Verdict v;
  std::size_t runs = 0;
  for (std::size_t n = 1; n <= 3; ++n)
    tuples(n, 10, [&](const auto& xs) {
      Nat sum = 0;
      for (Nat x : xs) sum += x;
      if (sum == 0) return;
      for (std::uint64_t s = 0; s < 3; ++s, ++runs)
        if (run_compiled(RecExpr::zero(n), xs, s).steps != 1) v.fail("Z" + show(xs) + " not 1 step");
    });
  for (Nat x = 0; x <= 10; ++x)
    for (std::uint64_t s = 0; s < 25; ++s, ++runs) {
      const Outcome o = run_compiled(RecExpr::succ(), {x}, s);
      if (o.steps > 3) v.fail("S(" + std::to_string(x) + ") took " + std::to_string(o.steps) + " steps");
    }
  v.detail = std::to_string(runs) + " runs";
  return v;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    Verdict (*check)();
  };
  const Criterion criteria[] = {
      {1, "basic-function soundness", basic_functions},
      {2, "addition and multiplication by primitive recursion", add_mult},
      {3, "minimalization", minimalization},
      {4, "exhaustive confluence", confluence},
      {5, "engine invariants on random systems", engine_invariants},
      {6, "determinism over the corpus", determinism},
      {7, "step counts of the basic encodings", step_counts},
  };
  bool all = true;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& ex) {
      v.fail(std::string("exception: ") + ex.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (v.ok ? "PASS" : "FAIL") << ' ' << c.id << ' ' << c.name << ": " << v.detail << " ["
              << std::fixed << std::setprecision(2) << secs << " s]\n";
    for (const auto& f : v.failures) std::cout << "    " << f << '\n';
    all = all && v.ok;
  }
  return all ? 0 : 1;
}
