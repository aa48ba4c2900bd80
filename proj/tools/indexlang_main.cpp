#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include <unistd.h>

#include "indexlang/ast.hpp"
#include "indexlang/error.hpp"
#include "indexlang/evaluator.hpp"
#include "indexlang/golden.hpp"
#include "indexlang/torus.hpp"

#ifndef GOLDEN_DIR
#define GOLDEN_DIR "tests/golden"
#endif

using namespace indexlang;

namespace {

// Evaluates every form of `source`, printing non-define results. Stops at the
// first error.
bool evaluate(Interpreter& in, std::string_view source, const std::string& origin) {
  try {
    for (const auto& form : lang::parse(source)) {
      if (auto v = in.eval_toplevel(*form)) std::cout << to_string(*v) << "\n";
    }
    return true;
  } catch (const Error& e) {
    std::cerr << origin << ": " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << origin << ": internal error: " << e.what() << "\n";
  }
  return false;
}

int run_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) {
    std::cerr << path << ": cannot open file\n";
    return 1;
  }
  std::stringstream buf;
  buf << f.rdbuf();
  Interpreter in;
  return evaluate(in, buf.str(), path) ? 0 : 1;
}

// Net bracket depth of a line, skipping `;` comments.
int depth_change(const std::string& line) {
  int d = 0;
  for (char c : line) {
    if (c == ';') break;
    if (c == '(' || c == '[' || c == '{') ++d;
    if (c == ')' || c == ']' || c == '}') --d;
  }
  return d;
}

int repl() {
  Interpreter in;
  bool ok = true;
  bool tty = isatty(0);
  std::string pending, line;
  int depth = 0;
  if (tty) std::cout << "> " << std::flush;
  while (std::getline(std::cin, line)) {
    pending += line + "\n";
    depth += depth_change(line);
    if (depth <= 0) {
      ok = evaluate(in, pending, "<repl>") && ok;
      pending.clear();
      depth = 0;
    }
    if (tty) std::cout << (depth > 0 ? ". " : "> ") << std::flush;
  }
  if (!pending.empty()) ok = evaluate(in, pending, "<repl>") && ok;
  return ok ? 0 : 1;
}

int run_tests(const std::string& dir, const std::string& filter) {
  std::vector<cli::GoldenCase> cases;
  try {
    cases = cli::load_corpus(dir, filter);
  } catch (const std::exception& e) {
    std::cerr << dir << ": " << e.what() << "\n";
    return 1;
  }
  auto results = cli::run_suite(cases);
  std::size_t failed = 0;
  for (const auto& r : results) {
    if (r.passed) {
      std::cout << "PASS " << r.name << "\n";
    } else {
      ++failed;
      std::cout << "FAIL " << r.name << ": got " << r.actual << "\n     " << r.message << "\n";
    }
  }
  std::cout << results.size() - failed << "/" << results.size() << " golden cases passed\n";
  return failed == 0 && !results.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interpreter for a small functional language with tensor index notation"};
  app.require_subcommand(1);

  std::string file;
  auto* run = app.add_subcommand("run", "Evaluate a program file and print each result");
  run->add_option("file", file, "Program file")->required();

  auto* rep = app.add_subcommand("repl", "Read-eval-print loop on standard input");

  std::string dir = GOLDEN_DIR, filter;
  auto* test = app.add_subcommand("test", "Run the golden-case corpus");
  test->add_option("--filter", filter, "Only cases whose name contains this");
  test->add_option("--dir", dir, "Corpus directory");

  std::uint64_t seed = 1;
  std::size_t samples = 20;
  auto* demo = app.add_subcommand("demo-torus", "Check the torus curvature against a finite-difference oracle");
  demo->add_option("--seed", seed, "Seed for the random bindings");
  demo->add_option("--samples", samples, "Number of random bindings")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  if (*run) return run_file(file);
  if (*rep) return repl();
  if (*test) return run_tests(dir, filter);
  if (*demo) {
    try {
      auto report = cli::run_torus_demo(seed, samples);
      cli::print_report(report, std::cout);
      return report.passed ? 0 : 1;
    } catch (const Error& e) {
      std::cerr << "demo-torus: " << e.what() << "\n";
      return 1;
    }
  }
  return 1;
}
