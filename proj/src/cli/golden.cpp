#include "indexlang/golden.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

#include "indexlang/evaluator.hpp"

namespace indexlang::cli {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

constexpr std::pair<const char*, ErrorKind> kErrorNames[] = {
    {"arithmetic", ErrorKind::Arithmetic},
    {"shape", ErrorKind::Shape},
    {"rank", ErrorKind::Rank},
    {"bounds", ErrorKind::Bounds},
    {"dimension-mismatch", ErrorKind::DimensionMismatch},
    {"arity", ErrorKind::Arity},
    {"type", ErrorKind::Type},
    {"parse", ErrorKind::Parse},
    {"unbound", ErrorKind::Unbound},
    {"ambiguous", ErrorKind::Ambiguous},
    {"singular", ErrorKind::Singular},
    {"broadcast", ErrorKind::Broadcast},
    {"incomparable", ErrorKind::Incomparable},
    {"evaluation", ErrorKind::Evaluation},
};

std::string error_slug(ErrorKind k) {
  for (const auto& [name, kind] : kErrorNames)
    if (kind == k) return name;
  return "error";
}

void numeric_components(const Value& v, const sym::NumericBinding& env, std::vector<double>& out) {
  if (v.is_scalar()) {
    out.push_back(sym::eval_numeric(v.scalar(), env));
  } else if (v.is_tensor()) {
    for (const auto& c : v.tensor().data()) numeric_components(c, env, out);
  } else {
    throw Error(ErrorKind::Type, "numeric comparison of a " + v.type_name());
  }
}

bool leaks_local_symbol(std::string_view printed) { return Interpreter::is_local_symbol_name(printed); }

}  // namespace

std::optional<ErrorKind> error_kind_from_string(std::string_view name) {
  for (const auto& [n, kind] : kErrorNames)
    if (name == n) return kind;
  return std::nullopt;
}

std::string normalize(std::string_view printed, bool dummies) {
  std::string s;
  bool space = false;
  for (char c : printed) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !s.empty();
      continue;
    }
    if (space) s += ' ';
    space = false;
    s += c;
  }
  s = std::regex_replace(s, std::regex(R"(\[\| +)"), "[|");
  s = std::regex_replace(s, std::regex(R"( +\|\])"), "|]");
  if (dummies) s = std::regex_replace(s, std::regex(R"(#[0-9]+)"), "#");
  return s;
}

GoldenCase parse_golden(std::string_view text, std::string fallback_name) {
  GoldenCase c;
  c.name = std::move(fallback_name);
  std::istringstream in{std::string(text)};
  std::string line, source, expected;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (starts_with(t, ";; name:")) {
      c.name = trim(t.substr(8));
    } else if (starts_with(t, ";; mode:")) {
      std::istringstream m(t.substr(8));
      std::string mode;
      m >> mode;
      if (mode == "exact") {
        c.mode = Equivalence::Exact;
      } else if (mode == "dummy") {
        c.mode = Equivalence::Dummy;
      } else if (mode == "numeric") {
        c.mode = Equivalence::Numeric;
        if (!(m >> c.tolerance) || c.tolerance <= 0)
          throw Error(ErrorKind::Parse, "golden case " + c.name + ": numeric mode needs a positive tolerance");
      } else {
        throw Error(ErrorKind::Parse, "golden case " + c.name + ": unknown mode `" + mode + "`");
      }
    } else if (starts_with(t, ";; bind:")) {
      std::istringstream b(t.substr(8));
      std::string pair;
      while (b >> pair) {
        auto eq = pair.find('=');
        if (eq == std::string::npos) throw Error(ErrorKind::Parse, "golden case " + c.name + ": bad binding " + pair);
        c.binding[pair.substr(0, eq)] = std::stod(pair.substr(eq + 1));
      }
    } else if (starts_with(t, ";=>")) {
      expected += (expected.empty() ? "" : " ") + trim(t.substr(3));
    } else {
      source += line + "\n";
    }
  }
  if (starts_with(expected, "error:")) {
    std::string kind = trim(expected.substr(6));
    c.expected_error = error_kind_from_string(kind);
    if (!c.expected_error) throw Error(ErrorKind::Parse, "golden case " + c.name + ": unknown error kind " + kind);
  }
  c.source = std::move(source);
  c.expected = std::move(expected);
  return c;
}

std::vector<GoldenCase> load_corpus(const std::filesystem::path& dir, std::string_view filter) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".il") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<GoldenCase> cases;
  for (const auto& f : files) {
    std::ifstream in(f);
    std::stringstream buf;
    buf << in.rdbuf();
    GoldenCase c = parse_golden(buf.str(), f.stem().string());
    if (filter.empty() || c.name.find(filter) != std::string::npos) cases.push_back(std::move(c));
  }
  return cases;
}

CaseResult run_case(const GoldenCase& c) {
  CaseResult r;
  r.name = c.name;
  std::vector<Value> values;
  try {
    Interpreter interp;
    values = interp.run(c.source);
  } catch (const Error& e) {
    r.actual = "error: " + error_slug(e.kind());
    r.hygienic = !leaks_local_symbol(e.what());
    if (c.expected_error && *c.expected_error == e.kind()) {
      r.passed = r.hygienic;
    } else {
      r.message = e.what();
    }
    return r;
  }
  if (values.empty()) {
    r.message = "program produced no result";
    return r;
  }
  const Value& last = values.back();
  r.actual = normalize(to_string(last), c.mode != Equivalence::Exact);
  r.hygienic = !leaks_local_symbol(r.actual);
  if (!r.hygienic) {
    r.message = "local symbol leaked into the result";
    return r;
  }
  if (c.expected_error) {
    r.message = "expected an error, got a value";
    return r;
  }
  if (c.mode != Equivalence::Numeric) {
    r.passed = r.actual == normalize(c.expected, c.mode != Equivalence::Exact);
    if (!r.passed) r.message = "expected " + normalize(c.expected, c.mode != Equivalence::Exact);
    return r;
  }
  try {
    std::vector<double> got;
    numeric_components(last, c.binding, got);
    std::vector<double> want;
    std::istringstream in(c.expected);
    for (double x; in >> x;) want.push_back(x);
    if (got.size() != want.size()) {
      r.message = "expected " + std::to_string(want.size()) + " numbers, got " + std::to_string(got.size());
      return r;
    }
    for (std::size_t i = 0; i < got.size(); ++i) {
      if (std::abs(got[i] - want[i]) > c.tolerance * (1 + std::abs(want[i]))) {
        r.message = "component " + std::to_string(i + 1) + ": " + std::to_string(got[i]) + " vs " +
                    std::to_string(want[i]);
        return r;
      }
    }
    r.passed = true;
  } catch (const Error& e) {
    r.message = e.what();
  }
  return r;
}

std::vector<CaseResult> run_suite(const std::vector<GoldenCase>& cases, unsigned threads) {
  std::vector<CaseResult> results(cases.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(cases.size(), 1)));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < cases.size();) results[i] = run_case(cases[i]);
  };
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();
  return results;
}

}  // namespace indexlang::cli
