#pragma once

// Golden-case corpus: one program per file with its expected printed result.
//
//   ;; name: select-row
//   ;; mode: exact            (or: dummy | numeric <tol>)
//   ;; bind: a=1 b=3 θ=0.5    (numeric mode only)
//   <program forms>
//   ;=> <expected print of the last form>
//
// Expectations may span several `;=>` lines; they are joined with spaces.
// `;=> error: <kind>` expects evaluation to fail with that error kind.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "indexlang/error.hpp"
#include "indexlang/expr.hpp"

namespace indexlang::cli {

enum class Equivalence { Exact, Dummy, Numeric };

struct GoldenCase {
  std::string name;
  std::string source;
  std::string expected;
  Equivalence mode = Equivalence::Exact;
  double tolerance = 0;
  sym::NumericBinding binding;
  std::optional<ErrorKind> expected_error;
};

struct CaseResult {
  std::string name;
  bool passed = false;
  std::string actual;
  std::string message;
  /// False when a with-symbols local symbol leaked into the printed result.
  bool hygienic = true;
};

GoldenCase parse_golden(std::string_view text, std::string fallback_name);
/// Cases sorted by file name; `filter` keeps names containing it.
std::vector<GoldenCase> load_corpus(const std::filesystem::path& dir, std::string_view filter = {});

/// Whitespace collapsed, no padding inside `[|`/`|]`, dummy ids dropped when
/// `dummies` is set.
std::string normalize(std::string_view printed, bool dummies);

CaseResult run_case(const GoldenCase& c);
/// Runs cases concurrently, one interpreter per case; results keep input order.
std::vector<CaseResult> run_suite(const std::vector<GoldenCase>& cases, unsigned threads = 0);

std::optional<ErrorKind> error_kind_from_string(std::string_view name);

}  // namespace indexlang::cli
