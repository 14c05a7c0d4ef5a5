#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "micol/evaluation.hpp"
#include "micol/hin.hpp"
#include <json.hpp>

namespace micol {

/// Jensen-Shannon divergence (natural log) between the uniform distribution
/// over a neighbourhood of size x and the uniform distribution over the
/// label-overlap set of size y, given `shared` documents in both sets.
/// nullopt when x or y is 0.
std::optional<double> js_closed_form(std::size_t x, std::size_t y, std::size_t shared);

struct JsTerms {
  std::size_t x = 0;       // |N_M(d)|
  std::size_t y = 0;       // documents sharing a label with d
  std::size_t overlap = 0;
  std::optional<double> js;
};

/// Restricted to documents with non-empty labels in `truth`. Throws
/// PreconditionError when `d` has no labels.
JsTerms js_divergence(const Hin& h, const GroundTruth& truth, DocIndex d, MetaPattern m);

struct PatternDiagnosis {
  MetaPattern pattern;
  std::vector<std::string> doc_ids;
  std::vector<JsTerms> rows;
  std::optional<double> mean_js;
  std::size_t skipped = 0;
};

struct JsReport {
  std::size_t subset_size = 0;
  std::vector<PatternDiagnosis> patterns;  // ascending mean JS, undefined last

  nlohmann::json to_json() const;
};

/// Diagnoses every labeled document of `truth` that is also in `h`.
JsReport diagnose(const Hin& h, const GroundTruth& truth, const std::vector<MetaPattern>& patterns,
                  std::size_t threads = 1);

}  // namespace micol
