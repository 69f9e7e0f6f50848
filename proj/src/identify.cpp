#include "determlr/identify.hpp"

#include <algorithm>
#include <optional>

namespace determlr {

namespace {

IdentificationResult relabel(const std::vector<Premise>& premises, const std::vector<Kind>& kinds) {
  IdentificationResult out;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    if (kinds[i] == Kind::Determinate) {
      out.determinate.push_back(premises[i].with_kind(
          Kind::Determinate, PremiseId{"d" + std::to_string(out.determinate.size() + 1)}));
    } else {
      out.indeterminate.push_back(premises[i].with_kind(
          Kind::Indeterminate, PremiseId{"i" + std::to_string(out.indeterminate.size() + 1)}));
    }
  }
  return out;
}

}  // namespace

bool is_compound(std::string_view normalized) {
  return normalized.starts_with("if ") || normalized == "if" || normalized.starts_with("if,") ||
         normalized.find(" then ") != std::string_view::npos ||
         normalized.find(" or ") != std::string_view::npos ||
         normalized.find("either ") != std::string_view::npos;
}

Kind classify_premise(const Premise& premise, const Target& target, const TermProfiler& profiler) {
  if (is_compound(premise.normalized())) return Kind::Indeterminate;
  const auto shared = shared_terms(profiler.profile(premise.text()), profiler.profile(target.hypothesis));
  return shared.nouns + shared.adjectives > 0 ? Kind::Determinate : Kind::Indeterminate;
}

IdentificationResult identify_all(const std::vector<Premise>& premises, const Target& target,
                                  IdentifyMode mode, InferenceBackend* backend,
                                  const TermProfiler& profiler) {
  if (premises.empty()) throw Error("identification needs at least one premise");
  if (mode == IdentifyMode::BackendDelegated && !backend) {
    throw Error("backend-delegated identification without a backend");
  }

  std::vector<Kind> kinds;
  kinds.reserve(premises.size());
  for (const auto& p : premises) {
    if (mode == IdentifyMode::RuleBased) {
      kinds.push_back(classify_premise(p, target, profiler));
      continue;
    }
    try {
      kinds.push_back(backend->classify(p, target));
    } catch (const BackendUnavailable& e) {
      const std::vector<Premise> done(premises.begin(), premises.begin() + static_cast<long>(kinds.size()));
      throw IdentificationUnavailable(e.what(), relabel(done, kinds));
    }
  }

  if (std::none_of(kinds.begin(), kinds.end(), [](Kind k) { return k == Kind::Determinate; })) {
    std::optional<std::size_t> best;
    Score best_score{-1};
    for (std::size_t i = 0; i < premises.size(); ++i) {
      const Score s = relevance(premises[i], target, profiler);
      if (!best || s > best_score) {
        best = i;
        best_score = s;
      }
    }
    kinds[*best] = Kind::Determinate;
  }
  return relabel(premises, kinds);
}

}  // namespace determlr
