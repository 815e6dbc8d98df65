#pragma once

#include <string>

#include "hrl/corpus.hpp"
#include "hrl/policy.hpp"

namespace hrl {

struct SelectionReport {
  std::string text;
  std::string html;
};

namespace report {

/// Plain-text and HTML renderings of one decoded trajectory: selected
/// clauses and selected words are marked distinctly from discarded tokens,
/// with the predicted and gold ratings (and a flag when the prediction fell
/// back to a random rating).
SelectionReport render_selection_report(const Corpus& corpus, const Document& doc,
                                        const AspectQuery& query, const HighTrajectory& traj,
                                        int predicted_rating, bool fallback);

}  // namespace report
}  // namespace hrl
