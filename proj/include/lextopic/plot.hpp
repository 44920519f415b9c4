#pragma once

// Minimal SVG charts for fitted models and sweeps.

#include <span>
#include <string>

#include "lextopic/embed_store.hpp"
#include "lextopic/topic_eval.hpp"
#include "lextopic/topic_rep.hpp"

namespace lextopic::plot {

/// Points from a 2-column matrix, one colour per topic, noise in gray.
std::string scatter_svg(const embed::EmbeddingMatrix& points, std::span<const int> labels);

/// One horizontal bar chart per topic; every word is a rect of class "bar".
std::string bars_svg(std::span<const topics::Topic> topics);

/// Topic diversity and C_v against K.
std::string sweep_svg(std::span<const topic_eval::SweepRow> rows);

}  // namespace lextopic::plot
