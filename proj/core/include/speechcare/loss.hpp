#pragma once

#include <string>
#include <vector>

#include "speechcare/errors.hpp"

namespace speechcare::train {

enum class LossKind { cross_entropy, focal, reweighted };

LossKind loss_from_string(const std::string& s);
std::string to_string(LossKind k);

// -log p_label on a probability vector, clamped at p >= 1e-15.
double cross_entropy_loss(const std::vector<double>& probabilities, int label);

// -alpha * (1 - p_t)^gamma * log(p_t). gamma = 0, alpha = 1 reduces to
// cross entropy; p_t = 1 gives exactly 0.
double focal_loss(const std::vector<double>& probabilities, int label, double gamma,
                  double alpha);

}  // namespace speechcare::train
