#include "speechcare/loss.hpp"

#include <cmath>

namespace speechcare::train {

LossKind loss_from_string(const std::string& s) {
    if (s == "cross_entropy") return LossKind::cross_entropy;
    if (s == "focal") return LossKind::focal;
    if (s == "reweighted") return LossKind::reweighted;
    throw DataError("unknown loss kind: " + s);
}

std::string to_string(LossKind k) {
    switch (k) {
        case LossKind::cross_entropy: return "cross_entropy";
        case LossKind::focal: return "focal";
        case LossKind::reweighted: return "reweighted";
    }
    return "";
}

namespace {

double checked_p(const std::vector<double>& probabilities, int label) {
    if (label < 0 || label >= static_cast<int>(probabilities.size()))
        throw DomainError("loss label out of range");
    double sum = 0.0;
    for (const double p : probabilities) sum += p;
    if (std::abs(sum - 1.0) > 1e-6)
        throw DomainError("probabilities sum to " + std::to_string(sum) + ", expected 1");
    return probabilities[label];
}

}  // namespace

double cross_entropy_loss(const std::vector<double>& probabilities, int label) {
    const double p = checked_p(probabilities, label);
    return -std::log(std::max(p, 1e-15));
}

double focal_loss(const std::vector<double>& probabilities, int label, double gamma,
                  double alpha) {
    if (gamma < 0.0) throw DomainError("focal gamma must be >= 0");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("focal alpha must be in (0,1]");
    const double p = checked_p(probabilities, label);
    if (p >= 1.0) return 0.0;
    const double pt = std::max(p, 1e-15);
    return -alpha * std::pow(1.0 - pt, gamma) * std::log(pt);
}

}  // namespace speechcare::train
