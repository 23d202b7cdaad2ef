#include "adact/data.hpp"
#include "adact/error.hpp"

namespace adact {

Metrics compute_metrics(const std::vector<int>& predicted, const std::vector<int>& truth,
                        std::size_t num_classes) {
    if (predicted.size() != truth.size()) {
        throw ShapeError("compute_metrics: " + std::to_string(predicted.size()) +
                         " predictions vs " + std::to_string(truth.size()) + " labels");
    }
    Metrics m;
    m.confusion = Tensor({num_classes, num_classes});
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] < 0 || static_cast<std::size_t>(truth[i]) >= num_classes ||
            predicted[i] < 0 || static_cast<std::size_t>(predicted[i]) >= num_classes) {
            throw DomainError("compute_metrics: label out of range at row " + std::to_string(i));
        }
        m.confusion.at2(static_cast<std::size_t>(truth[i]),
                        static_cast<std::size_t>(predicted[i])) += 1.0;
    }
    double trace = 0.0;
    for (std::size_t c = 0; c < num_classes; ++c) trace += m.confusion.at2(c, c);
    m.accuracy = trace / static_cast<double>(truth.size());

    m.precision.assign(num_classes, 0.0);
    m.recall.assign(num_classes, 0.0);
    for (std::size_t c = 0; c < num_classes; ++c) {
        double col = 0.0, row = 0.0;
        for (std::size_t j = 0; j < num_classes; ++j) {
            col += m.confusion.at2(j, c);
            row += m.confusion.at2(c, j);
        }
        double tp = m.confusion.at2(c, c);
        m.precision[c] = col > 0.0 ? tp / col : 0.0;  // 0/0 counts as 0
        m.recall[c] = row > 0.0 ? tp / row : 0.0;
    }
    return m;
}

}  // namespace adact
