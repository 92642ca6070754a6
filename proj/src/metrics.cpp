#include "malfam/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "malfam/errors.hpp"

namespace malfam {

namespace {

constexpr std::string_view kMergedClassName = "Trojan + Backdoor/RAT";

std::size_t class_index(FamilyLabel family, bool merged) {
    std::size_t idx = static_cast<std::size_t>(evaluation_class(family));
    if (!merged) {
        return static_cast<std::size_t>(family);
    }
    // Backdoor/RAT folds into Trojan's slot; families after it shift down.
    if (idx > static_cast<std::size_t>(FamilyLabel::BackdoorRat)) {
        --idx;
    }
    return idx;
}

double safe_ratio(double numerator, double denominator) {
    return denominator > 0.0 ? numerator / denominator : 0.0;
}

std::map<std::string, double> label_frequencies(const std::vector<std::string>& labels) {
    std::map<std::string, double> freq;
    for (const std::string& l : labels) {
        freq[l] += 1.0;
    }
    for (auto& [l, count] : freq) {
        (void)l;
        count /= static_cast<double>(labels.size());
    }
    return freq;
}

}  // namespace

std::int64_t ConfusionMatrix::n_samples() const {
    std::int64_t total = 0;
    for (const auto& row : counts) {
        for (std::int64_t v : row) {
            total += v;
        }
    }
    return total;
}

std::int64_t ConfusionMatrix::invalid_count() const {
    std::int64_t total = 0;
    for (const auto& row : counts) {
        total += row.back();
    }
    return total;
}

std::int64_t ConfusionMatrix::support(std::size_t class_index) const {
    std::int64_t total = 0;
    for (std::int64_t v : counts.at(class_index)) {
        total += v;
    }
    return total;
}

std::vector<std::string> evaluation_class_names(bool merge_equivalent) {
    std::vector<std::string> names;
    for (FamilyLabel f : all_families()) {
        if (merge_equivalent) {
            if (f == FamilyLabel::Trojan) {
                names.emplace_back(kMergedClassName);
                continue;
            }
            if (f == FamilyLabel::BackdoorRat) {
                continue;
            }
        }
        names.emplace_back(display_name(f));
    }
    return names;
}

ConfusionMatrix confusion_matrix(
    const std::map<std::string, std::optional<FamilyLabel>>& preds,
    const std::vector<GoldRecord>& gold, bool merge_equivalent) {
    if (gold.empty()) {
        throw DataError("confusion_matrix: empty gold set");
    }
    ConfusionMatrix m;
    m.merged = merge_equivalent;
    m.classes = evaluation_class_names(merge_equivalent);
    m.counts.assign(m.classes.size(), std::vector<std::int64_t>(m.classes.size() + 1, 0));
    for (const GoldRecord& record : gold) {
        std::size_t row = class_index(record.label, merge_equivalent);
        auto it = preds.find(record.sample_id);
        if (it == preds.end() || !it->second.has_value()) {
            ++m.counts[row].back();
        } else {
            ++m.counts[row][class_index(*it->second, merge_equivalent)];
        }
    }
    return m;
}

MetricsReport macro_metrics(const ConfusionMatrix& confusion, bool include_zero_support) {
    const std::size_t n_classes = confusion.classes.size();
    if (confusion.n_samples() <= 0) {
        throw DataError("macro_metrics: confusion matrix is empty");
    }

    MetricsReport report;
    report.confusion = confusion;
    report.n_samples = confusion.n_samples();

    std::int64_t diagonal = 0;
    double macro_p = 0.0, macro_r = 0.0, macro_f1 = 0.0;
    std::size_t averaged = 0;

    for (std::size_t c = 0; c < n_classes; ++c) {
        std::int64_t tp = confusion.counts[c][c];
        std::int64_t fn = confusion.support(c) - tp;
        std::int64_t fp = 0;
        for (std::size_t r = 0; r < n_classes; ++r) {
            if (r != c) {
                fp += confusion.counts[r][c];
            }
        }
        diagonal += tp;

        ClassMetrics cm;
        cm.support = confusion.support(c);
        cm.precision = safe_ratio(static_cast<double>(tp), static_cast<double>(tp + fp));
        cm.recall = safe_ratio(static_cast<double>(tp), static_cast<double>(tp + fn));
        cm.f1 = safe_ratio(2.0 * cm.precision * cm.recall, cm.precision + cm.recall);
        report.per_class.emplace_back(confusion.classes[c], cm);

        if (cm.support > 0 || include_zero_support) {
            macro_p += cm.precision;
            macro_r += cm.recall;
            macro_f1 += cm.f1;
            ++averaged;
        }
    }

    report.accuracy =
        static_cast<double>(diagonal) / static_cast<double>(report.n_samples);
    if (averaged > 0) {
        report.macro_precision = macro_p / static_cast<double>(averaged);
        report.macro_recall = macro_r / static_cast<double>(averaged);
        report.macro_f1 = macro_f1 / static_cast<double>(averaged);
    }
    return report;
}

double cohen_kappa(const std::vector<std::string>& labels_a,
                   const std::vector<std::string>& labels_b,
                   KappaMarginals marginals) {
    if (labels_a.size() != labels_b.size()) {
        throw DataError("cohen_kappa: label lists differ in length (" +
                        std::to_string(labels_a.size()) + " vs " +
                        std::to_string(labels_b.size()) + ")");
    }
    if (labels_a.empty()) {
        throw DataError("cohen_kappa: empty label lists");
    }

    const double n = static_cast<double>(labels_a.size());
    double agreements = 0.0;
    for (std::size_t i = 0; i < labels_a.size(); ++i) {
        if (labels_a[i] == labels_b[i]) {
            agreements += 1.0;
        }
    }
    const double p_o = agreements / n;

    double p_e = 0.0;
    if (marginals == KappaMarginals::Pooled) {
        std::vector<std::string> pooled = labels_a;
        pooled.insert(pooled.end(), labels_b.begin(), labels_b.end());
        for (const auto& [label, q] : label_frequencies(pooled)) {
            (void)label;
            p_e += q * q;
        }
    } else {
        auto freq_a = label_frequencies(labels_a);
        auto freq_b = label_frequencies(labels_b);
        for (const auto& [label, pa] : freq_a) {
            auto it = freq_b.find(label);
            if (it != freq_b.end()) {
                p_e += pa * it->second;
            }
        }
    }

    if (p_e >= 1.0) {
        return 1.0;  // both lists constant on the same label; p_o is 1 too
    }
    return (p_o - p_e) / (1.0 - p_e);
}

nlohmann::json metrics_to_json(const MetricsReport& report) {
    nlohmann::json per_class = nlohmann::json::object();
    for (const auto& [name, cm] : report.per_class) {
        per_class[name] = {
            {"precision", cm.precision},
            {"recall", cm.recall},
            {"f1", cm.f1},
            {"support", cm.support},
        };
    }
    return nlohmann::json{
        {"accuracy", report.accuracy},
        {"macro_precision", report.macro_precision},
        {"macro_recall", report.macro_recall},
        {"macro_f1", report.macro_f1},
        {"n_samples", report.n_samples},
        {"per_class", per_class},
        {"confusion",
         {
             {"classes", report.confusion.classes},
             {"merged", report.confusion.merged},
             {"counts", report.confusion.counts},
         }},
    };
}

MetricsReport metrics_from_json(const nlohmann::json& doc) {
    MetricsReport report;
    report.accuracy = doc.at("accuracy").get<double>();
    report.macro_precision = doc.at("macro_precision").get<double>();
    report.macro_recall = doc.at("macro_recall").get<double>();
    report.macro_f1 = doc.at("macro_f1").get<double>();
    report.n_samples = doc.at("n_samples").get<std::int64_t>();
    report.confusion.classes = doc.at("confusion").at("classes").get<std::vector<std::string>>();
    report.confusion.merged = doc.at("confusion").at("merged").get<bool>();
    report.confusion.counts =
        doc.at("confusion").at("counts").get<std::vector<std::vector<std::int64_t>>>();
    const auto& per_class = doc.at("per_class");
    for (const std::string& name : report.confusion.classes) {
        const auto& cm = per_class.at(name);
        report.per_class.emplace_back(
            name, ClassMetrics{cm.at("precision").get<double>(), cm.at("recall").get<double>(),
                               cm.at("f1").get<double>(), cm.at("support").get<std::int64_t>()});
    }
    return report;
}

std::string render_metrics_table(
    const std::vector<std::pair<std::string, MetricsReport>>& rows) {
    std::size_t name_width = std::string("Unit").size();
    for (const auto& [name, report] : rows) {
        (void)report;
        name_width = std::max(name_width, name.size());
    }
    std::ostringstream out;
    out << std::left << std::setw(static_cast<int>(name_width)) << "Unit" << std::right
        << std::setw(10) << "Accuracy" << std::setw(10) << "Macro-P" << std::setw(10)
        << "Macro-R" << std::setw(10) << "Macro-F1" << '\n';
    out << std::string(name_width + 40, '-') << '\n';
    out << std::fixed << std::setprecision(3);
    for (const auto& [name, report] : rows) {
        out << std::left << std::setw(static_cast<int>(name_width)) << name << std::right
            << std::setw(10) << report.accuracy << std::setw(10) << report.macro_precision
            << std::setw(10) << report.macro_recall << std::setw(10) << report.macro_f1
            << '\n';
    }
    return out.str();
}

std::string render_class_breakdown(const MetricsReport& report) {
    std::size_t name_width = std::string("Class").size();
    for (const auto& [name, cm] : report.per_class) {
        (void)cm;
        name_width = std::max(name_width, name.size());
    }
    std::ostringstream out;
    out << std::left << std::setw(static_cast<int>(name_width)) << "Class" << std::right
        << std::setw(8) << "Prec" << std::setw(8) << "Rec" << std::setw(8) << "F1"
        << std::setw(9) << "Support" << '\n';
    out << std::string(name_width + 33, '-') << '\n';
    out << std::fixed << std::setprecision(3);
    for (const auto& [name, cm] : report.per_class) {
        out << std::left << std::setw(static_cast<int>(name_width)) << name << std::right
            << std::setw(8) << cm.precision << std::setw(8) << cm.recall << std::setw(8)
            << cm.f1 << std::setw(9) << cm.support << '\n';
    }
    out << "\nConfusion (rows = gold, cols = predicted, last col = invalid):\n";
    for (std::size_t r = 0; r < report.confusion.counts.size(); ++r) {
        out << "  [" << std::setw(2) << r << "] " << std::left
            << std::setw(static_cast<int>(name_width)) << report.confusion.classes[r]
            << std::right;
        for (std::int64_t v : report.confusion.counts[r]) {
            out << std::setw(6) << v;
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace malfam
