#include "qrm/pipeline/report.hpp"

#include <json.hpp>

#include "qrm/errors.hpp"

namespace qrm::pipeline {

namespace {

using Json = nlohmann::ordered_json;
using trading::Decision;
using trading::Outcome;

Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

trading::TradeRecord trade(const Prediction& p, double est) {
    return {p.option_id, p.date, p.real_0, p.real_tau, est};
}

MethodResult backtest(const std::string& method, const std::vector<const Prediction*>& test,
                      const auto& decide_fn, const auto& estimate_fn) {
    MethodResult r;
    r.method = method;
    std::vector<trading::TradeRecord> trades;
    std::vector<trading::BinnedDecision> binned;
    for (const Prediction* p : test) {
        const Outcome o = trading::classify(decide_fn(*p), p->real_0, p->real_tau);
        r.counts.add(o);
        binned.push_back({p->stock, p->strike, o});
        if (const std::optional<double> est = estimate_fn(*p)) trades.push_back(trade(*p, *est));
    }
    r.metrics = trades.empty() ? trading::metrics(r.counts) : trading::metrics(r.counts, trades);
    r.bins = trading::moneyness_bins(binned);
    return r;
}

ReferencePoint reference(const std::string& method, const std::vector<const Prediction*>& rows,
                         double Prediction::*est) {
    trading::ConfusionCounts c;
    for (const Prediction* p : rows) {
        const auto t = trade(*p, p->*est);
        c.add(trading::classify(t));
    }
    const auto m = trading::metrics(c);
    return {method, m.accuracy, m.precision, m.recall};
}

std::string csv_row(std::initializer_list<std::string> fields) {
    std::string s;
    for (const auto& f : fields) {
        if (!s.empty()) s += ',';
        s += f;
    }
    return s + '\n';
}

}  // namespace

Evaluation evaluate(const std::vector<Prediction>& predictions) {
    std::vector<const Prediction*> validation;
    std::vector<const Prediction*> test;
    for (const auto& p : predictions) (p.split == Split::Validation ? validation : test).push_back(&p);
    if (validation.empty()) throw EmptyDataset("no validation predictions");
    if (test.empty()) throw EmptyDataset("no test predictions");

    Evaluation e;
    e.n_validation = validation.size();
    e.n_test = test.size();
    std::vector<double> scores;
    std::vector<int> labels;
    for (const Prediction* p : validation) {
        scores.push_back(p->score);
        labels.push_back(p->label());
    }
    e.threshold = ml::select_threshold(scores, labels);
    e.validation_reference.push_back(reference("qrm", validation, &Prediction::est_qrm));
    e.validation_reference.push_back(reference("regressor", validation, &Prediction::est_regression));

    const double c = e.threshold.c;
    auto forecast = [](double Prediction::*est) {
        return [est](const Prediction& p) { return trading::decide(trade(p, p.*est)); };
    };
    auto estimate = [](double Prediction::*est) {
        return [est](const Prediction& p) { return std::optional<double>(p.*est); };
    };
    e.methods.push_back(backtest("qrm", test, forecast(&Prediction::est_qrm), estimate(&Prediction::est_qrm)));
    e.methods.push_back(backtest(
        "classifier", test,
        [c](const Prediction& p) { return ml::threshold_buy(p.score, c) ? Decision::Buy : Decision::NoBuy; },
        [](const Prediction&) { return std::optional<double>(); }));
    e.methods.push_back(backtest("regressor", test, forecast(&Prediction::est_regression),
                                 estimate(&Prediction::est_regression)));
    return e;
}

std::string metrics_json(const Evaluation& e) {
    Json j;
    j["threshold"] = {{"c", e.threshold.c}, {"single_class", e.threshold.single_class}};
    Json refs = Json::array();
    for (const auto& r : e.validation_reference) {
        refs.push_back({{"method", r.method},
                        {"accuracy", r.accuracy},
                        {"precision", opt(r.precision)},
                        {"recall", opt(r.recall)}});
    }
    j["validation"] = {{"n", e.n_validation}, {"reference", refs}};

    Json methods = Json::array();
    for (const auto& m : e.methods) {
        const auto& s = m.metrics;
        methods.push_back({{"method", m.method},
                           {"accuracy", s.accuracy},
                           {"precision", opt(s.precision)},
                           {"recall", opt(s.recall)},
                           {"error", opt(s.mean_relative_error)},
                           {"error_excluded", s.error_excluded},
                           {"profitable", opt(s.precision)},
                           {"loss", opt(s.precision ? std::optional(1.0 - *s.precision) : std::nullopt)},
                           {"tp", m.counts.tp},
                           {"tn", m.counts.tn},
                           {"fp", m.counts.fp},
                           {"fn", m.counts.fn}});
    }
    j["test"] = {{"n", e.n_test}, {"methods", methods}};

    Json published = Json::array();
    for (const auto& p : kPublishedResults) {
        published.push_back({{"method", p.method},
                             {"accuracy", p.accuracy},
                             {"precision", p.precision},
                             {"recall", p.recall},
                             {"error", opt(p.error)}});
    }
    j["published_reference"] = {
        {"note", "results on a proprietary equity option data set; not reproducible from synthetic data"},
        {"methods", published}};
    return j.dump(2) + "\n";
}

std::string metrics_csv(const Evaluation& e) {
    std::string s = "method,accuracy,precision,recall,error,profitable,loss,tp,tn,fp,fn,n\n";
    for (const auto& m : e.methods) {
        const auto& x = m.metrics;
        const auto loss = x.precision ? std::optional(1.0 - *x.precision) : std::nullopt;
        s += csv_row({m.method, format_double(x.accuracy), format_optional(x.precision),
                      format_optional(x.recall), format_optional(x.mean_relative_error),
                      format_optional(x.precision), format_optional(loss), std::to_string(m.counts.tp),
                      std::to_string(m.counts.tn), std::to_string(m.counts.fp),
                      std::to_string(m.counts.fn), std::to_string(x.n)});
    }
    return s;
}

std::string threshold_curve_csv(const Evaluation& e) {
    std::string s = "method,c,predicted_positive,accuracy\n";
    for (const auto& pt : e.threshold.curve) {
        s += csv_row({"classifier", format_double(pt.c), std::to_string(pt.predicted_positive),
                      format_double(pt.accuracy)});
    }
    for (const auto& r : e.validation_reference) {
        s += csv_row({r.method, "NA", "NA", format_double(r.accuracy)});
    }
    return s;
}

std::string pr_curve_csv(const Evaluation& e) {
    std::string s = "method,c,recall,precision\n";
    for (const auto& pt : e.threshold.curve) {
        s += csv_row({"classifier", format_double(pt.c), format_optional(pt.recall),
                      format_optional(pt.precision)});
    }
    for (const auto& r : e.validation_reference) {
        s += csv_row({r.method, "NA", format_optional(r.recall), format_optional(r.precision)});
    }
    return s;
}

std::string moneyness_bins_csv(const Evaluation& e) {
    std::string s = "method,bin,lower,upper,n,tp,fp,precision\n";
    for (const auto& m : e.methods) {
        for (const auto& b : m.bins) {
            s += csv_row({m.method, std::to_string(b.bin), format_double(b.lower), format_double(b.upper),
                          std::to_string(b.counts.total()), std::to_string(b.counts.tp),
                          std::to_string(b.counts.fp), format_optional(b.precision)});
        }
    }
    return s;
}

}  // namespace qrm::pipeline
