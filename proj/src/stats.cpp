#include "zenopt/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace zenopt {

double quantile(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("quantile of empty series");
    if (p <= 0.0) return sorted.front();
    if (p >= 1.0) return sorted.back();
    double pos = p * (static_cast<double>(sorted.size()) - 1.0);
    std::size_t lo = static_cast<std::size_t>(pos);
    double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

SeriesStats series_stats(const std::string& role, const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("series_stats: empty series");
    SeriesStats out;
    out.role = role;
    out.duration_curve = values;
    std::sort(out.duration_curve.begin(), out.duration_curve.end(), std::greater<double>());

    std::vector<double> sorted(values);
    std::sort(sorted.begin(), sorted.end());
    BoxplotStats& box = out.boxplot;
    box.q1 = quantile(sorted, 0.25);
    box.median = quantile(sorted, 0.5);
    box.q3 = quantile(sorted, 0.75);
    double iqr = box.q3 - box.q1;
    double fence_lo = box.q1 - 1.5 * iqr;
    double fence_hi = box.q3 + 1.5 * iqr;
    box.whisker_lo = box.q1;
    box.whisker_hi = box.q3;
    for (double v : sorted) {
        if (v >= fence_lo) {
            box.whisker_lo = v;
            break;
        }
    }
    for (auto it = sorted.rbegin(); it != sorted.rend(); ++it) {
        if (*it <= fence_hi) {
            box.whisker_hi = *it;
            break;
        }
    }
    for (double v : sorted)
        if (v < fence_lo || v > fence_hi) box.outliers.push_back(v);

    // Freedman-Diaconis bin width with sane fallbacks.
    double lo = sorted.front(), hi = sorted.back();
    HistogramStats& histo = out.histogram;
    if (hi <= lo) {
        histo.edges = {lo - 0.5, lo + 0.5};
        histo.density = {1.0};
    } else {
        double width = 2.0 * iqr / std::cbrt(static_cast<double>(sorted.size()));
        int bins;
        if (width <= 0)
            bins = 32;
        else
            bins = static_cast<int>(std::clamp((hi - lo) / width, 1.0, 200.0));
        double step = (hi - lo) / bins;
        histo.edges.resize(bins + 1);
        for (int i = 0; i <= bins; ++i) histo.edges[i] = lo + step * i;
        histo.edges.back() = hi;
        std::vector<std::size_t> counts(bins, 0);
        for (double v : sorted) {
            int b = static_cast<int>((v - lo) / step);
            b = std::clamp(b, 0, bins - 1);
            ++counts[b];
        }
        histo.density.resize(bins);
        double n = static_cast<double>(sorted.size());
        for (int i = 0; i < bins; ++i) histo.density[i] = counts[i] / (n * step);
    }
    return out;
}

YearStats year_stats(const ScenarioYear& scenario) {
    YearStats out;
    out.year = scenario.year;
    out.series.push_back(series_stats("spot", scenario.spot));
    out.series.push_back(series_stats("co2_el", scenario.co2_el));
    out.series.push_back(series_stats("temperature", scenario.temperature));
    out.series.push_back(series_stats("irradiance", scenario.irradiance));
    return out;
}

std::vector<std::string> write_year_stats(const YearStats& stats, const std::string& dir,
                                          const std::vector<std::string>& roles) {
    std::vector<std::string> written;
    auto wanted = [&](const std::string& role) {
        if (roles.empty()) return true;
        return std::find(roles.begin(), roles.end(), role) != roles.end();
    };
    auto open = [&](const std::string& name) {
        std::string path = dir + "/" + name;
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write '" + path + "'");
        written.push_back(path);
        return out;
    };
    for (const SeriesStats& s : stats.series) {
        if (!wanted(s.role)) continue;
        {
            auto out = open(s.role + "_boxplot.csv");
            out << "stat,value\n";
            out << "q1," << s.boxplot.q1 << "\n";
            out << "median," << s.boxplot.median << "\n";
            out << "q3," << s.boxplot.q3 << "\n";
            out << "whisker_lo," << s.boxplot.whisker_lo << "\n";
            out << "whisker_hi," << s.boxplot.whisker_hi << "\n";
            for (double v : s.boxplot.outliers) out << "outlier," << v << "\n";
        }
        {
            auto out = open(s.role + "_duration.csv");
            out << "hours_exceeded,value\n";
            for (std::size_t i = 0; i < s.duration_curve.size(); ++i)
                out << i << "," << s.duration_curve[i] << "\n";
        }
        {
            auto out = open(s.role + "_density.csv");
            out << "bin_lo,bin_hi,density\n";
            for (std::size_t i = 0; i < s.histogram.density.size(); ++i)
                out << s.histogram.edges[i] << "," << s.histogram.edges[i + 1] << ","
                    << s.histogram.density[i] << "\n";
        }
    }
    return written;
}

}  // namespace zenopt
