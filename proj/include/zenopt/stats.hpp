#ifndef ZENOPT_STATS_HPP
#define ZENOPT_STATS_HPP

#include <string>
#include <vector>

#include "zenopt/ingest.hpp"

namespace zenopt {

struct BoxplotStats {
    double q1 = 0, median = 0, q3 = 0;
    double whisker_lo = 0, whisker_hi = 0;  // most extreme points within 1.5 IQR
    std::vector<double> outliers;
};

struct HistogramStats {
    std::vector<double> edges;    // size bins+1
    std::vector<double> density;  // size bins; integrates to 1
};

struct SeriesStats {
    std::string role;
    std::vector<double> duration_curve;  // descending sort of the values
    BoxplotStats boxplot;
    HistogramStats histogram;
};

struct YearStats {
    int year = 0;
    std::vector<SeriesStats> series;  // spot, co2_el, temperature, irradiance
};

// Quartiles use linear interpolation between order statistics.
double quantile(const std::vector<double>& sorted_values, double p);

SeriesStats series_stats(const std::string& role, const std::vector<double>& values);
YearStats year_stats(const ScenarioYear& scenario);

// One CSV per role per chart type: <role>_boxplot.csv, <role>_duration.csv,
// <role>_density.csv under `dir`. Returns the paths written.
std::vector<std::string> write_year_stats(const YearStats& stats, const std::string& dir,
                                          const std::vector<std::string>& roles = {});

}  // namespace zenopt

#endif
