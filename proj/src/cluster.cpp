#include "zenopt/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>

#include "json.hpp"

namespace zenopt {

using nlohmann::json;

namespace {
[[noreturn]] void fail(const std::string& what) { throw std::runtime_error(what); }

double sqdist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}
}  // namespace

int ClusterSet::role_index(const std::string& role) const {
    for (std::size_t i = 0; i < roles.size(); ++i)
        if (roles[i] == role) return static_cast<int>(i);
    return -1;
}

std::vector<std::string> scenario_roles(const std::vector<Building>& buildings) {
    std::vector<std::string> roles{"spot", "co2_el", "temperature", "irradiance"};
    for (const auto& b : buildings) {
        roles.push_back("load:" + b.id + ":electric");
        roles.push_back("load:" + b.id + ":space_heat");
        roles.push_back("load:" + b.id + ":dhw");
    }
    return roles;
}

namespace {
const std::vector<double>& role_series(const ScenarioYear& s, std::size_t role_idx) {
    switch (role_idx) {
        case 0: return s.spot;
        case 1: return s.co2_el;
        case 2: return s.temperature;
        case 3: return s.irradiance;
        default: {
            std::size_t li = role_idx - 4;
            const BuildingLoads& bl = s.loads[li / 3];
            switch (li % 3) {
                case 0: return bl.electric;
                case 1: return bl.space_heat;
                default: return bl.dhw;
            }
        }
    }
}
}  // namespace

std::vector<std::vector<double>> cluster_features(const ScenarioYear& scenario,
                                                  const std::vector<Building>& buildings,
                                                  int start_day) {
    std::vector<std::string> roles = scenario_roles(buildings);
    int ndays = kDaysPerYear - start_day;
    if (ndays <= 0) return {};
    std::size_t nroles = roles.size();
    // Per-role z-normalization over the clustered range.
    std::vector<double> mean(nroles, 0.0), stdev(nroles, 0.0);
    for (std::size_t r = 0; r < nroles; ++r) {
        const auto& v = role_series(scenario, r);
        double s = 0.0;
        int n = ndays * kHoursPerDay;
        for (int t = start_day * kHoursPerDay; t < kHoursPerYear; ++t) s += v[t];
        mean[r] = s / n;
        double ss = 0.0;
        for (int t = start_day * kHoursPerDay; t < kHoursPerYear; ++t) {
            double d = v[t] - mean[r];
            ss += d * d;
        }
        stdev[r] = std::sqrt(ss / n);
        if (stdev[r] < 1e-12) stdev[r] = 1.0;  // constant role: raw offsets
    }
    std::vector<std::vector<double>> feats(ndays,
                                           std::vector<double>(nroles * kHoursPerDay, 0.0));
    for (int d = 0; d < ndays; ++d)
        for (std::size_t r = 0; r < nroles; ++r) {
            const auto& v = role_series(scenario, r);
            for (int h = 0; h < kHoursPerDay; ++h)
                feats[d][r * kHoursPerDay + h] =
                    (v[(start_day + d) * kHoursPerDay + h] - mean[r]) / stdev[r];
        }
    return feats;
}

KmeansResult kmeans(const std::vector<std::vector<double>>& points, int k, std::uint64_t seed,
                    int restarts) {
    int n = static_cast<int>(points.size());
    if (k <= 0) fail("kmeans: k must be positive");
    if (k > n) fail("kmeans: k exceeds the number of points");
    std::size_t dim = points[0].size();
    KmeansResult best;
    best.wcss = std::numeric_limits<double>::infinity();

    for (int restart = 0; restart < restarts; ++restart) {
        std::mt19937_64 rng(seed * 1000003ULL + static_cast<std::uint64_t>(restart));
        // k-means++ seeding
        std::vector<std::vector<double>> centroids;
        std::vector<double> d2(n, std::numeric_limits<double>::infinity());
        centroids.push_back(points[rng() % n]);
        while (static_cast<int>(centroids.size()) < k) {
            double total = 0.0;
            for (int i = 0; i < n; ++i) {
                d2[i] = std::min(d2[i], sqdist(points[i], centroids.back()));
                total += d2[i];
            }
            double target = total * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
            int pick = n - 1;
            double acc = 0.0;
            for (int i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc >= target) {
                    pick = i;
                    break;
                }
            }
            centroids.push_back(points[pick]);
        }

        std::vector<int> assign(n, -1);
        for (int iter = 0; iter < 200; ++iter) {
            bool moved = false;
            for (int i = 0; i < n; ++i) {
                int bestc = 0;
                double bestd = sqdist(points[i], centroids[0]);
                for (int c = 1; c < k; ++c) {
                    double d = sqdist(points[i], centroids[c]);
                    if (d < bestd - 1e-15) {
                        bestd = d;
                        bestc = c;
                    }
                }
                if (assign[i] != bestc) {
                    assign[i] = bestc;
                    moved = true;
                }
            }
            // Rebuild centroids; repopulate empty clusters with the farthest point.
            std::vector<int> count(k, 0);
            std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
            for (int i = 0; i < n; ++i) {
                ++count[assign[i]];
                for (std::size_t f = 0; f < dim; ++f) sums[assign[i]][f] += points[i][f];
            }
            for (int c = 0; c < k; ++c) {
                if (count[c] == 0) {
                    int far = 0;
                    double fard = -1.0;
                    for (int i = 0; i < n; ++i) {
                        if (count[assign[i]] <= 1) continue;
                        double d = sqdist(points[i], centroids[assign[i]]);
                        if (d > fard) {
                            fard = d;
                            far = i;
                        }
                    }
                    --count[assign[far]];
                    for (std::size_t f = 0; f < dim; ++f) sums[assign[far]][f] -= points[far][f];
                    assign[far] = c;
                    count[c] = 1;
                    for (std::size_t f = 0; f < dim; ++f) sums[c][f] = points[far][f];
                    moved = true;
                }
                for (std::size_t f = 0; f < dim; ++f) centroids[c][f] = sums[c][f] / count[c];
            }
            if (!moved) break;
        }
        double wcss = 0.0;
        for (int i = 0; i < n; ++i) wcss += sqdist(points[i], centroids[assign[i]]);
        if (wcss < best.wcss) {
            best.wcss = wcss;
            best.assignment = assign;
            best.centroids = centroids;
        }
    }
    return best;
}

namespace {
ClusterSet assemble(const ScenarioYear& scenario, const std::vector<Building>& buildings,
                    int start_day, int k, std::uint64_t seed) {
    int ndays = kDaysPerYear - start_day;
    ClusterSet cs;
    cs.year = scenario.year;
    cs.start_day = start_day;
    cs.roles = scenario_roles(buildings);
    if (ndays <= 0) return cs;  // empty remainder
    k = std::min(k, ndays);
    if (k <= 0) fail("cluster_days: k must be positive");

    auto feats = cluster_features(scenario, buildings, start_day);
    KmeansResult km = kmeans(feats, k, seed);

    cs.k = k;
    cs.day_assignment = km.assignment;
    cs.sigma.assign(k, 0);
    for (int a : km.assignment) ++cs.sigma[a];
    // De-normalized centroids: per-role mean over member days of raw values.
    std::size_t nroles = cs.roles.size();
    cs.centroids.assign(k, std::vector<std::vector<double>>(
                               nroles, std::vector<double>(kHoursPerDay, 0.0)));
    for (int d = 0; d < ndays; ++d) {
        int c = km.assignment[d];
        for (std::size_t r = 0; r < nroles; ++r) {
            const auto& v = role_series(scenario, r);
            for (int h = 0; h < kHoursPerDay; ++h)
                cs.centroids[c][r][h] += v[(start_day + d) * kHoursPerDay + h];
        }
    }
    for (int c = 0; c < k; ++c)
        for (std::size_t r = 0; r < nroles; ++r)
            for (int h = 0; h < kHoursPerDay; ++h) cs.centroids[c][r][h] /= cs.sigma[c];
    return cs;
}
}  // namespace

ClusterSet cluster_days(const ScenarioYear& scenario, const std::vector<Building>& buildings,
                        int k, std::uint64_t seed) {
    if (k <= 0) fail("cluster_days: k must be positive");
    if (k > kDaysPerYear) fail("cluster_days: k exceeds the number of days");
    return assemble(scenario, buildings, 0, k, seed);
}

ClusterSet recluster_remainder(const ScenarioYear& reference,
                               const std::vector<Building>& buildings, int start_day, int k,
                               std::uint64_t seed) {
    if (start_day < 0) fail("recluster_remainder: negative start_day");
    return assemble(reference, buildings, start_day, k, seed);
}

void save_cluster_set(const ClusterSet& cs, const std::string& path) {
    json j;
    j["k"] = cs.k;
    j["year"] = cs.year;
    j["start_day"] = cs.start_day;
    j["roles"] = cs.roles;
    j["sigma"] = cs.sigma;
    j["day_assignment"] = cs.day_assignment;
    j["centroids"] = cs.centroids;
    std::ofstream out(path);
    if (!out) fail("cannot write '" + path + "'");
    out << j.dump() << "\n";
}

ClusterSet load_cluster_set(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        fail(path + ": invalid JSON: " + e.what());
    }
    ClusterSet cs;
    cs.k = j.at("k").get<int>();
    cs.year = j.at("year").get<int>();
    cs.start_day = j.at("start_day").get<int>();
    cs.roles = j.at("roles").get<std::vector<std::string>>();
    cs.sigma = j.at("sigma").get<std::vector<int>>();
    cs.day_assignment = j.at("day_assignment").get<std::vector<int>>();
    cs.centroids = j.at("centroids").get<std::vector<std::vector<std::vector<double>>>>();
    return cs;
}

}  // namespace zenopt
