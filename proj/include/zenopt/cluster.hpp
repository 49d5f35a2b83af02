#ifndef ZENOPT_CLUSTER_HPP
#define ZENOPT_CLUSTER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "zenopt/ingest.hpp"

namespace zenopt {

// Representative days with occurrence weights. Roles are ordered: spot,
// co2_el, temperature, irradiance, then per building electric/space_heat/dhw.
struct ClusterSet {
    int k = 0;
    int year = 0;
    int start_day = 0;  // first clustered day (remainder clustering)
    std::vector<std::string> roles;
    // centroids[cluster][role][hour 0..23], de-normalized units
    std::vector<std::vector<std::vector<double>>> centroids;
    std::vector<int> sigma;           // occurrences per cluster
    std::vector<int> day_assignment;  // day (start_day-based) -> cluster

    int days() const { return static_cast<int>(day_assignment.size()); }
    bool empty() const { return k == 0; }
    int role_index(const std::string& role) const;
    double value(int role, int cluster, int hour) const {
        return centroids[cluster][role][hour];
    }
};

std::vector<std::string> scenario_roles(const std::vector<Building>& buildings);

// Day-profile feature matrix (z-normalized per role) for days >= start_day.
std::vector<std::vector<double>> cluster_features(const ScenarioYear& scenario,
                                                  const std::vector<Building>& buildings,
                                                  int start_day = 0);

struct KmeansResult {
    std::vector<int> assignment;
    std::vector<std::vector<double>> centroids;
    double wcss = 0.0;
};

// Seeded k-means (k-means++ init, Lloyd iterations, `restarts` independent
// starts, best WCSS wins). Deterministic for a fixed seed.
KmeansResult kmeans(const std::vector<std::vector<double>>& points, int k, std::uint64_t seed,
                    int restarts = 10);

ClusterSet cluster_days(const ScenarioYear& scenario, const std::vector<Building>& buildings,
                        int k, std::uint64_t seed);

// Clusters only days >= start_day; k is clamped to the number of remaining
// days; an empty remainder yields an empty ClusterSet.
ClusterSet recluster_remainder(const ScenarioYear& reference,
                               const std::vector<Building>& buildings, int start_day, int k,
                               std::uint64_t seed);

void save_cluster_set(const ClusterSet& cs, const std::string& path);
ClusterSet load_cluster_set(const std::string& path);

}  // namespace zenopt

#endif
