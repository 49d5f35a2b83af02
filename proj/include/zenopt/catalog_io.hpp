#ifndef ZENOPT_CATALOG_IO_HPP
#define ZENOPT_CATALOG_IO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "zenopt/domain.hpp"

namespace zenopt {

// Static site description: buildings, heating-grid topology, economics.
struct Site {
    std::vector<Building> buildings;
    HeatingGridTopology topology;
    EconomicParams economics;
};

Catalog load_catalog(const std::string& path);
void save_catalog(const Catalog& catalog, const std::string& path);
Catalog parse_catalog(std::istream& in);
void write_catalog(const Catalog& catalog, std::ostream& out);

Site load_site(const std::string& path);
void save_site(const Site& site, const std::string& path);
Site parse_site(std::istream& in);
void write_site(const Site& site, std::ostream& out);

}  // namespace zenopt

#endif
