#include "zenopt/dispatch.hpp"

#include <fstream>
#include <numeric>
#include <stdexcept>

namespace zenopt::model {

double DispatchRecord::total_cost() const {
    double s = 0.0;
    for (const auto& h : hours) s += h.weight * h.cost;
    return s;
}

DispatchRecord extract_dispatch(const ModelInstance& mi, const lp::SolveResult& r) {
    DispatchRecord rec;
    rec.tech_units = mi.tech_units;
    rec.stor_units = mi.stor_units;
    for (const auto& u : mi.tech_units)
        rec.tech_names.push_back(mi.catalog->technologies[u.tech].id);
    for (const auto& u : mi.stor_units) rec.stor_names.push_back(mi.catalog->storages[u.storage].id);
    for (const auto& b : mi.site->buildings) rec.building_names.push_back(b.id);

    const EconomicParams& econ = mi.site->economics;
    int nt = static_cast<int>(mi.tech_units.size());
    int ns = static_cast<int>(mi.stor_units.size());
    int nb = static_cast<int>(mi.site->buildings.size());
    auto val = [&](int col) { return col >= 0 ? r.x[col] : 0.0; };

    for (std::size_t s = 0; s < mi.segments.size(); ++s) {
        const Segment& seg = mi.segments[s];
        for (std::size_t h = 0; h < seg.hours.size(); ++h) {
            const HourVars& hv = mi.vars[s].hours[h];
            const HourData& hd = seg.hours[h];
            DispatchHour out;
            out.weight = seg.weight;
            out.cluster = seg.cluster_index;
            if (seg.cluster_index >= 0)
                out.cluster_hour = static_cast<int>(h);
            else if (seg.start_hour >= 0)
                out.hour_index = seg.start_hour + static_cast<int>(h);
            out.spot = hd.spot;
            out.co2_el = hd.co2_el;
            out.import_kwh = val(hv.y_imp);
            out.export_kwh = val(hv.y_exp);
            out.heat_sh.resize(nt);
            out.heat_dhw.resize(nt);
            out.fuel.resize(nt);
            out.elec_in.resize(nt);
            out.gen.resize(nt);
            out.gen_export.resize(nt);
            out.gen_self.resize(nt);
            out.gen_charge.resize(nt);
            out.gen_dump.resize(nt);
            out.curtail.resize(nt);
            out.onoff.resize(nt);
            for (int u = 0; u < nt; ++u) {
                out.heat_sh[u] = val(hv.heat_sh[u]);
                out.heat_dhw[u] = val(hv.heat_dhw[u]);
                out.fuel[u] = val(hv.fuel[u]);
                out.elec_in[u] = val(hv.elec_sh[u]) + val(hv.elec_dhw[u]);
                out.gen[u] = val(hv.gen[u]);
                out.gen_export[u] = val(hv.gen_export[u]);
                out.gen_self[u] = val(hv.gen_self[u]);
                out.gen_charge[u] = val(hv.gen_charge[u]);
                out.gen_dump[u] = val(hv.gen_dump[u]);
                out.curtail[u] = val(hv.curtail[u]);
                out.onoff[u] = hv.onoff[u] >= 0 ? r.x[hv.onoff[u]] : -1.0;
            }
            out.stor_charge.resize(ns);
            out.stor_discharge.resize(ns);
            out.stor_level.resize(ns);
            out.stor_grid_import.resize(ns);
            out.stor_export.resize(ns);
            out.stor_charge_sh.resize(ns);
            out.stor_charge_dhw.resize(ns);
            out.stor_discharge_sh.resize(ns);
            out.stor_discharge_dhw.resize(ns);
            for (int u = 0; u < ns; ++u) {
                out.stor_charge_sh[u] = val(hv.stor_ch_sh[u]);
                out.stor_charge_dhw[u] = val(hv.stor_ch_dhw[u]);
                out.stor_discharge_sh[u] = val(hv.stor_dch_sh[u]);
                out.stor_discharge_dhw[u] = val(hv.stor_dch_dhw[u]);
                out.stor_charge[u] = val(hv.stor_ch[u]) + val(hv.stor_ch_sh[u]) +
                                     val(hv.stor_ch_dhw[u]) + val(hv.stor_charge_gen[u]) +
                                     val(hv.stor_grid_imp[u]);
                out.stor_discharge[u] = val(hv.stor_dch[u]) + val(hv.stor_dch_sh[u]) +
                                        val(hv.stor_dch_dhw[u]) + val(hv.stor_dch_self[u]) +
                                        val(hv.stor_export[u]);
                out.stor_level[u] = val(hv.stor_level[u]);
                out.stor_grid_import[u] = val(hv.stor_grid_imp[u]);
                out.stor_export[u] = val(hv.stor_export[u]);
            }
            out.heat_dump.resize(nb);
            out.hg_used_sh.resize(nb);
            out.hg_used_dhw.resize(nb);
            for (int b = 0; b < nb; ++b) {
                out.heat_dump[b] = val(hv.heat_dump[b]);
                out.hg_used_sh[b] = val(hv.hg_used_sh[b]);
                out.hg_used_dhw[b] = val(hv.hg_used_dhw[b]);
            }

            double cost = (hd.spot + econ.grid_tariff + econ.retail_tariff) *
                              (out.import_kwh +
                               std::accumulate(out.stor_grid_import.begin(),
                                               out.stor_grid_import.end(), 0.0)) -
                          hd.spot * out.export_kwh;
            for (int u = 0; u < nt; ++u) {
                if (out.fuel[u] <= 0.0) continue;
                const TechnologySpec& t = mi.catalog->technologies[mi.tech_units[u].tech];
                const FuelSpec* f = mi.catalog->find_fuel(t.fuel_id);
                double price = f->price_hourly
                                   ? hd.spot + econ.grid_tariff + econ.retail_tariff
                                   : f->price;
                cost += price * out.fuel[u];
            }
            out.cost = cost;
            rec.hours.push_back(std::move(out));
        }
    }
    return rec;
}

void append_hours(DispatchRecord& dst, const DispatchRecord& src, int from_hour, int count) {
    if (dst.tech_names.empty()) {
        dst.tech_units = src.tech_units;
        dst.stor_units = src.stor_units;
        dst.tech_names = src.tech_names;
        dst.stor_names = src.stor_names;
        dst.building_names = src.building_names;
    }
    for (int i = 0; i < count; ++i) {
        std::size_t idx = static_cast<std::size_t>(from_hour + i);
        if (idx >= src.hours.size()) break;
        dst.hours.push_back(src.hours[idx]);
    }
}

void write_dispatch_csv(const DispatchRecord& rec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "hour,cluster,cluster_hour,weight,spot_eur_kwh,co2_g_kwh,import_kwh,export_kwh,cost_eur";
    auto unit_name = [&](std::size_t u) {
        return rec.tech_names[u] + "@" + rec.building_names[rec.tech_units[u].building];
    };
    auto stor_name = [&](std::size_t u) {
        return rec.stor_names[u] + "@" + rec.building_names[rec.stor_units[u].building];
    };
    for (std::size_t u = 0; u < rec.tech_units.size(); ++u) {
        std::string n = unit_name(u);
        out << "," << n << ":heat_sh," << n << ":heat_dhw," << n << ":fuel," << n << ":elec_in,"
            << n << ":gen," << n << ":gen_export," << n << ":gen_dump," << n << ":curtail";
    }
    for (std::size_t u = 0; u < rec.stor_units.size(); ++u) {
        std::string n = stor_name(u);
        out << "," << n << ":charge," << n << ":discharge," << n << ":level," << n
            << ":grid_import," << n << ":export";
    }
    out << ",heat_dump_kwh\n";
    for (const auto& h : rec.hours) {
        out << h.hour_index << "," << h.cluster << "," << h.cluster_hour << "," << h.weight
            << "," << h.spot << "," << h.co2_el << "," << h.import_kwh << "," << h.export_kwh
            << "," << h.cost;
        for (std::size_t u = 0; u < rec.tech_units.size(); ++u)
            out << "," << h.heat_sh[u] << "," << h.heat_dhw[u] << "," << h.fuel[u] << ","
                << h.elec_in[u] << "," << h.gen[u] << "," << h.gen_export[u] << ","
                << h.gen_dump[u] << "," << h.curtail[u];
        for (std::size_t u = 0; u < rec.stor_units.size(); ++u)
            out << "," << h.stor_charge[u] << "," << h.stor_discharge[u] << ","
                << h.stor_level[u] << "," << h.stor_grid_import[u] << "," << h.stor_export[u];
        double dump = 0.0;
        for (double d : h.heat_dump) dump += d;
        out << "," << dump << "\n";
    }
}

}  // namespace zenopt::model
