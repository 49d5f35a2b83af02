#include "zenopt/model_build.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace zenopt::model {

using lp::kInf;
using lp::RowFamily;
using lp::RowMeta;
using lp::VarMeta;
using lp::VarRole;

namespace {
[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

VarMeta vmeta(VarRole role, int tech, int storage, int building, int seg, int hour) {
    VarMeta m;
    m.role = role;
    m.tech = static_cast<std::int16_t>(tech);
    m.storage = static_cast<std::int16_t>(storage);
    m.building = static_cast<std::int16_t>(building);
    m.cluster = seg;
    m.time = hour;
    return m;
}

RowMeta rmeta(RowFamily fam, int tech, int storage, int building, int seg, int hour) {
    RowMeta m;
    m.family = fam;
    m.tech = static_cast<std::int16_t>(tech);
    m.storage = static_cast<std::int16_t>(storage);
    m.building = static_cast<std::int16_t>(building);
    m.cluster = seg;
    m.time = hour;
    return m;
}
}  // namespace

std::vector<TechUnit> tech_units_for(const Catalog& catalog, const Site& site) {
    std::vector<TechUnit> units;
    for (std::size_t b = 0; b < site.buildings.size(); ++b) {
        bool is_plant = site.buildings[b].id == site.topology.plant_id;
        for (const std::string& id : site.buildings[b].allowed_techs) {
            int ti = catalog.tech_index(id);
            if (ti < 0)
                fail("building '" + site.buildings[b].id + "' allows unknown technology '" + id +
                     "'");
            const TechnologySpec& t = catalog.technologies[ti];
            if ((t.scope == TechScope::Neighborhood) != is_plant)
                fail("technology '" + id + "' scope does not match node '" +
                     site.buildings[b].id + "'");
            units.push_back({ti, static_cast<int>(b)});
        }
    }
    return units;
}

std::vector<StorUnit> stor_units_for(const Catalog& catalog, const Site& site) {
    std::vector<StorUnit> units;
    for (std::size_t b = 0; b < site.buildings.size(); ++b) {
        for (const std::string& id : site.buildings[b].allowed_storages) {
            int si = catalog.storage_index(id);
            if (si < 0)
                fail("building '" + site.buildings[b].id + "' allows unknown storage '" + id +
                     "'");
            units.push_back({si, static_cast<int>(b)});
        }
    }
    return units;
}

Segment segment_from_scenario(const ScenarioYear& scenario, int t0, int t1) {
    Segment seg;
    seg.start_hour = t0;
    append_scenario_hours(seg, scenario, t0, t1);
    return seg;
}

void append_scenario_hours(Segment& seg, const ScenarioYear& scenario, int t0, int t1) {
    if (t0 < 0 || t1 > kHoursPerYear || t0 > t1) fail("segment hour range out of bounds");
    for (int t = t0; t < t1; ++t) {
        HourData h;
        h.spot = scenario.spot[t];
        h.co2_el = scenario.co2_el[t];
        h.temperature = scenario.temperature[t];
        h.irradiance = scenario.irradiance[t];
        h.load_e.reserve(scenario.loads.size());
        for (const auto& L : scenario.loads) {
            h.load_e.push_back(L.electric[t]);
            h.load_sh.push_back(L.space_heat[t]);
            h.load_dhw.push_back(L.dhw[t]);
        }
        seg.hours.push_back(std::move(h));
    }
}

std::vector<Segment> segments_from_clusters(const ClusterSet& clusters) {
    std::vector<Segment> segs;
    if (clusters.empty()) return segs;
    int nroles = static_cast<int>(clusters.roles.size());
    int nbuildings = (nroles - 4) / 3;
    for (int c = 0; c < clusters.k; ++c) {
        Segment seg;
        seg.cyclic = true;
        seg.weight = clusters.sigma[c];
        seg.cluster_index = c;
        for (int h = 0; h < kHoursPerDay; ++h) {
            HourData hd;
            hd.spot = clusters.value(0, c, h);
            hd.co2_el = clusters.value(1, c, h);
            hd.temperature = clusters.value(2, c, h);
            hd.irradiance = std::max(0.0, clusters.value(3, c, h));
            for (int b = 0; b < nbuildings; ++b) {
                hd.load_e.push_back(std::max(0.0, clusters.value(4 + 3 * b, c, h)));
                hd.load_sh.push_back(std::max(0.0, clusters.value(5 + 3 * b, c, h)));
                hd.load_dhw.push_back(std::max(0.0, clusters.value(6 + 3 * b, c, h)));
            }
            seg.hours.push_back(std::move(hd));
        }
        segs.push_back(std::move(seg));
    }
    return segs;
}

namespace {

class Builder {
  public:
    Builder(ModelInstance& mi, bool invest, const InvestOptions& iopts,
            const std::vector<double>& initial_storage)
        : mi_(mi), cat_(*mi.catalog), site_(*mi.site), invest_(invest), iopts_(iopts),
          init_storage_(initial_storage) {
        plant_ = -1;
        for (std::size_t b = 0; b < site_.buildings.size(); ++b)
            if (site_.buildings[b].id == site_.topology.plant_id) plant_ = static_cast<int>(b);
        pipes_in_.resize(site_.buildings.size());
        pipes_out_.resize(site_.buildings.size());
        for (std::size_t p = 0; p < site_.topology.pipes.size(); ++p) {
            int from = building_index(site_.topology.pipes[p].from);
            int to = building_index(site_.topology.pipes[p].to);
            pipes_out_[from].push_back(static_cast<int>(p));
            pipes_in_[to].push_back(static_cast<int>(p));
        }
        hg_active_ = invest_ ? !site_.topology.pipes.empty()
                             : (mi_.design.hg_built && !site_.topology.pipes.empty());
        annuity_ = annuity_factor(site_.economics.discount_rate, site_.economics.study_years);
    }

    void build() {
        if (invest_) add_investment_columns();
        mi_.vars.resize(mi_.segments.size());
        for (std::size_t s = 0; s < mi_.segments.size(); ++s) {
            mi_.vars[s].hours.resize(mi_.segments[s].hours.size());
            for (std::size_t h = 0; h < mi_.segments[s].hours.size(); ++h)
                hour_block(static_cast<int>(s), static_cast<int>(h));
            storage_links(static_cast<int>(s));
        }
        if (invest_ && iopts_.include_zeb) zeb_row();
        if (invest_ && iopts_.pvlim) roof_rows();
    }

  private:
    ModelInstance& mi_;
    const Catalog& cat_;
    const Site& site_;
    bool invest_;
    InvestOptions iopts_;
    std::vector<double> init_storage_;
    int plant_ = -1;
    std::vector<std::vector<int>> pipes_in_, pipes_out_;
    bool hg_active_ = false;
    double annuity_ = 1.0;

    int building_index(const std::string& id) const {
        for (std::size_t b = 0; b < site_.buildings.size(); ++b)
            if (site_.buildings[b].id == id) return static_cast<int>(b);
        fail("unknown building '" + id + "'");
    }

    const TechnologySpec& tech(int u) const {
        return cat_.technologies[mi_.tech_units[u].tech];
    }
    const StorageSpec& stor(int u) const { return cat_.storages[mi_.stor_units[u].storage]; }

    double tech_cap(int u) const { return mi_.design.tech_capacity[u]; }
    double stor_cap(int u) const { return mi_.design.stor_capacity[u]; }

    // Objective helper: operation costs are annualized with the annuity
    // factor in the investment model and raw in operation models.
    double op_cost_scale(double weight) const { return invest_ ? annuity_ * weight : weight; }

    void add_investment_columns() {
        const EconomicParams& econ = site_.economics;
        mi_.x_tech.resize(mi_.tech_units.size());
        mi_.b_tech.resize(mi_.tech_units.size());
        mi_.x_stor.resize(mi_.stor_units.size());
        mi_.b_stor.resize(mi_.stor_units.size());
        if (hg_active_)
            mi_.b_hg = mi_.lp.add_binary(site_.topology.hg_cost,
                                         vmeta(VarRole::HgBinary, -1, -1, -1, -1, -1));
        for (std::size_t u = 0; u < mi_.tech_units.size(); ++u) {
            const TechnologySpec& t = cat_.technologies[mi_.tech_units[u].tech];
            DiscountedCost dc = discounted_investment_cost(t, econ);
            double xc = dc.var_disc + annuity_ * t.om_frac * t.cost_var;
            int x = mi_.lp.add_column(0.0, t.x_max, xc,
                                      vmeta(VarRole::Invest, mi_.tech_units[u].tech, -1,
                                            mi_.tech_units[u].building, -1, -1));
            int b = mi_.lp.add_binary(dc.fix_disc,
                                      vmeta(VarRole::InvestBinary, mi_.tech_units[u].tech, -1,
                                            mi_.tech_units[u].building, -1, -1));
            mi_.x_tech[u] = x;
            mi_.b_tech[u] = b;
            // x <= Xmax b ; x >= Xmin b
            int r1 = mi_.lp.add_row(-kInf, 0.0,
                                    rmeta(RowFamily::InvestBound, mi_.tech_units[u].tech, -1,
                                          mi_.tech_units[u].building, -1, -1));
            mi_.lp.add_term(r1, x, 1.0);
            mi_.lp.add_term(r1, b, -t.x_max);
            int r2 = mi_.lp.add_row(-kInf, 0.0,
                                    rmeta(RowFamily::InvestBound, mi_.tech_units[u].tech, -1,
                                          mi_.tech_units[u].building, -1, -1));
            mi_.lp.add_term(r2, x, -1.0);
            mi_.lp.add_term(r2, b, t.x_min);
            // neighborhood units are gated on the heating-grid binary
            if (mi_.tech_units[u].building == plant_ && hg_active_) {
                int rg = mi_.lp.add_row(-kInf, 0.0,
                                        rmeta(RowFamily::HgInvestGate, mi_.tech_units[u].tech,
                                              -1, plant_, -1, -1));
                mi_.lp.add_term(rg, x, 1.0);
                mi_.lp.add_term(rg, mi_.b_hg, -t.x_max);
            }
        }
        for (std::size_t u = 0; u < mi_.stor_units.size(); ++u) {
            const StorageSpec& st = cat_.storages[mi_.stor_units[u].storage];
            double xc = discounted_storage_cost(st, econ) +
                        annuity_ * st.om_frac * st.cost_per_kwh;
            int x = mi_.lp.add_column(0.0, st.cap_max, xc,
                                      vmeta(VarRole::Invest, -1, mi_.stor_units[u].storage,
                                            mi_.stor_units[u].building, -1, -1));
            int b = mi_.lp.add_binary(0.0, vmeta(VarRole::InvestBinary, -1,
                                                 mi_.stor_units[u].storage,
                                                 mi_.stor_units[u].building, -1, -1));
            mi_.x_stor[u] = x;
            mi_.b_stor[u] = b;
            int r1 = mi_.lp.add_row(-kInf, 0.0,
                                    rmeta(RowFamily::InvestBound, -1, mi_.stor_units[u].storage,
                                          mi_.stor_units[u].building, -1, -1));
            mi_.lp.add_term(r1, x, 1.0);
            mi_.lp.add_term(r1, b, -st.cap_max);
            int r2 = mi_.lp.add_row(-kInf, 0.0,
                                    rmeta(RowFamily::InvestBound, -1, mi_.stor_units[u].storage,
                                          mi_.stor_units[u].building, -1, -1));
            mi_.lp.add_term(r2, x, -1.0);
            mi_.lp.add_term(r2, b, st.cap_min);
            if (mi_.stor_units[u].building == plant_ && hg_active_) {
                int rg = mi_.lp.add_row(-kInf, 0.0,
                                        rmeta(RowFamily::HgInvestGate, -1,
                                              mi_.stor_units[u].storage, plant_, -1, -1));
                mi_.lp.add_term(rg, x, 1.0);
                mi_.lp.add_term(rg, mi_.b_hg, -st.cap_max);
            }
        }
    }

    // Production upper bound: q_tot <= x (plus part-load when alpha > 0).
    void capacity_rows(int s, int h, int u, const std::vector<int>& qcols) {
        const TechnologySpec& t = tech(u);
        if (t.alpha_partload > 0.0 && t.kind != TechKind::HeatPump) {
            HourVars& hv = mi_.vars[s].hours[h];
            int o = mi_.lp.add_binary(0.0, vmeta(VarRole::OnOff, mi_.tech_units[u].tech, -1,
                                                 mi_.tech_units[u].building, s, h));
            hv.onoff[u] = o;
            if (invest_) {
                int xbar = mi_.lp.add_column(0.0, t.x_max, 0.0,
                                             vmeta(VarRole::ProdCap, mi_.tech_units[u].tech, -1,
                                                   mi_.tech_units[u].building, s, h));
                hv.prodcap[u] = xbar;
                auto pl = [&](double lo, double hi) {
                    return mi_.lp.add_row(lo, hi,
                                          rmeta(RowFamily::PartLoad, mi_.tech_units[u].tech, -1,
                                                mi_.tech_units[u].building, s, h));
                };
                int r1 = pl(-kInf, 0.0);  // xbar <= Xmax o
                mi_.lp.add_term(r1, xbar, 1.0);
                mi_.lp.add_term(r1, o, -t.x_max);
                int r2 = pl(-kInf, 0.0);  // xbar <= x
                mi_.lp.add_term(r2, xbar, 1.0);
                mi_.lp.add_term(r2, mi_.x_tech[u], -1.0);
                int r3 = pl(-t.x_max, kInf);  // xbar >= x - Xmax (1 - o)
                mi_.lp.add_term(r3, xbar, 1.0);
                mi_.lp.add_term(r3, mi_.x_tech[u], -1.0);
                mi_.lp.add_term(r3, o, -t.x_max);
                int r4 = pl(-kInf, 0.0);  // q <= xbar
                for (int q : qcols) mi_.lp.add_term(r4, q, 1.0);
                mi_.lp.add_term(r4, xbar, -1.0);
                int r5 = pl(0.0, kInf);  // q >= alpha xbar
                for (int q : qcols) mi_.lp.add_term(r5, q, 1.0);
                mi_.lp.add_term(r5, xbar, -t.alpha_partload);
            } else {
                double cap = tech_cap(u);
                int r1 = mi_.lp.add_row(-kInf, 0.0,
                                        rmeta(RowFamily::PartLoad, mi_.tech_units[u].tech, -1,
                                              mi_.tech_units[u].building, s, h));
                for (int q : qcols) mi_.lp.add_term(r1, q, 1.0);
                mi_.lp.add_term(r1, o, -cap);
                int r2 = mi_.lp.add_row(0.0, kInf,
                                        rmeta(RowFamily::PartLoad, mi_.tech_units[u].tech, -1,
                                              mi_.tech_units[u].building, s, h));
                for (int q : qcols) mi_.lp.add_term(r2, q, 1.0);
                mi_.lp.add_term(r2, o, -t.alpha_partload * cap);
            }
        } else {
            // plain capacity limit
            RowMeta meta = rmeta(RowFamily::PartLoad, mi_.tech_units[u].tech, -1,
                                 mi_.tech_units[u].building, s, h);
            if (invest_) {
                int r = mi_.lp.add_row(-kInf, 0.0, meta);
                for (int q : qcols) mi_.lp.add_term(r, q, 1.0);
                mi_.lp.add_term(r, mi_.x_tech[u], -1.0);
            } else {
                int r = mi_.lp.add_row(-kInf, tech_cap(u), meta);
                for (int q : qcols) mi_.lp.add_term(r, q, 1.0);
            }
        }
    }

    void hour_block(int s, int h) {
        Segment& seg = mi_.segments[s];
        HourData& hd = seg.hours[h];
        HourVars& hv = mi_.vars[s].hours[h];
        const EconomicParams& econ = site_.economics;
        double w = seg.weight;
        double cs = op_cost_scale(w);
        int nb = static_cast<int>(site_.buildings.size());
        int nt = static_cast<int>(mi_.tech_units.size());
        int ns = static_cast<int>(mi_.stor_units.size());

        hv.heat_sh.assign(nt, -1);
        hv.heat_dhw.assign(nt, -1);
        hv.fuel.assign(nt, -1);
        hv.elec_sh.assign(nt, -1);
        hv.elec_dhw.assign(nt, -1);
        hv.gen.assign(nt, -1);
        hv.gen_self.assign(nt, -1);
        hv.gen_charge.assign(nt, -1);
        hv.gen_dump.assign(nt, -1);
        hv.gen_export.assign(nt, -1);
        hv.curtail.assign(nt, -1);
        hv.onoff.assign(nt, -1);
        hv.prodcap.assign(nt, -1);
        hv.stor_ch_sh.assign(ns, -1);
        hv.stor_ch_dhw.assign(ns, -1);
        hv.stor_dch_sh.assign(ns, -1);
        hv.stor_dch_dhw.assign(ns, -1);
        hv.stor_ch.assign(ns, -1);
        hv.stor_dch.assign(ns, -1);
        hv.stor_grid_imp.assign(ns, -1);
        hv.stor_export.assign(ns, -1);
        hv.stor_charge_gen.assign(ns, -1);
        hv.stor_dch_self.assign(ns, -1);
        hv.stor_level.assign(ns, -1);
        hv.heat_dump.assign(nb, -1);
        hv.hg_used.assign(nb, -1);
        hv.hg_used_sh.assign(nb, -1);
        hv.hg_used_dhw.assign(nb, -1);
        hv.hg_trans.assign(site_.topology.pipes.size(), -1);

        double import_price = hd.spot + econ.grid_tariff + econ.retail_tariff;
        hv.y_imp = mi_.lp.add_column(0.0, kInf, cs * import_price,
                                     vmeta(VarRole::Import, -1, -1, -1, s, h));
        hv.y_exp = mi_.lp.add_column(0.0, kInf, -cs * hd.spot,
                                     vmeta(VarRole::Export, -1, -1, -1, s, h));
        mi_.em_terms.emplace_back(hv.y_imp, w * hd.co2_el);

        // Battery presence per building (for generator charge routing).
        std::vector<bool> battery_at(nb, false);
        for (int u = 0; u < ns; ++u)
            if (stor(u).medium == StorageMedium::Electric &&
                (invest_ || stor_cap(u) > 0))
                battery_at[mi_.stor_units[u].building] = true;

        // ---- technology variables ----
        for (int u = 0; u < nt; ++u) {
            const TechnologySpec& t = tech(u);
            int b = mi_.tech_units[u].building;
            if (!invest_ && tech_cap(u) <= 0.0) continue;
            bool at_plant = b == plant_;
            if (at_plant && !hg_active_) continue;

            auto col = [&](VarRole role, double cost = 0.0) {
                return mi_.lp.add_column(0.0, kInf, cost,
                                         vmeta(role, mi_.tech_units[u].tech, -1, b, s, h));
            };

            std::vector<int> qcols;
            if (t.produces_heat) {
                hv.heat_sh[u] = col(VarRole::HeatSh);
                qcols.push_back(hv.heat_sh[u]);
                if (t.can_serve_dhw) {
                    hv.heat_dhw[u] = col(VarRole::HeatDhw);
                    qcols.push_back(hv.heat_dhw[u]);
                }
            }

            if (t.kind == TechKind::HeatPump) {
                const CopModel* cm = cat_.find_cop(t.id);
                double cop_sh = cm->sh.cop.at(hd.temperature);
                double pin_sh = cm->sh.input_max.at(hd.temperature);
                hv.elec_sh[u] = col(VarRole::ElecUseSh);
                int r = mi_.lp.add_row(0.0, 0.0,
                                       rmeta(RowFamily::ElecLink, mi_.tech_units[u].tech, -1, b,
                                             s, h));
                mi_.lp.add_term(r, hv.elec_sh[u], cop_sh);
                mi_.lp.add_term(r, hv.heat_sh[u], -1.0);
                int rcap = mi_.lp.add_row(-kInf, invest_ ? 0.0 : tech_cap(u),
                                          rmeta(RowFamily::HeatPumpCap, mi_.tech_units[u].tech,
                                                -1, b, s, h));
                mi_.lp.add_term(rcap, hv.elec_sh[u], 1.0 / pin_sh);
                if (t.can_serve_dhw) {
                    double cop_dhw = cm->dhw.cop.at(hd.temperature);
                    double pin_dhw = cm->dhw.input_max.at(hd.temperature);
                    hv.elec_dhw[u] = col(VarRole::ElecUseDhw);
                    int r2 = mi_.lp.add_row(0.0, 0.0,
                                            rmeta(RowFamily::ElecLink, mi_.tech_units[u].tech,
                                                  -1, b, s, h));
                    mi_.lp.add_term(r2, hv.elec_dhw[u], cop_dhw);
                    mi_.lp.add_term(r2, hv.heat_dhw[u], -1.0);
                    mi_.lp.add_term(rcap, hv.elec_dhw[u], 1.0 / pin_dhw);
                }
                if (invest_) mi_.lp.add_term(rcap, mi_.x_tech[u], -1.0);
            } else if (t.kind == TechKind::ElectricHeater) {
                hv.elec_sh[u] = col(VarRole::ElecUse);
                int r = mi_.lp.add_row(0.0, 0.0,
                                       rmeta(RowFamily::ElecLink, mi_.tech_units[u].tech, -1, b,
                                             s, h));
                mi_.lp.add_term(r, hv.elec_sh[u], t.eta);
                for (int q : qcols) mi_.lp.add_term(r, q, -1.0);
                capacity_rows(s, h, u, qcols);
            } else if (t.kind == TechKind::FuelBurner || t.kind == TechKind::Chp) {
                const FuelSpec* fuel = cat_.find_fuel(t.fuel_id);
                double fuel_price = fuel->price_hourly ? import_price : fuel->price;
                hv.fuel[u] = col(VarRole::Fuel, cs * fuel_price);
                double phi_f = fuel->co2_hourly ? hd.co2_el : fuel->co2_factor;
                if (phi_f > 0) mi_.em_terms.emplace_back(hv.fuel[u], w * phi_f);
                int r = mi_.lp.add_row(0.0, 0.0,
                                       rmeta(RowFamily::FuelLink, mi_.tech_units[u].tech, -1, b,
                                             s, h));
                mi_.lp.add_term(r, hv.fuel[u], t.eta);
                for (int q : qcols) mi_.lp.add_term(r, q, -1.0);
                if (t.kind == TechKind::Chp) {
                    hv.gen[u] = col(VarRole::Gen);
                    int rc = mi_.lp.add_row(0.0, 0.0,
                                            rmeta(RowFamily::ChpRatio, mi_.tech_units[u].tech,
                                                  -1, b, s, h));
                    for (int q : qcols) mi_.lp.add_term(rc, q, 1.0);
                    mi_.lp.add_term(rc, hv.gen[u], -t.alpha_chp);
                }
                capacity_rows(s, h, u, qcols);
            } else if (t.kind == TechKind::Pv) {
                hv.gen[u] = col(VarRole::Gen);
                hv.curtail[u] = col(VarRole::Curtail);
                double coef = pv_efficiency(cat_.pv_panel, hd.temperature, hd.irradiance) *
                              hd.irradiance;
                int r = mi_.lp.add_row(invest_ ? 0.0 : coef * tech_cap(u),
                                       invest_ ? 0.0 : coef * tech_cap(u),
                                       rmeta(RowFamily::SolarDef, mi_.tech_units[u].tech, -1, b,
                                             s, h));
                mi_.lp.add_term(r, hv.gen[u], 1.0);
                mi_.lp.add_term(r, hv.curtail[u], 1.0);
                if (invest_) mi_.lp.add_term(r, mi_.x_tech[u], -coef);
            } else if (t.kind == TechKind::SolarThermal) {
                // rated-capacity form: eta_ST * area_coeff / G_stc kWh per kW per (W/m2)
                double coef = t.eta * t.area_coeff / cat_.pv_panel.g_stc * hd.irradiance;
                int r = mi_.lp.add_row(invest_ ? 0.0 : coef * tech_cap(u),
                                       invest_ ? 0.0 : coef * tech_cap(u),
                                       rmeta(RowFamily::SolarDef, mi_.tech_units[u].tech, -1, b,
                                             s, h));
                for (int q : qcols) mi_.lp.add_term(r, q, 1.0);
                if (invest_) mi_.lp.add_term(r, mi_.x_tech[u], -coef);
            }

            // electricity producers split their output (Eq. 14)
            if (t.produces_electricity && hv.gen[u] >= 0) {
                hv.gen_export[u] = col(VarRole::GenExport);
                hv.gen_self[u] = col(VarRole::GenSelf);
                hv.gen_dump[u] = col(VarRole::GenDump);
                if (battery_at[b]) hv.gen_charge[u] = col(VarRole::GenCharge);
                int r = mi_.lp.add_row(0.0, 0.0,
                                       rmeta(RowFamily::GenSplit, mi_.tech_units[u].tech, -1, b,
                                             s, h));
                mi_.lp.add_term(r, hv.gen[u], 1.0);
                mi_.lp.add_term(r, hv.gen_export[u], -1.0);
                mi_.lp.add_term(r, hv.gen_self[u], -1.0);
                mi_.lp.add_term(r, hv.gen_dump[u], -1.0);
                if (hv.gen_charge[u] >= 0) mi_.lp.add_term(r, hv.gen_charge[u], -1.0);
                mi_.comp_terms.emplace_back(hv.gen_export[u], w * hd.co2_el);
            }
        }

        // ---- storage variables ----
        for (int u = 0; u < ns; ++u) {
            const StorageSpec& st = stor(u);
            int b = mi_.stor_units[u].building;
            if (!invest_ && stor_cap(u) <= 0.0) continue;
            if (b == plant_ && !hg_active_) continue;
            auto col = [&](VarRole role, double cost = 0.0) {
                return mi_.lp.add_column(0.0, kInf, cost,
                                         vmeta(role, -1, mi_.stor_units[u].storage, b, s, h));
            };
            hv.stor_level[u] = col(VarRole::StorLevel);
            if (!invest_) mi_.lp.set_bounds(hv.stor_level[u], 0.0, stor_cap(u));

            std::vector<int> chargers, dischargers;
            if (st.medium == StorageMedium::Heat) {
                if (b == plant_) {
                    hv.stor_ch[u] = col(VarRole::StorCharge);
                    hv.stor_dch[u] = col(VarRole::StorDischarge);
                    chargers = {hv.stor_ch[u]};
                    dischargers = {hv.stor_dch[u]};
                } else {
                    hv.stor_ch_sh[u] = col(VarRole::StorChargeSh);
                    hv.stor_ch_dhw[u] = col(VarRole::StorChargeDhw);
                    hv.stor_dch_sh[u] = col(VarRole::StorDischargeSh);
                    hv.stor_dch_dhw[u] = col(VarRole::StorDischargeDhw);
                    chargers = {hv.stor_ch_sh[u], hv.stor_ch_dhw[u]};
                    dischargers = {hv.stor_dch_sh[u], hv.stor_dch_dhw[u]};
                }
            } else {
                hv.stor_charge_gen[u] = col(VarRole::StorCharge);     // y^ch from on-site gen
                hv.stor_grid_imp[u] = col(VarRole::StorGridImport);   // y^imp_est
                hv.stor_dch_self[u] = col(VarRole::StorDischarge);    // y^dch to neighborhood
                hv.stor_export[u] = col(VarRole::StorExport);         // y^exp_est
                mi_.lp.add_objective(hv.stor_grid_imp[u], cs * import_price);
                mi_.em_terms.emplace_back(hv.stor_grid_imp[u], w * hd.co2_el);
                mi_.comp_terms.emplace_back(hv.stor_export[u], w * hd.co2_el * st.eta_oneway);
                chargers = {hv.stor_charge_gen[u], hv.stor_grid_imp[u]};
                dischargers = {hv.stor_dch_self[u], hv.stor_export[u]};
            }
            // storage level cap (investment couples to x)
            if (invest_) {
                int r = mi_.lp.add_row(-kInf, 0.0,
                                       rmeta(RowFamily::StorageBound, -1,
                                             mi_.stor_units[u].storage, b, s, h));
                mi_.lp.add_term(r, hv.stor_level[u], 1.0);
                mi_.lp.add_term(r, mi_.x_stor[u], -1.0);
            }
            // charge/discharge rate caps
            auto rate_row = [&](const std::vector<int>& cols) {
                RowMeta meta = rmeta(RowFamily::StorageRate, -1, mi_.stor_units[u].storage, b,
                                     s, h);
                if (invest_) {
                    int r = mi_.lp.add_row(-kInf, 0.0, meta);
                    for (int c : cols) mi_.lp.add_term(r, c, 1.0);
                    mi_.lp.add_term(r, mi_.x_stor[u], -st.rate_frac);
                } else {
                    int r = mi_.lp.add_row(-kInf, st.rate_frac * stor_cap(u), meta);
                    for (int c : cols) mi_.lp.add_term(r, c, 1.0);
                }
            };
            rate_row(chargers);
            rate_row(dischargers);
        }

        // ---- battery routing: sum of generator charge = sum of battery charge
        for (int b = 0; b < nb; ++b) {
            std::vector<int> gch, ych;
            for (int u = 0; u < nt; ++u)
                if (mi_.tech_units[u].building == b && hv.gen_charge[u] >= 0)
                    gch.push_back(hv.gen_charge[u]);
            for (int u = 0; u < ns; ++u)
                if (mi_.stor_units[u].building == b && hv.stor_charge_gen[u] >= 0)
                    ych.push_back(hv.stor_charge_gen[u]);
            if (gch.empty() && ych.empty()) continue;
            int r = mi_.lp.add_row(0.0, 0.0, rmeta(RowFamily::BatteryRouting, -1, -1, b, s, h));
            for (int c : gch) mi_.lp.add_term(r, c, 1.0);
            for (int c : ych) mi_.lp.add_term(r, c, -1.0);
        }

        // ---- heating grid ----
        if (hg_active_) {
            for (std::size_t p = 0; p < site_.topology.pipes.size(); ++p) {
                hv.hg_trans[p] = mi_.lp.add_column(
                    0.0, site_.topology.pipes[p].max_flow, 0.0,
                    vmeta(VarRole::HgTransfer, -1, -1,
                          building_index(site_.topology.pipes[p].from), s, h));
            }
            for (int b = 0; b < nb; ++b) {
                if (b == plant_) continue;
                if (pipes_in_[b].empty() && pipes_out_[b].empty()) continue;
                hv.hg_used[b] = mi_.lp.add_column(0.0, kInf, 0.0,
                                                  vmeta(VarRole::HgUsed, -1, -1, b, s, h));
                hv.hg_used_sh[b] = mi_.lp.add_column(0.0, kInf, 0.0,
                                                     vmeta(VarRole::HgUsedSh, -1, -1, b, s, h));
                hv.hg_used_dhw[b] = mi_.lp.add_column(
                    0.0, kInf, 0.0, vmeta(VarRole::HgUsedDhw, -1, -1, b, s, h));
                // split (Eq. 4d)
                int rs = mi_.lp.add_row(0.0, 0.0, rmeta(RowFamily::HgUseSplit, -1, -1, b, s, h));
                mi_.lp.add_term(rs, hv.hg_used[b], 1.0);
                mi_.lp.add_term(rs, hv.hg_used_sh[b], -1.0);
                mi_.lp.add_term(rs, hv.hg_used_dhw[b], -1.0);
                // definition (Eq. 4e): used = in - losses - out
                double loss_in = 0.0;
                for (int p : pipes_in_[b]) loss_in += site_.topology.pipes[p].loss;
                int rd = mi_.lp.add_row(invest_ ? 0.0 : -loss_in, invest_ ? 0.0 : -loss_in,
                                        rmeta(RowFamily::HgUseDef, -1, -1, b, s, h));
                mi_.lp.add_term(rd, hv.hg_used[b], 1.0);
                for (int p : pipes_in_[b]) mi_.lp.add_term(rd, hv.hg_trans[p], -1.0);
                for (int p : pipes_out_[b]) mi_.lp.add_term(rd, hv.hg_trans[p], 1.0);
                if (invest_) mi_.lp.add_term(rd, mi_.b_hg, loss_in);
                // no re-injection (Eq. 4c): out <= in - losses
                int rn = mi_.lp.add_row(-kInf, invest_ ? 0.0 : -loss_in,
                                        rmeta(RowFamily::NoReinjection, -1, -1, b, s, h));
                for (int p : pipes_out_[b]) mi_.lp.add_term(rn, hv.hg_trans[p], 1.0);
                for (int p : pipes_in_[b]) mi_.lp.add_term(rn, hv.hg_trans[p], -1.0);
                if (invest_) mi_.lp.add_term(rn, mi_.b_hg, loss_in);
            }
        }

        // ---- plant heat dump & balance (Eq. 4a) ----
        if (hg_active_ && plant_ >= 0) {
            hv.heat_dump[plant_] = mi_.lp.add_column(
                0.0, kInf, 0.0, vmeta(VarRole::HeatDump, -1, -1, plant_, s, h));
            int r = mi_.lp.add_row(0.0, 0.0, rmeta(RowFamily::PlantBalance, -1, -1, plant_, s, h));
            for (int u = 0; u < nt; ++u) {
                if (mi_.tech_units[u].building != plant_) continue;
                if (hv.heat_sh[u] >= 0) mi_.lp.add_term(r, hv.heat_sh[u], 1.0);
                if (hv.heat_dhw[u] >= 0) mi_.lp.add_term(r, hv.heat_dhw[u], 1.0);
            }
            for (int u = 0; u < ns; ++u) {
                if (mi_.stor_units[u].building != plant_) continue;
                if (hv.stor_dch[u] >= 0) mi_.lp.add_term(r, hv.stor_dch[u], stor(u).eta_oneway);
                if (hv.stor_ch[u] >= 0) mi_.lp.add_term(r, hv.stor_ch[u], -1.0);
            }
            for (int p : pipes_out_[plant_]) mi_.lp.add_term(r, hv.hg_trans[p], -1.0);
            mi_.lp.add_term(r, hv.heat_dump[plant_], -1.0);
        }

        // ---- per-building heat balances ----
        for (int b = 0; b < nb; ++b) {
            if (b == plant_) continue;
            // DHW (Eq. 3b) with dump
            hv.heat_dump[b] = mi_.lp.add_column(0.0, kInf, 0.0,
                                                vmeta(VarRole::HeatDump, -1, -1, b, s, h));
            int rd = mi_.lp.add_row(hd.load_dhw.empty() ? 0.0 : hd.load_dhw[b],
                                    hd.load_dhw.empty() ? 0.0 : hd.load_dhw[b],
                                    rmeta(RowFamily::DhwBalance, -1, -1, b, s, h));
            for (int u = 0; u < nt; ++u)
                if (mi_.tech_units[u].building == b && hv.heat_dhw[u] >= 0)
                    mi_.lp.add_term(rd, hv.heat_dhw[u], 1.0);
            for (int u = 0; u < ns; ++u) {
                if (mi_.stor_units[u].building != b) continue;
                if (hv.stor_dch_dhw[u] >= 0)
                    mi_.lp.add_term(rd, hv.stor_dch_dhw[u], stor(u).eta_oneway);
                if (hv.stor_ch_dhw[u] >= 0) mi_.lp.add_term(rd, hv.stor_ch_dhw[u], -1.0);
            }
            if (hv.hg_used_dhw[b] >= 0) mi_.lp.add_term(rd, hv.hg_used_dhw[b], 1.0);
            mi_.lp.add_term(rd, hv.heat_dump[b], -1.0);
            // SH (Eq. 3c), no dump
            int rs = mi_.lp.add_row(hd.load_sh.empty() ? 0.0 : hd.load_sh[b],
                                    hd.load_sh.empty() ? 0.0 : hd.load_sh[b],
                                    rmeta(RowFamily::ShBalance, -1, -1, b, s, h));
            for (int u = 0; u < nt; ++u)
                if (mi_.tech_units[u].building == b && hv.heat_sh[u] >= 0)
                    mi_.lp.add_term(rs, hv.heat_sh[u], 1.0);
            for (int u = 0; u < ns; ++u) {
                if (mi_.stor_units[u].building != b) continue;
                if (hv.stor_dch_sh[u] >= 0)
                    mi_.lp.add_term(rs, hv.stor_dch_sh[u], stor(u).eta_oneway);
                if (hv.stor_ch_sh[u] >= 0) mi_.lp.add_term(rs, hv.stor_ch_sh[u], -1.0);
            }
            if (hv.hg_used_sh[b] >= 0) mi_.lp.add_term(rs, hv.hg_used_sh[b], 1.0);
        }

        // ---- neighborhood electricity balance (Eq. 3a) ----
        {
            double total_load = 0.0;
            for (int b = 0; b < nb; ++b)
                if (!hd.load_e.empty()) total_load += hd.load_e[b];
            int r = mi_.lp.add_row(total_load, total_load,
                                   rmeta(RowFamily::ElecBalance, -1, -1, -1, s, h));
            mi_.lp.add_term(r, hv.y_imp, 1.0);
            for (int u = 0; u < ns; ++u)
                if (hv.stor_dch_self[u] >= 0)
                    mi_.lp.add_term(r, hv.stor_dch_self[u], stor(u).eta_oneway);
            for (int u = 0; u < nt; ++u) {
                if (hv.gen_self[u] >= 0) mi_.lp.add_term(r, hv.gen_self[u], 1.0);
                if (hv.elec_sh[u] >= 0) mi_.lp.add_term(r, hv.elec_sh[u], -1.0);
                if (hv.elec_dhw[u] >= 0) mi_.lp.add_term(r, hv.elec_dhw[u], -1.0);
            }
        }

        // ---- export definition ----
        {
            int r = mi_.lp.add_row(0.0, 0.0, rmeta(RowFamily::ExportDef, -1, -1, -1, s, h));
            mi_.lp.add_term(r, hv.y_exp, 1.0);
            for (int u = 0; u < nt; ++u)
                if (hv.gen_export[u] >= 0) mi_.lp.add_term(r, hv.gen_export[u], -1.0);
            for (int u = 0; u < ns; ++u)
                if (hv.stor_export[u] >= 0) mi_.lp.add_term(r, hv.stor_export[u], -1.0);
        }

        // ---- grid connection ----
        {
            const double gc = econ.grid_connection;
            if (econ.gc_mode == GcMode::SumAsPrinted) {
                int r = mi_.lp.add_row(-kInf, gc,
                                       rmeta(RowFamily::GridConnection, -1, -1, -1, s, h));
                mi_.lp.add_term(r, hv.y_imp, 1.0);
                for (int u = 0; u < ns; ++u)
                    if (hv.stor_grid_imp[u] >= 0) mi_.lp.add_term(r, hv.stor_grid_imp[u], 1.0);
                for (int u = 0; u < nt; ++u)
                    if (hv.gen_export[u] >= 0) mi_.lp.add_term(r, hv.gen_export[u], 1.0);
            } else {
                int r1 = mi_.lp.add_row(-kInf, gc,
                                        rmeta(RowFamily::GridConnection, -1, -1, -1, s, h));
                mi_.lp.add_term(r1, hv.y_imp, 1.0);
                for (int u = 0; u < ns; ++u)
                    if (hv.stor_grid_imp[u] >= 0) mi_.lp.add_term(r1, hv.stor_grid_imp[u], 1.0);
                int r2 = mi_.lp.add_row(-kInf, gc,
                                        rmeta(RowFamily::GridConnection, -1, -1, -1, s, h));
                for (int u = 0; u < nt; ++u)
                    if (hv.gen_export[u] >= 0) mi_.lp.add_term(r2, hv.gen_export[u], 1.0);
                for (int u = 0; u < ns; ++u)
                    if (hv.stor_export[u] >= 0) mi_.lp.add_term(r2, hv.stor_export[u], 1.0);
            }
        }
    }

    // Storage dynamics over a segment: chronological chains start from the
    // initial level; cyclic segments wrap hour 0 onto the last hour.
    void storage_links(int s) {
        const Segment& seg = mi_.segments[s];
        int H = static_cast<int>(seg.hours.size());
        if (H == 0) return;
        int ns = static_cast<int>(mi_.stor_units.size());
        for (int u = 0; u < ns; ++u) {
            if (mi_.vars[s].hours[0].stor_level[u] < 0) continue;
            const StorageSpec& st = stor(u);
            for (int h = 0; h < H; ++h) {
                HourVars& hv = mi_.vars[s].hours[h];
                double rhs = 0.0;
                if (h == 0 && !seg.cyclic) {
                    rhs = u < static_cast<int>(init_storage_.size()) ? init_storage_[u] : 0.0;
                    if (!invest_ && rhs > stor_cap(u) + 1e-9)
                        fail("initial storage level exceeds capacity of storage unit " +
                             st.id + " at " + site_.buildings[mi_.stor_units[u].building].id);
                }
                int r = mi_.lp.add_row(rhs, rhs,
                                       rmeta(RowFamily::StorageDynamics, -1,
                                             mi_.stor_units[u].storage,
                                             mi_.stor_units[u].building, s, h));
                mi_.lp.add_term(r, hv.stor_level[u], 1.0);
                if (hv.stor_ch[u] >= 0) mi_.lp.add_term(r, hv.stor_ch[u], -st.eta_oneway);
                if (hv.stor_ch_sh[u] >= 0)
                    mi_.lp.add_term(r, hv.stor_ch_sh[u], -st.eta_oneway);
                if (hv.stor_ch_dhw[u] >= 0)
                    mi_.lp.add_term(r, hv.stor_ch_dhw[u], -st.eta_oneway);
                if (hv.stor_charge_gen[u] >= 0)
                    mi_.lp.add_term(r, hv.stor_charge_gen[u], -st.eta_oneway);
                if (hv.stor_grid_imp[u] >= 0)
                    mi_.lp.add_term(r, hv.stor_grid_imp[u], -st.eta_oneway);
                if (hv.stor_dch[u] >= 0) mi_.lp.add_term(r, hv.stor_dch[u], 1.0);
                if (hv.stor_dch_sh[u] >= 0) mi_.lp.add_term(r, hv.stor_dch_sh[u], 1.0);
                if (hv.stor_dch_dhw[u] >= 0) mi_.lp.add_term(r, hv.stor_dch_dhw[u], 1.0);
                if (hv.stor_dch_self[u] >= 0) mi_.lp.add_term(r, hv.stor_dch_self[u], 1.0);
                if (hv.stor_export[u] >= 0) mi_.lp.add_term(r, hv.stor_export[u], 1.0);
                if (h > 0) {
                    mi_.lp.add_term(r, mi_.vars[s].hours[h - 1].stor_level[u], -1.0);
                } else if (seg.cyclic && H > 1) {
                    mi_.lp.add_term(r, mi_.vars[s].hours[H - 1].stor_level[u], -1.0);
                } else if (seg.cyclic && H == 1) {
                    // v wraps onto itself; drop the level term entirely
                    mi_.lp.add_term(r, hv.stor_level[u], -1.0);
                }
            }
        }
    }

    void zeb_row() {
        int r = mi_.lp.add_row(-kInf, 0.0, rmeta(RowFamily::Zeb, -1, -1, -1, -1, -1));
        for (auto [c, v] : mi_.em_terms) mi_.lp.add_term(r, c, v);
        for (auto [c, v] : mi_.comp_terms) mi_.lp.add_term(r, c, -v);
    }

    void roof_rows() {
        for (std::size_t u = 0; u < mi_.tech_units.size(); ++u) {
            const TechnologySpec& t = tech(static_cast<int>(u));
            if (!t.is_solar()) continue;
            int b = mi_.tech_units[u].building;
            double roof = site_.buildings[b].roof_area;
            int r = mi_.lp.add_row(-kInf, roof,
                                   rmeta(RowFamily::RoofArea, mi_.tech_units[u].tech, -1, b, -1,
                                         -1));
            mi_.lp.add_term(r, mi_.x_tech[u], t.area_coeff);
        }
    }
};

}  // namespace

ModelInstance build_investment_model(const ClusterSet& clusters, const Catalog& catalog,
                                     const Site& site, const InvestOptions& opts) {
    if (clusters.empty()) fail("build_investment_model: empty cluster set");
    validate(catalog);
    validate(site.economics);
    validate(site.topology, site.buildings);
    ModelInstance mi;
    mi.catalog = &catalog;
    mi.site = &site;
    mi.invest = true;
    mi.tech_units = tech_units_for(catalog, site);
    mi.stor_units = stor_units_for(catalog, site);
    mi.design.tech_units = mi.tech_units;
    mi.design.stor_units = mi.stor_units;
    mi.design.tech_capacity.assign(mi.tech_units.size(), 0.0);
    mi.design.stor_capacity.assign(mi.stor_units.size(), 0.0);
    mi.segments = segments_from_clusters(clusters);
    Builder b(mi, /*invest=*/true, opts, {});
    b.build();
    return mi;
}

ModelInstance build_operation_model(const SystemDesign& design,
                                    const std::vector<Segment>& segments,
                                    const Catalog& catalog, const Site& site,
                                    const std::vector<double>& initial_storage) {
    if (segments.empty()) fail("build_operation_model: empty window");
    ModelInstance mi;
    mi.catalog = &catalog;
    mi.site = &site;
    mi.invest = false;
    mi.design = design;
    mi.tech_units = design.tech_units;
    mi.stor_units = design.stor_units;
    mi.segments = segments;
    Builder b(mi, /*invest=*/false, {}, initial_storage);
    b.build();
    return mi;
}

void attach_emission_penalty(ModelInstance& mi, double em_target, double comp_target,
                             const PenaltyDeltas& deltas) {
    if (em_target < 0 || comp_target < 0) fail("attach_emission_penalty: negative target");
    if (deltas.d1 < 0 || deltas.d2 < 0 || deltas.d3 < 0)
        fail("attach_emission_penalty: negative delta");
    if (mi.penalty.attached) fail("attach_emission_penalty: already attached");
    PenaltyVars& p = mi.penalty;
    p.attached = true;
    p.em_target = em_target;
    p.comp_target = comp_target;
    auto bandcol = [&](VarRole role, double ub, double cost, int tier) {
        VarMeta m;
        m.role = role;
        m.tier = static_cast<std::int16_t>(tier);
        return mi.lp.add_column(0.0, ub, cost, m);
    };
    // Emission side (Eq. 22): convex bands, no binaries needed.
    p.em_within = bandcol(VarRole::EmissionBand, em_target, 0.0, 0);
    p.em_11 = bandcol(VarRole::EmissionBand, 0.1 * em_target, deltas.d1, 1);
    p.em_15 = bandcol(VarRole::EmissionBand, 0.4 * em_target, deltas.d2, 2);
    p.em_sup = bandcol(VarRole::EmissionBand, lp::kInf, deltas.d3, 3);
    {
        RowMeta m;
        m.family = RowFamily::PenaltyDef;
        int r = mi.lp.add_row(0.0, 0.0, m);
        mi.lp.add_term(r, p.em_within, 1.0);
        mi.lp.add_term(r, p.em_11, 1.0);
        mi.lp.add_term(r, p.em_15, 1.0);
        mi.lp.add_term(r, p.em_sup, 1.0);
        for (auto [c, v] : mi.em_terms) mi.lp.add_term(r, c, -v);
    }
    // Compensation side (Eqs. 23-24): regime binaries with shortfall bands.
    auto tiercol = [&](int tier) {
        VarMeta m;
        m.role = VarRole::TierBinary;
        m.tier = static_cast<std::int16_t>(tier);
        return mi.lp.add_binary(0.0, m);
    };
    p.b0 = tiercol(0);
    p.b05 = tiercol(1);
    p.b09 = tiercol(2);
    p.bsup = tiercol(3);
    {
        RowMeta m;
        m.family = RowFamily::PenaltyTier;
        int r = mi.lp.add_row(1.0, 1.0, m);  // exactly one regime
        mi.lp.add_term(r, p.b0, 1.0);
        mi.lp.add_term(r, p.b05, 1.0);
        mi.lp.add_term(r, p.bsup, 1.0);
        mi.lp.add_term(r, p.b09, 1.0);
    }
    // A safe cap on achievable compensation for the open-ended regime.
    double big_c = 1.0;
    for (auto [c, v] : mi.comp_terms) {
        double ub = mi.lp.col(c).ub;
        if (ub == lp::kInf) {
            // exports are limited by generation and storage rates; fall back
            // to a generous hourly bound from the grid connection
            ub = 10.0 * mi.site->economics.grid_connection + 1e4;
        }
        big_c += v * ub;
    }
    {
        RowMeta m;
        m.family = RowFamily::PenaltyTier;
        int r = mi.lp.add_row(-lp::kInf, 0.0, m);  // comp <= regime upper bound
        for (auto [c, v] : mi.comp_terms) mi.lp.add_term(r, c, v);
        mi.lp.add_term(r, p.b0, -0.5 * comp_target);
        mi.lp.add_term(r, p.b05, -0.9 * comp_target);
        mi.lp.add_term(r, p.b09, -1.0 * comp_target);
        mi.lp.add_term(r, p.bsup, -big_c);
        int r2 = mi.lp.add_row(0.0, lp::kInf, m);  // comp >= regime lower bound
        for (auto [c, v] : mi.comp_terms) mi.lp.add_term(r2, c, v);
        mi.lp.add_term(r2, p.b05, -0.5 * comp_target);
        mi.lp.add_term(r2, p.b09, -0.9 * comp_target);
        mi.lp.add_term(r2, p.bsup, -comp_target);
    }
    p.comp_0 = bandcol(VarRole::CompBand, comp_target, deltas.d3, 0);
    p.comp_05 = bandcol(VarRole::CompBand, 0.5 * comp_target, deltas.d2, 1);
    p.comp_09 = bandcol(VarRole::CompBand, 0.1 * comp_target, deltas.d1, 2);
    {
        RowMeta m;
        m.family = RowFamily::PenaltyDef;
        // shortfall bands cover target - comp, each gated on its regime
        int r = mi.lp.add_row(comp_target, lp::kInf, m);
        mi.lp.add_term(r, p.comp_0, 1.0);
        mi.lp.add_term(r, p.comp_05, 1.0);
        mi.lp.add_term(r, p.comp_09, 1.0);
        for (auto [c, v] : mi.comp_terms) mi.lp.add_term(r, c, v);
        auto gate = [&](int band, int tier, double cap) {
            RowMeta gm;
            gm.family = RowFamily::PenaltyTier;
            int rg = mi.lp.add_row(-lp::kInf, 0.0, gm);
            mi.lp.add_term(rg, band, 1.0);
            mi.lp.add_term(rg, tier, -cap);
        };
        gate(p.comp_0, p.b0, comp_target);
        gate(p.comp_05, p.b05, 0.5 * comp_target);
        gate(p.comp_09, p.b09, 0.1 * comp_target);
    }
}

void attach_receding_zeb(ModelInstance& mi, double em_so_far, double comp_so_far,
                         double delta3) {
    if (em_so_far < 0 || comp_so_far < 0) fail("attach_receding_zeb: negative accumulator");
    VarMeta vm;
    vm.role = VarRole::ZebSlack;
    mi.zeb_slack = mi.lp.add_column(0.0, lp::kInf, 10.0 * delta3, vm);
    RowMeta rm;
    rm.family = RowFamily::RecedingZeb;
    int r = mi.lp.add_row(-lp::kInf, comp_so_far - em_so_far, rm);
    for (auto [c, v] : mi.em_terms) mi.lp.add_term(r, c, v);
    for (auto [c, v] : mi.comp_terms) mi.lp.add_term(r, c, -v);
    mi.lp.add_term(r, mi.zeb_slack, -1.0);
}

lp::SolveResult solve(const ModelInstance& mi, double mipgap, double time_limit_s) {
    lp::SolveOptions opts;
    opts.mipgap = mipgap;
    opts.time_limit_s = time_limit_s;
    return lp::solve(mi.lp, opts);
}

SystemDesign design_from_solution(const ModelInstance& mi, const lp::SolveResult& r) {
    if (!mi.invest) fail("design_from_solution: not an investment model");
    SystemDesign d;
    d.tech_units = mi.tech_units;
    d.stor_units = mi.stor_units;
    d.tech_capacity.resize(mi.tech_units.size());
    d.stor_capacity.resize(mi.stor_units.size());
    d.tech_built.resize(mi.tech_units.size());
    d.stor_built.resize(mi.stor_units.size());
    for (std::size_t u = 0; u < mi.tech_units.size(); ++u) {
        d.tech_built[u] = r.x[mi.b_tech[u]] > 0.5;
        d.tech_capacity[u] = d.tech_built[u] ? std::max(0.0, r.x[mi.x_tech[u]]) : 0.0;
    }
    for (std::size_t u = 0; u < mi.stor_units.size(); ++u) {
        d.stor_built[u] = r.x[mi.b_stor[u]] > 0.5;
        d.stor_capacity[u] = d.stor_built[u] ? std::max(0.0, r.x[mi.x_stor[u]]) : 0.0;
    }
    d.hg_built = mi.b_hg >= 0 && r.x[mi.b_hg] > 0.5;
    d.objective = r.objective;
    // Split the objective into investment and (discounted) operation parts.
    const EconomicParams& econ = mi.site->economics;
    double invest_cost = d.hg_built ? mi.site->topology.hg_cost : 0.0;
    for (std::size_t u = 0; u < mi.tech_units.size(); ++u) {
        const TechnologySpec& t = mi.catalog->technologies[mi.tech_units[u].tech];
        DiscountedCost dc = discounted_investment_cost(t, econ);
        invest_cost += dc.var_disc * d.tech_capacity[u] + (d.tech_built[u] ? dc.fix_disc : 0.0);
    }
    for (std::size_t u = 0; u < mi.stor_units.size(); ++u) {
        const StorageSpec& st = mi.catalog->storages[mi.stor_units[u].storage];
        invest_cost += discounted_storage_cost(st, econ) * d.stor_capacity[u];
    }
    d.invest_cost = invest_cost;
    d.operation_cost = r.objective - invest_cost;
    return d;
}

void save_design(const SystemDesign& d, const Catalog& catalog, const Site& site,
                 const std::string& path) {
    nlohmann::json j;
    j["hg_built"] = d.hg_built;
    j["objective"] = d.objective;
    j["invest_cost"] = d.invest_cost;
    j["operation_cost"] = d.operation_cost;
    j["technologies"] = nlohmann::json::array();
    for (std::size_t u = 0; u < d.tech_units.size(); ++u) {
        if (!d.tech_built[u]) continue;
        j["technologies"].push_back(
            {{"tech", catalog.technologies[d.tech_units[u].tech].id},
             {"building", site.buildings[d.tech_units[u].building].id},
             {"capacity_kw", d.tech_capacity[u]}});
    }
    j["storages"] = nlohmann::json::array();
    for (std::size_t u = 0; u < d.stor_units.size(); ++u) {
        if (!d.stor_built[u]) continue;
        j["storages"].push_back({{"storage", catalog.storages[d.stor_units[u].storage].id},
                                 {"building", site.buildings[d.stor_units[u].building].id},
                                 {"capacity_kwh", d.stor_capacity[u]}});
    }
    std::ofstream out(path);
    if (!out) fail("cannot write design file '" + path + "'");
    out << j.dump(2) << "\n";
}

SystemDesign load_design(const std::string& path, const Catalog& catalog, const Site& site) {
    std::ifstream in(path);
    if (!in) fail("cannot open design file '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        fail(path + ": invalid JSON: " + std::string(e.what()));
    }
    SystemDesign d;
    d.tech_units = tech_units_for(catalog, site);
    d.stor_units = stor_units_for(catalog, site);
    d.tech_capacity.assign(d.tech_units.size(), 0.0);
    d.stor_capacity.assign(d.stor_units.size(), 0.0);
    d.tech_built.assign(d.tech_units.size(), 0);
    d.stor_built.assign(d.stor_units.size(), 0);
    d.hg_built = j.value("hg_built", false);
    d.objective = j.value("objective", 0.0);
    d.invest_cost = j.value("invest_cost", 0.0);
    d.operation_cost = j.value("operation_cost", 0.0);
    auto bidx = [&](const std::string& id) {
        for (std::size_t b = 0; b < site.buildings.size(); ++b)
            if (site.buildings[b].id == id) return static_cast<int>(b);
        fail("design references unknown building '" + id + "'");
    };
    for (const auto& jt : j.value("technologies", nlohmann::json::array())) {
        int ti = catalog.tech_index(jt.at("tech").get<std::string>());
        if (ti < 0) fail("design references unknown technology");
        int b = bidx(jt.at("building").get<std::string>());
        bool found = false;
        for (std::size_t u = 0; u < d.tech_units.size(); ++u)
            if (d.tech_units[u].tech == ti && d.tech_units[u].building == b) {
                d.tech_built[u] = 1;
                d.tech_capacity[u] = jt.at("capacity_kw").get<double>();
                found = true;
            }
        if (!found) fail("design entry not instantiable under the current site/catalog");
    }
    for (const auto& js : j.value("storages", nlohmann::json::array())) {
        int si = catalog.storage_index(js.at("storage").get<std::string>());
        if (si < 0) fail("design references unknown storage");
        int b = bidx(js.at("building").get<std::string>());
        bool found = false;
        for (std::size_t u = 0; u < d.stor_units.size(); ++u)
            if (d.stor_units[u].storage == si && d.stor_units[u].building == b) {
                d.stor_built[u] = 1;
                d.stor_capacity[u] = js.at("capacity_kwh").get<double>();
                found = true;
            }
        if (!found) fail("design storage entry not instantiable under the current site/catalog");
    }
    return d;
}

}  // namespace zenopt::model
