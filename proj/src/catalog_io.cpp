#include "zenopt/catalog_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace zenopt {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::runtime_error(what); }

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open '" + path + "'");
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) fail("cannot write '" + path + "'");
    return out;
}

TechKind kind_from(const std::string& s) {
    if (s == "fuel_burner") return TechKind::FuelBurner;
    if (s == "electric_heater") return TechKind::ElectricHeater;
    if (s == "chp") return TechKind::Chp;
    if (s == "pv") return TechKind::Pv;
    if (s == "solar_thermal") return TechKind::SolarThermal;
    if (s == "heat_pump") return TechKind::HeatPump;
    fail("unknown technology kind '" + s + "'");
}

StorageMedium medium_from(const std::string& s) {
    if (s == "heat") return StorageMedium::Heat;
    if (s == "electric") return StorageMedium::Electric;
    fail("unknown storage medium '" + s + "'");
}

PiecewiseLinear pwl_from(const json& j) {
    PiecewiseLinear p;
    for (const auto& pt : j) {
        p.t.push_back(pt.at(0).get<double>());
        p.v.push_back(pt.at(1).get<double>());
    }
    for (std::size_t i = 1; i < p.t.size(); ++i)
        if (p.t[i] <= p.t[i - 1]) fail("piecewise table breakpoints must be increasing");
    return p;
}

json pwl_to(const PiecewiseLinear& p) {
    json j = json::array();
    for (std::size_t i = 0; i < p.t.size(); ++i) j.push_back({p.t[i], p.v[i]});
    return j;
}

}  // namespace

Catalog parse_catalog(std::istream& in) {
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        fail(std::string("catalog: invalid JSON: ") + e.what());
    }
    Catalog c;
    for (const auto& jt : j.value("technologies", json::array())) {
        TechnologySpec t;
        t.id = jt.at("id").get<std::string>();
        t.kind = kind_from(jt.at("kind").get<std::string>());
        t.scope = jt.value("scope", "building") == std::string("neighborhood")
                      ? TechScope::Neighborhood
                      : TechScope::Building;
        t.produces_heat = jt.value("produces_heat", false);
        t.produces_electricity = jt.value("produces_electricity", false);
        t.can_serve_dhw = jt.value("can_serve_dhw", false);
        t.eta = jt.value("eta", 1.0);
        t.alpha_chp = jt.value("alpha_chp", 0.0);
        t.alpha_partload = jt.value("alpha_partload", 0.0);
        t.x_min = jt.value("x_min", 0.0);
        t.x_max = jt.at("x_max").get<double>();
        t.cost_fix = jt.value("cost_fix", 0.0);
        t.cost_var = jt.value("cost_var", 0.0);
        t.om_frac = jt.value("om_frac", 0.0);
        t.lifetime = jt.value("lifetime", 1);
        t.fuel_id = jt.value("fuel", "");
        t.area_coeff = jt.value("area_coeff", 0.0);
        c.technologies.push_back(std::move(t));
    }
    for (const auto& jf : j.value("fuels", json::array())) {
        FuelSpec f;
        f.id = jf.at("id").get<std::string>();
        const auto& price = jf.at("price");
        if (price.is_string()) {
            if (price.get<std::string>() != "hourly")
                fail("fuel '" + f.id + "': price must be a number or \"hourly\"");
            f.price_hourly = true;
        } else {
            f.price = price.get<double>();
        }
        const auto& co2 = jf.at("co2_factor");
        if (co2.is_string()) {
            if (co2.get<std::string>() != "hourly")
                fail("fuel '" + f.id + "': co2_factor must be a number or \"hourly\"");
            f.co2_hourly = true;
        } else {
            f.co2_factor = co2.get<double>();
        }
        c.fuels.push_back(std::move(f));
    }
    for (const auto& js : j.value("storages", json::array())) {
        StorageSpec s;
        s.id = js.at("id").get<std::string>();
        s.medium = medium_from(js.at("medium").get<std::string>());
        s.eta_oneway = js.at("eta_oneway").get<double>();
        s.cost_per_kwh = js.value("cost_per_kwh", 0.0);
        s.om_frac = js.value("om_frac", 0.0);
        s.lifetime = js.value("lifetime", 1);
        s.cap_min = js.value("cap_min", 0.0);
        s.cap_max = js.value("cap_max", 1e6);
        s.rate_frac = js.at("rate_frac").get<double>();
        c.storages.push_back(std::move(s));
    }
    for (const auto& jc : j.value("cop_models", json::array())) {
        CopModel cm;
        cm.tech_id = jc.at("tech").get<std::string>();
        cm.sh.cop = pwl_from(jc.at("sh").at("cop"));
        cm.sh.input_max = pwl_from(jc.at("sh").at("input_max"));
        cm.dhw.cop = pwl_from(jc.at("dhw").at("cop"));
        cm.dhw.input_max = pwl_from(jc.at("dhw").at("input_max"));
        c.cop_models.push_back(std::move(cm));
    }
    if (j.contains("pv_panel")) {
        const auto& jp = j["pv_panel"];
        c.pv_panel.t_noct = jp.value("t_noct", 45.0);
        c.pv_panel.t_coef = jp.value("t_coef", 0.004);
        c.pv_panel.t_stc = jp.value("t_stc", 25.0);
        c.pv_panel.eta_inv = jp.value("eta_inv", 0.97);
        c.pv_panel.g_stc = jp.value("g_stc", 1000.0);
    }
    validate(c);
    return c;
}

void write_catalog(const Catalog& c, std::ostream& out) {
    json j;
    j["technologies"] = json::array();
    for (const auto& t : c.technologies) {
        json jt;
        jt["id"] = t.id;
        jt["kind"] = tech_kind_name(t.kind);
        jt["scope"] = tech_scope_name(t.scope);
        jt["produces_heat"] = t.produces_heat;
        jt["produces_electricity"] = t.produces_electricity;
        jt["can_serve_dhw"] = t.can_serve_dhw;
        jt["eta"] = t.eta;
        if (t.alpha_chp > 0) jt["alpha_chp"] = t.alpha_chp;
        jt["alpha_partload"] = t.alpha_partload;
        jt["x_min"] = t.x_min;
        jt["x_max"] = t.x_max;
        jt["cost_fix"] = t.cost_fix;
        jt["cost_var"] = t.cost_var;
        jt["om_frac"] = t.om_frac;
        jt["lifetime"] = t.lifetime;
        if (!t.fuel_id.empty()) jt["fuel"] = t.fuel_id;
        if (t.area_coeff > 0) jt["area_coeff"] = t.area_coeff;
        j["technologies"].push_back(std::move(jt));
    }
    j["fuels"] = json::array();
    for (const auto& f : c.fuels) {
        json jf;
        jf["id"] = f.id;
        if (f.price_hourly)
            jf["price"] = "hourly";
        else
            jf["price"] = f.price;
        if (f.co2_hourly)
            jf["co2_factor"] = "hourly";
        else
            jf["co2_factor"] = f.co2_factor;
        j["fuels"].push_back(std::move(jf));
    }
    j["storages"] = json::array();
    for (const auto& s : c.storages) {
        json js;
        js["id"] = s.id;
        js["medium"] = storage_medium_name(s.medium);
        js["eta_oneway"] = s.eta_oneway;
        js["cost_per_kwh"] = s.cost_per_kwh;
        js["om_frac"] = s.om_frac;
        js["lifetime"] = s.lifetime;
        js["cap_min"] = s.cap_min;
        js["cap_max"] = s.cap_max;
        js["rate_frac"] = s.rate_frac;
        j["storages"].push_back(std::move(js));
    }
    j["cop_models"] = json::array();
    for (const auto& cm : c.cop_models) {
        json jc;
        jc["tech"] = cm.tech_id;
        jc["sh"]["cop"] = pwl_to(cm.sh.cop);
        jc["sh"]["input_max"] = pwl_to(cm.sh.input_max);
        jc["dhw"]["cop"] = pwl_to(cm.dhw.cop);
        jc["dhw"]["input_max"] = pwl_to(cm.dhw.input_max);
        j["cop_models"].push_back(std::move(jc));
    }
    j["pv_panel"] = {{"t_noct", c.pv_panel.t_noct},
                     {"t_coef", c.pv_panel.t_coef},
                     {"t_stc", c.pv_panel.t_stc},
                     {"eta_inv", c.pv_panel.eta_inv},
                     {"g_stc", c.pv_panel.g_stc}};
    out << j.dump(2) << "\n";
}

Catalog load_catalog(const std::string& path) {
    auto in = open_in(path);
    try {
        return parse_catalog(in);
    } catch (const std::exception& e) {
        fail(path + ": " + e.what());
    }
}

void save_catalog(const Catalog& catalog, const std::string& path) {
    auto out = open_out(path);
    write_catalog(catalog, out);
}

Site parse_site(std::istream& in) {
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        fail(std::string("site: invalid JSON: ") + e.what());
    }
    Site s;
    for (const auto& jb : j.value("buildings", json::array())) {
        Building b;
        b.id = jb.at("id").get<std::string>();
        b.roof_area = jb.value("roof_area", 0.0);
        for (const auto& t : jb.value("allowed_techs", json::array()))
            b.allowed_techs.push_back(t.get<std::string>());
        for (const auto& t : jb.value("allowed_storages", json::array()))
            b.allowed_storages.push_back(t.get<std::string>());
        s.buildings.push_back(std::move(b));
    }
    if (j.contains("heating_grid")) {
        const auto& jg = j["heating_grid"];
        s.topology.hg_cost = jg.value("cost", 0.0);
        s.topology.plant_id = jg.value("plant", "");
        for (const auto& jp : jg.value("pipes", json::array())) {
            HeatingPipe p;
            p.from = jp.at("from").get<std::string>();
            p.to = jp.at("to").get<std::string>();
            p.loss = jp.value("loss", 0.0);
            p.max_flow = jp.at("max_flow").get<double>();
            s.topology.pipes.push_back(std::move(p));
        }
    }
    const auto& je = j.at("economics");
    s.economics.discount_rate = je.value("discount_rate", 0.04);
    s.economics.study_years = je.value("study_years", 60);
    s.economics.grid_tariff = je.value("grid_tariff", 0.0);
    s.economics.retail_tariff = je.value("retail_tariff", 0.0);
    s.economics.grid_connection = je.at("grid_connection").get<double>();
    s.economics.big_m = je.value("big_m", 1e5);
    std::string gc = je.value("gc_mode", "sum");
    if (gc == "sum")
        s.economics.gc_mode = GcMode::SumAsPrinted;
    else if (gc == "separate")
        s.economics.gc_mode = GcMode::Separate;
    else
        fail("economics: gc_mode must be \"sum\" or \"separate\"");
    validate(s.economics);
    validate(s.topology, s.buildings);
    return s;
}

void write_site(const Site& s, std::ostream& out) {
    json j;
    j["buildings"] = json::array();
    for (const auto& b : s.buildings) {
        json jb;
        jb["id"] = b.id;
        jb["roof_area"] = b.roof_area;
        jb["allowed_techs"] = b.allowed_techs;
        jb["allowed_storages"] = b.allowed_storages;
        j["buildings"].push_back(std::move(jb));
    }
    if (!s.topology.plant_id.empty()) {
        json jg;
        jg["cost"] = s.topology.hg_cost;
        jg["plant"] = s.topology.plant_id;
        jg["pipes"] = json::array();
        for (const auto& p : s.topology.pipes)
            jg["pipes"].push_back({{"from", p.from},
                                   {"to", p.to},
                                   {"loss", p.loss},
                                   {"max_flow", p.max_flow}});
        j["heating_grid"] = std::move(jg);
    }
    j["economics"] = {
        {"discount_rate", s.economics.discount_rate},
        {"study_years", s.economics.study_years},
        {"grid_tariff", s.economics.grid_tariff},
        {"retail_tariff", s.economics.retail_tariff},
        {"grid_connection", s.economics.grid_connection},
        {"big_m", s.economics.big_m},
        {"gc_mode", s.economics.gc_mode == GcMode::SumAsPrinted ? "sum" : "separate"}};
    out << j.dump(2) << "\n";
}

Site load_site(const std::string& path) {
    auto in = open_in(path);
    try {
        return parse_site(in);
    } catch (const std::exception& e) {
        fail(path + ": " + e.what());
    }
}

void save_site(const Site& site, const std::string& path) {
    auto out = open_out(path);
    write_site(site, out);
}

}  // namespace zenopt
