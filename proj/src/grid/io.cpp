#include "mgres/grid/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "mgres/util/errors.hpp"
#include "mgres/util/io.hpp"
#include "mgres/util/json_fields.hpp"

namespace mgres::grid {

using nlohmann::json;

namespace {

using jf::field;
using jf::num;
using jf::num_or;
using jf::str;
using jf::array;

PhaseSet phases(const json& obj, const std::string& where) {
    try {
        return PhaseSet::parse(str(obj, "phases", where));
    } catch (const InputError& e) {
        throw InputError(where + ".phases", e.what());
    }
}

// Square matrix over the branch's present phases, expanded to 3x3.
Matrix3 matrix(const json& obj, const char* key, PhaseSet ph, const std::string& where) {
    const auto& v = field(obj, key, where);
    const auto idx = ph.list();
    const std::string w = where + "." + key;
    if (!v.is_array() || v.size() != idx.size())
        throw InputError(w, "expected a " + std::to_string(idx.size()) + "x" + std::to_string(idx.size()) +
                                " matrix over the branch phases");
    Matrix3 m{};
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (!v[i].is_array() || v[i].size() != idx.size()) throw InputError(w, "row size mismatch");
        for (std::size_t j = 0; j < idx.size(); ++j) {
            if (!v[i][j].is_number()) throw InputError(w, "expected numbers");
            m[idx[i]][idx[j]] = v[i][j].get<double>();
        }
    }
    return m;
}

json matrix_json(const Matrix3& m, PhaseSet ph) {
    const auto idx = ph.list();
    json out = json::array();
    for (int i : idx) {
        json row = json::array();
        for (int j : idx) row.push_back(m[i][j]);
        out.push_back(row);
    }
    return out;
}

}  // namespace

json network_to_json(const NetworkModel& m) {
    json j;
    j["schema_version"] = kNetworkSchemaVersion;
    j["name"] = m.name;
    j["base"] = {{"kv_ll", m.base.kv_ll}, {"mva", m.base.mva}};
    j["horizon"] = {{"steps", m.steps}, {"dt_minutes", m.dt_minutes}, {"start_minute", m.start_minute}};
    j["root"] = m.root_id();
    j["buses"] = json::array();
    for (const auto& b : m.buses)
        j["buses"].push_back({{"id", b.id}, {"phases", b.phases.str()}, {"v_min", b.v_min}, {"v_max", b.v_max}});
    j["branches"] = json::array();
    for (const auto& br : m.branches)
        j["branches"].push_back({{"id", br.id},
                                 {"from", br.from},
                                 {"to", br.to},
                                 {"phases", br.phases.str()},
                                 {"r_ohm", matrix_json(br.r_ohm, br.phases)},
                                 {"x_ohm", matrix_json(br.x_ohm, br.phases)},
                                 {"flow_limit_va", br.flow_limit_va}});
    j["pv"] = json::array();
    for (const auto& d : m.pv)
        j["pv"].push_back({{"id", d.id}, {"bus", d.bus}, {"phases", d.phases.str()}, {"capacity_va", d.capacity_va}});
    j["dg"] = json::array();
    for (const auto& d : m.dg)
        j["dg"].push_back({{"id", d.id}, {"bus", d.bus}, {"phases", d.phases.str()}, {"capacity_va", d.capacity_va}});
    j["storage"] = json::array();
    for (const auto& d : m.storage)
        j["storage"].push_back({{"id", d.id},
                                {"bus", d.bus},
                                {"phases", d.phases.str()},
                                {"power_w", d.power_w},
                                {"energy_min_wh", d.energy_min_wh},
                                {"energy_max_wh", d.energy_max_wh},
                                {"capacity_va", d.capacity_va},
                                {"initial_wh", d.initial_wh}});
    j["loads"] = json::array();
    for (const auto& d : m.loads)
        j["loads"].push_back(
            {{"id", d.id}, {"bus", d.bus}, {"phases", d.phases.str()}, {"power_factor", d.power_factor}});
    return j;
}

NetworkModel network_from_json(const json& j, const std::string& where) {
    if (!j.is_object()) throw InputError(where, "expected a JSON object");
    const auto ver = num(j, "schema_version", where);
    if (ver != kNetworkSchemaVersion)
        throw InputError(where + ".schema_version", "unsupported version " + fmt(ver));
    NetworkModel m;
    if (j.contains("name")) m.name = str(j, "name", where);
    if (j.contains("base")) {
        const auto& b = j.at("base");
        m.base.kv_ll = num_or(b, "kv_ll", m.base.kv_ll, where + ".base");
        m.base.mva = num_or(b, "mva", m.base.mva, where + ".base");
    }
    {
        const auto& h = field(j, "horizon", where);
        const double steps = num(h, "steps", where + ".horizon");
        if (steps != std::floor(steps) || steps < 1 || steps > 1e6)
            throw InputError(where + ".horizon.steps", "expected a positive integer");
        m.steps = static_cast<int>(steps);
        m.dt_minutes = num(h, "dt_minutes", where + ".horizon");
        m.start_minute = num_or(h, "start_minute", 0.0, where + ".horizon");
    }
    if (j.contains("root")) m.root = str(j, "root", where);
    const auto& buses = array(j, "buses", where);
    for (std::size_t i = 0; i < buses.size(); ++i) {
        const std::string w = where + ".buses[" + std::to_string(i) + "]";
        const auto& b = buses[i];
        m.buses.push_back({str(b, "id", w), phases(b, w), num_or(b, "v_min", 0.95, w), num_or(b, "v_max", 1.05, w)});
    }
    const auto& branches = array(j, "branches", where);
    for (std::size_t i = 0; i < branches.size(); ++i) {
        const std::string w = where + ".branches[" + std::to_string(i) + "]";
        const auto& b = branches[i];
        Branch br;
        br.id = str(b, "id", w);
        br.from = str(b, "from", w);
        br.to = str(b, "to", w);
        br.phases = phases(b, w);
        br.r_ohm = matrix(b, "r_ohm", br.phases, w);
        br.x_ohm = matrix(b, "x_ohm", br.phases, w);
        br.flow_limit_va = num(b, "flow_limit_va", w);
        m.branches.push_back(br);
    }
    const auto& pv = array(j, "pv", where);
    for (std::size_t i = 0; i < pv.size(); ++i) {
        const std::string w = where + ".pv[" + std::to_string(i) + "]";
        PvUnit d;
        d.id = str(pv[i], "id", w);
        d.bus = str(pv[i], "bus", w);
        d.phases = phases(pv[i], w);
        d.capacity_va = num(pv[i], "capacity_va", w);
        m.pv.push_back(d);
    }
    const auto& dg = array(j, "dg", where);
    for (std::size_t i = 0; i < dg.size(); ++i) {
        const std::string w = where + ".dg[" + std::to_string(i) + "]";
        m.dg.push_back({str(dg[i], "id", w), str(dg[i], "bus", w), phases(dg[i], w), num(dg[i], "capacity_va", w)});
    }
    const auto& es = array(j, "storage", where);
    for (std::size_t i = 0; i < es.size(); ++i) {
        const std::string w = where + ".storage[" + std::to_string(i) + "]";
        StorageUnit d;
        d.id = str(es[i], "id", w);
        d.bus = str(es[i], "bus", w);
        d.phases = phases(es[i], w);
        d.power_w = num(es[i], "power_w", w);
        d.energy_min_wh = num(es[i], "energy_min_wh", w);
        d.energy_max_wh = num(es[i], "energy_max_wh", w);
        d.capacity_va = num(es[i], "capacity_va", w);
        d.initial_wh = num(es[i], "initial_wh", w);
        m.storage.push_back(d);
    }
    const auto& loads = array(j, "loads", where);
    for (std::size_t i = 0; i < loads.size(); ++i) {
        const std::string w = where + ".loads[" + std::to_string(i) + "]";
        LoadPoint d;
        d.id = str(loads[i], "id", w);
        d.bus = str(loads[i], "bus", w);
        d.phases = phases(loads[i], w);
        d.power_factor = num_or(loads[i], "power_factor", 1.0, w);
        m.loads.push_back(d);
    }
    return m;
}

NetworkModel load_network(const std::string& path) { return network_from_json(parse_json_file(path), path); }

void apply_profiles_csv(NetworkModel& m, std::istream& in, const std::string& where) {
    std::string line;
    if (!std::getline(in, line)) throw InputError(where, "empty profile file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "time,entity_id,field,value")
        throw InputError(where + ":1", "expected header 'time,entity_id,field,value'");
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    for (auto& d : m.pv) d.forecast_w.assign(m.steps, nan);
    for (auto& d : m.loads) {
        d.p_des_w.assign(m.steps, nan);
        d.p_min_w.assign(m.steps, nan);
    }
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string w = where + ":" + std::to_string(lineno);
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cells.push_back(c);
        if (cells.size() != 4) throw InputError(w, "expected 4 comma-separated fields");
        double t, v;
        try {
            std::size_t pos = 0;
            t = std::stod(cells[0], &pos);
            if (pos != cells[0].size()) throw std::invalid_argument("");
            v = std::stod(cells[3], &pos);
            if (pos != cells[3].size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw InputError(w, "time and value must be numbers");
        }
        const double kf = (t - m.start_minute) / m.dt_minutes;
        const long k = std::lround(kf);
        if (std::abs(kf - static_cast<double>(k)) > 1e-9 || k < 0 || k >= m.steps)
            throw InputError(w, "time " + cells[0] + " is not a step start of the horizon");
        const auto& id = cells[1];
        const auto& f = cells[2];
        std::vector<double>* target = nullptr;
        if (f == "forecast_w") {
            const int i = m.pv_index(id);
            if (i < 0) throw InputError(w, "unknown pv unit '" + id + "'");
            target = &m.pv[i].forecast_w;
        } else if (f == "p_des_w" || f == "p_min_w") {
            const int i = m.load_index(id);
            if (i < 0) throw InputError(w, "unknown load '" + id + "'");
            target = f == "p_des_w" ? &m.loads[i].p_des_w : &m.loads[i].p_min_w;
        } else {
            throw InputError(w, "unknown field '" + f + "'");
        }
        if (!std::isnan((*target)[k])) throw InputError(w, "duplicate " + f + " for '" + id + "' at time " + cells[0]);
        (*target)[k] = v;
    }
    auto check = [&](const std::string& id, const char* f, const std::vector<double>& v) {
        for (int k = 0; k < m.steps; ++k)
            if (std::isnan(v[k]))
                throw InputError(where, std::string("missing ") + f + " for '" + id + "' at step " + std::to_string(k));
    };
    for (const auto& d : m.pv) check(d.id, "forecast_w", d.forecast_w);
    for (const auto& d : m.loads) {
        check(d.id, "p_des_w", d.p_des_w);
        check(d.id, "p_min_w", d.p_min_w);
    }
}

void load_profiles(NetworkModel& model, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path, "cannot open file");
    apply_profiles_csv(model, in, path);
}

void write_profiles_csv(const NetworkModel& m, std::ostream& out) {
    out << "time,entity_id,field,value\n";
    for (int k = 0; k < m.steps; ++k) {
        const std::string t = fmt_exact(m.step_minute(k));
        for (const auto& d : m.pv)
            if (k < static_cast<int>(d.forecast_w.size()))
                out << t << ',' << d.id << ",forecast_w," << fmt_exact(d.forecast_w[k]) << '\n';
        for (const auto& d : m.loads) {
            if (k < static_cast<int>(d.p_des_w.size()))
                out << t << ',' << d.id << ",p_des_w," << fmt_exact(d.p_des_w[k]) << '\n';
            if (k < static_cast<int>(d.p_min_w.size()))
                out << t << ',' << d.id << ",p_min_w," << fmt_exact(d.p_min_w[k]) << '\n';
        }
    }
}

}  // namespace mgres::grid
