#include "mgres/scenario/outputs.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mgres/util/errors.hpp"
#include "mgres/util/io.hpp"
#include "mgres/util/json_fields.hpp"

namespace mgres::scenario {

namespace fs = std::filesystem;
using nlohmann::json;

void OutputSet::add(const std::string& name, std::string content) { files_.emplace_back(name, std::move(content)); }

void OutputSet::add_json(const std::string& name, const json& j) { add(name, j.dump(2) + "\n"); }

std::vector<std::pair<std::string, std::string>> OutputSet::write_all() const {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw InputError("--out", "cannot create directory '" + dir_ + "': " + ec.message());
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [name, body] : files_) {
        const auto p = (fs::path(dir_) / name).string();
        std::ofstream f(p, std::ios::binary);
        if (!f) throw InputError("--out", "cannot write '" + p + "'");
        f << body;
        out.emplace_back(name, sha256_hex(body));
    }
    return out;
}

namespace {

const char* status_name(lp::SolveStatus s) { return lp::to_string(s); }

json series(const dispatch::DeviceSchedule& d, int steps) {
    json p = json::array(), q = json::array();
    for (int t = 0; t < steps; ++t) {
        p.push_back(d.total_p(t));
        q.push_back(d.total_q(t));
    }
    return {{"id", d.id}, {"p_w", p}, {"q_var", q}};
}

const char* phase_name(int p) { return p == 0 ? "a" : p == 1 ? "b" : "c"; }

}  // namespace

json dispatch_json(const grid::NetworkModel& m, const dispatch::DispatchResult& r) {
    json j;
    j["status"] = status_name(r.status);
    j["first_step"] = r.first_step;
    j["steps"] = r.steps;
    if (!r.optimal()) {
        j["certificate"] = r.certificate;
        return j;
    }
    j["objective"] = r.objective;
    json minutes = json::array();
    for (int t = 0; t < r.steps; ++t) minutes.push_back(m.step_minute(r.first_step + t));
    j["minute"] = minutes;
    auto group = [&](const std::vector<dispatch::DeviceSchedule>& v) {
        json a = json::array();
        for (const auto& d : v) a.push_back(series(d, r.steps));
        return a;
    };
    j["pv"] = group(r.pv);
    j["dg"] = group(r.dg);
    j["storage"] = group(r.es);
    j["loads"] = group(r.load);
    json soc = json::object();
    for (std::size_t i = 0; i < m.storage.size(); ++i) soc[m.storage[i].id] = r.soc_wh[i];
    j["soc_wh"] = soc;
    json pvc = json::object(), ldc = json::object();
    for (std::size_t i = 0; i < m.pv.size(); ++i) pvc[m.pv[i].id] = r.pv_curt_w[i];
    for (std::size_t i = 0; i < m.loads.size(); ++i) ldc[m.loads[i].id] = r.load_curt_w[i];
    j["pv_curtailment_w"] = pvc;
    j["load_curtailment_w"] = ldc;
    return j;
}

json robust_json(const grid::NetworkModel& m, const robust::RobustResult& r) {
    json j = dispatch_json(m, r.dispatch);
    j["required_up_w"] = r.required_up;
    j["required_dn_w"] = r.required_dn;
    if (!r.optimal()) return j;
    j["objective"] = r.objective;
    j["energy_objective"] = r.energy_objective;
    j["reserve_objective"] = r.reserve_objective;
    return j;
}

std::string aggregate_csv(const grid::NetworkModel& m, const dispatch::DispatchResult& r) {
    const auto a = dispatch::summarize(m, r);
    std::ostringstream o;
    o << "minute,pv_w,dg_w,es_w,generation_w,load_w,pv_curtailment_w,load_curtailment_w,v_min_pu,v_max_pu,soc_wh\n";
    for (std::size_t t = 0; t < a.minute.size(); ++t)
        o << fmt(a.minute[t]) << ',' << fmt(a.pv_w[t]) << ',' << fmt(a.dg_w[t]) << ',' << fmt(a.es_w[t]) << ','
          << fmt(a.generation_w[t]) << ',' << fmt(a.load_w[t]) << ',' << fmt(a.pv_curt_w[t]) << ','
          << fmt(a.load_curt_w[t]) << ',' << fmt(a.v_min_pu[t]) << ',' << fmt(a.v_max_pu[t]) << ','
          << fmt(a.soc_wh[t]) << '\n';
    return o.str();
}

std::string schedule_csv(const grid::NetworkModel& m, const dispatch::DispatchResult& r) {
    std::ostringstream o;
    o << "minute,class,device,p_w,q_var\n";
    for (int t = 0; t < r.steps; ++t) {
        const double minute = m.step_minute(r.first_step + t);
        auto put = [&](const char* cls, const std::vector<dispatch::DeviceSchedule>& v) {
            for (const auto& d : v)
                o << fmt(minute) << ',' << cls << ',' << d.id << ',' << fmt(d.total_p(t)) << ',' << fmt(d.total_q(t))
                  << '\n';
        };
        put("pv", r.pv);
        put("dg", r.dg);
        put("es", r.es);
        put("load", r.load);
    }
    return o.str();
}

std::string voltage_csv(const grid::NetworkModel& m, const dispatch::DispatchResult& r) {
    std::ostringstream o;
    o << "minute,bus,phase,v_pu\n";
    for (int t = 0; t < r.steps; ++t)
        for (std::size_t b = 0; b < m.buses.size(); ++b)
            for (int p : m.buses[b].phases.list())
                o << fmt(m.step_minute(r.first_step + t)) << ',' << m.buses[b].id << ',' << phase_name(p) << ','
                  << fmt(std::sqrt(std::max(0.0, r.w[b][t][p]))) << '\n';
    return o.str();
}

std::string soc_csv(const grid::NetworkModel& m, const dispatch::DispatchResult& r) {
    std::ostringstream o;
    o << "minute,unit,soc_wh\n";
    // entry t is the energy at the start of step t; the last row is the end of the window
    for (int t = 0; t <= r.steps; ++t)
        for (std::size_t i = 0; i < m.storage.size(); ++i)
            o << fmt(m.step_minute(r.first_step + t)) << ',' << m.storage[i].id << ',' << fmt(r.soc_wh[i][t]) << '\n';
    return o.str();
}

std::string reserves_csv(const grid::NetworkModel& m, const robust::RobustResult& r) {
    std::ostringstream o;
    o << "minute,class,device,up_w,dn_w\n";
    const auto& R = r.reserves;
    for (int t = 0; t < r.dispatch.steps; ++t) {
        const double minute = m.step_minute(r.dispatch.first_step + t);
        auto put = [&](const char* cls, const auto& units, const auto& up, const auto& dn) {
            for (std::size_t i = 0; i < units.size(); ++i)
                o << fmt(minute) << ',' << cls << ',' << units[i].id << ',' << fmt(up[i][t]) << ',' << fmt(dn[i][t])
                  << '\n';
        };
        put("pv", m.pv, R.pv_up, R.pv_dn);
        put("dg", m.dg, R.dg_up, R.dg_dn);
        put("es", m.storage, R.es_up, R.es_dn);
        put("load", m.loads, R.load_up, R.load_dn);
    }
    return o.str();
}

json polytope_json(const advset::InnerPolytope& p, const std::string& plan_key) {
    json axes = json::array();
    for (std::size_t i = 0; i < p.dim(); ++i) {
        const auto& a = p.axes[i];
        axes.push_back({{"kind", advset::to_string(a.kind)},
                        {"target", a.target},
                        {"steps", {a.first_step, a.last_step}},
                        {"sign", a.sign},
                        {"label", a.label()},
                        {"alpha_w", p.alpha_w[i]},
                        {"cap_w", std::isfinite(p.cap_w[i]) ? json(p.cap_w[i]) : json(nullptr)},
                        {"certified", static_cast<bool>(p.certified[i])}});
    }
    return {{"schema_version", 1},
            {"plan_key", plan_key},
            {"window", {p.first_step, p.end_step}},
            {"axes", axes},
            {"vertices", p.vertices}};
}

advset::InnerPolytope polytope_from_json(const json& j, const std::string& where) {
    using namespace jf;
    if (integer(j, "schema_version", where) != 1) throw InputError(where + ".schema_version", "unsupported version");
    advset::InnerPolytope p;
    const auto& win = field(j, "window", where);
    if (!win.is_array() || win.size() != 2) throw InputError(where + ".window", "expected [first, end)");
    p.first_step = win[0].get<int>();
    p.end_step = win[1].get<int>();
    const auto& axes = array(j, "axes", where);
    for (std::size_t i = 0; i < axes.size(); ++i) {
        const auto w = at(where + ".axes", i);
        advset::AdversarialAxis a;
        a.kind = advset::axis_kind_from(str(axes[i], "kind", w));
        a.target = str(axes[i], "target", w);
        const auto& s = field(axes[i], "steps", w);
        if (!s.is_array() || s.size() != 2) throw InputError(w + ".steps", "expected [first, end)");
        a.first_step = s[0].get<int>();
        a.last_step = s[1].get<int>();
        a.sign = static_cast<int>(integer(axes[i], "sign", w));
        p.axes.push_back(a);
        p.alpha_w.push_back(num(axes[i], "alpha_w", w));
        const auto& c = field(axes[i], "cap_w", w);
        p.cap_w.push_back(c.is_null() ? std::numeric_limits<double>::infinity() : c.get<double>());
        p.certified.push_back(axes[i].value("certified", false));
    }
    const auto& v = array(j, "vertices", where);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_array() || v[i].size() != p.dim()) throw InputError(at(where + ".vertices", i), "dimension mismatch");
        p.vertices.push_back(v[i].get<std::vector<double>>());
    }
    if (p.vertices.size() != p.dim() + 1) throw InputError(where + ".vertices", "expected origin plus one per axis");
    return p;
}

std::string vertices_csv(const advset::InnerPolytope& p) {
    std::ostringstream o;
    o << "vertex";
    for (const auto& a : p.axes) o << ',' << a.label();
    o << '\n';
    for (std::size_t v = 0; v < p.vertices.size(); ++v) {
        o << v;
        for (double x : p.vertices[v]) o << ',' << fmt(x);
        o << '\n';
    }
    return o.str();
}

std::string polygon_csv(const advset::InnerPolytope& p, const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
    std::ostringstream o;
    o << "axis_x,axis_y,vertex,x_w,y_w,area_w2\n";
    for (auto [i, j] : pairs) {
        const auto pg = advset::project_2d(p, i, j);
        const double area = pg.area();
        for (std::size_t v = 0; v < pg.vertices.size(); ++v)
            o << p.axes[i].label() << ',' << p.axes[j].label() << ',' << v << ',' << fmt(pg.vertices[v].first) << ','
              << fmt(pg.vertices[v].second) << ',' << fmt(area) << '\n';
    }
    return o.str();
}

std::string trajectory_csv(const grid::NetworkModel& m, const sim::Trajectory& t) {
    std::ostringstream o;
    o << "step,minute,imbalance_w,pool_w,delivered_w,shortfall_w,scheduled_gen_w,gen_loss_w,load_delta_w,pv_w,dg_w,"
         "es_w,realized_gen_w,demand_w,served_load_w,exchange_w,v_min_pu,v_max_pu";
    for (const auto& id : t.device_ids) o << ",deploy_" << id << "_w";
    for (const auto& u : m.storage) o << ",soc_" << u.id << "_wh";
    o << '\n';
    for (const auto& s : t.steps) {
        o << s.step << ',' << fmt(s.minute) << ',' << fmt(s.imbalance_w) << ',' << fmt(s.pool_w) << ','
          << fmt(s.delivered_w) << ',' << fmt(s.shortfall_w) << ',' << fmt(s.scheduled_gen_w) << ','
          << fmt(s.gen_loss_w) << ',' << fmt(s.load_delta_w) << ',' << fmt(s.pv_w) << ',' << fmt(s.dg_w) << ','
          << fmt(s.es_w) << ',' << fmt(s.realized_gen_w) << ',' << fmt(s.demand_w) << ',' << fmt(s.served_load_w)
          << ',' << fmt(s.exchange_w) << ',' << fmt(s.v_min) << ',' << fmt(s.v_max);
        for (double d : s.deploy_w) o << ',' << fmt(d);
        for (double e : s.soc_end_wh) o << ',' << fmt(e);
        o << '\n';
    }
    return o.str();
}

std::string violations_csv(const grid::NetworkModel& m, const sim::Trajectory& t) {
    std::ostringstream o;
    o << "step,minute,class,entity,amount\n";
    for (const auto& v : t.violations)
        o << v.step << ',' << fmt(m.step_minute(v.step)) << ',' << sim::to_string(v.cls) << ',' << v.entity << ','
          << fmt(v.amount) << '\n';
    return o.str();
}

json summary_json(const sim::ViolationSummary& s) {
    json c = json::object(), mx = json::object();
    for (int i = 0; i < static_cast<int>(sim::ViolationClass::Count); ++i) {
        const auto* n = sim::to_string(static_cast<sim::ViolationClass>(i));
        c[n] = s.count[i];
        mx[n] = s.max[i];
    }
    return {{"total", s.total()}, {"count", c}, {"max", mx}};
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

std::string sha256_file(const std::string& path) { return sha256_hex(read_file(path)); }

json manifest_json(const ManifestInfo& info) {
    json in = json::array(), out = json::array();
    for (const auto& p : info.inputs) {
        std::error_code ec;
        auto abs = fs::weakly_canonical(p, ec);
        in.push_back({{"path", ec ? p : abs.string()}, {"sha256", sha256_file(p)}});
    }
    for (const auto& [name, digest] : info.outputs) out.push_back({{"path", name}, {"sha256", digest}});
    return {{"tool", "mgres"},
            {"version", MGRES_VERSION},
            {"command", info.command},
            {"seed", info.seed},
            {"inputs", in},
            {"outputs", out},
            {"elapsed_ms", std::round(info.elapsed_ms * 1000.0) / 1000.0}};
}

std::vector<std::string> verify_manifest(const json& man, const std::string& dir) {
    using namespace jf;
    std::vector<std::string> bad;
    auto check = [&](const char* key, bool relative) {
        const auto& a = array(man, key, "manifest");
        for (std::size_t i = 0; i < a.size(); ++i) {
            const auto w = at(std::string("manifest.") + key, i);
            std::string p = str(a[i], "path", w);
            if (relative) p = (fs::path(dir) / p).string();
            const auto want = str(a[i], "sha256", w);
            std::string got;
            try {
                got = sha256_file(p);
            } catch (const InputError&) {
                bad.push_back(p + ": missing");
                continue;
            }
            if (got != want) bad.push_back(p + ": digest changed");
        }
    };
    check("inputs", false);
    check("outputs", true);
    return bad;
}

}  // namespace mgres::scenario
