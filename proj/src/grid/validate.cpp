#include "mgres/grid/validate.hpp"

#include <cmath>
#include <deque>
#include <set>
#include <sstream>

#include "mgres/util/errors.hpp"

namespace mgres::grid {

bool ValidationReport::has(const std::string& code) const {
    for (const auto& i : issues)
        if (i.code == code) return true;
    return false;
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < issues.size(); ++i) {
        if (i) os << "; ";
        os << issues[i].code << " [" << issues[i].entity << "]: " << issues[i].message;
    }
    return os.str();
}

namespace {

struct Checker {
    const NetworkModel& m;
    ValidationReport rep;

    void add(std::string code, std::string entity, std::string msg) {
        rep.issues.push_back({std::move(code), std::move(entity), std::move(msg)});
    }

    template <class V>
    void unique_ids(const V& v, const char* what) {
        std::set<std::string> seen;
        for (const auto& e : v) {
            if (e.id.empty()) add("empty_id", what, std::string("a ") + what + " has an empty id");
            else if (!seen.insert(e.id).second)
                add("duplicate_id", e.id, std::string("duplicate ") + what + " id");
        }
    }

    void profile(const std::string& id, const char* field, const std::vector<double>& v) {
        if (static_cast<int>(v.size()) != m.steps)
            add("profile_length", id,
                std::string(field) + " has " + std::to_string(v.size()) + " values, horizon has " +
                    std::to_string(m.steps));
        for (double x : v)
            if (!std::isfinite(x) || x < 0) {
                add("profile_value", id, std::string(field) + " has a negative or non-finite value");
                break;
            }
    }

    bool device_bus(const std::string& id, const std::string& bus, PhaseSet ph) {
        const int b = m.bus_index(bus);
        if (b < 0) {
            add("unknown_bus", id, "references missing bus '" + bus + "'");
            return false;
        }
        if (ph.empty()) add("phase_mismatch", id, "empty phase set");
        else if (!ph.subset_of(m.buses[b].phases))
            add("phase_mismatch", id, "phases " + ph.str() + " not present at bus " + bus);
        return true;
    }

    void positive(const std::string& id, const char* field, double v) {
        if (!(v > 0) || !std::isfinite(v)) add("nonpositive", id, std::string(field) + " must be > 0");
    }

    void run() {
        if (m.buses.empty()) add("empty", "buses", "model has no buses");
        if (m.steps < 1) add("horizon", "horizon", "steps must be >= 1");
        if (!(m.dt_minutes > 0)) add("horizon", "horizon", "dt_minutes must be > 0");
        if (!(m.base.kv_ll > 0) || !(m.base.mva > 0)) add("base", "base", "base quantities must be > 0");
        unique_ids(m.buses, "bus");
        unique_ids(m.branches, "branch");
        unique_ids(m.pv, "pv");
        unique_ids(m.dg, "dg");
        unique_ids(m.storage, "storage");
        unique_ids(m.loads, "load");

        for (const auto& b : m.buses) {
            if (b.phases.empty()) add("phase_mismatch", b.id, "bus has no phases");
            if (!(b.v_min > 0 && b.v_min < b.v_max))
                add("voltage_limits", b.id, "requires 0 < v_min < v_max");
        }
        if (!m.buses.empty() && m.bus_index(m.root_id()) < 0)
            add("unknown_bus", "root", "reference bus '" + m.root_id() + "' not found");

        topology();

        for (const auto& br : m.branches) {
            if (br.phases.empty()) add("phase_mismatch", br.id, "branch has no phases");
            bool finite = true;
            for (int p = 0; p < 3; ++p)
                for (int q = 0; q < 3; ++q)
                    finite = finite && std::isfinite(br.r_ohm[p][q]) && std::isfinite(br.x_ohm[p][q]);
            if (!finite) add("impedance", br.id, "impedance is not finite");
            positive(br.id, "flow_limit_va", br.flow_limit_va);
        }
        for (const auto& d : m.pv) {
            device_bus(d.id, d.bus, d.phases);
            positive(d.id, "capacity_va", d.capacity_va);
            profile(d.id, "forecast_w", d.forecast_w);
        }
        for (const auto& d : m.dg) {
            device_bus(d.id, d.bus, d.phases);
            positive(d.id, "capacity_va", d.capacity_va);
        }
        for (const auto& d : m.storage) {
            device_bus(d.id, d.bus, d.phases);
            positive(d.id, "power_w", d.power_w);
            positive(d.id, "capacity_va", d.capacity_va);
            if (!(d.energy_min_wh >= 0 && d.energy_min_wh < d.energy_max_wh))
                add("storage_energy", d.id, "requires 0 <= energy_min < energy_max");
            if (!(d.initial_wh >= d.energy_min_wh && d.initial_wh <= d.energy_max_wh))
                add("storage_energy", d.id, "initial SoC outside [energy_min, energy_max]");
        }
        for (const auto& d : m.loads) {
            device_bus(d.id, d.bus, d.phases);
            if (!(d.power_factor > 0 && d.power_factor <= 1))
                add("power_factor", d.id, "power factor must lie in (0, 1]");
            profile(d.id, "p_des_w", d.p_des_w);
            profile(d.id, "p_min_w", d.p_min_w);
            const auto n = std::min(d.p_des_w.size(), d.p_min_w.size());
            for (std::size_t k = 0; k < n; ++k)
                if (d.p_min_w[k] > d.p_des_w[k]) {
                    add("load_bounds", d.id, "p_min exceeds p_des at step " + std::to_string(k));
                    break;
                }
        }
    }

    // Connectivity and cycles by breadth-first search over every component.
    void topology() {
        const int nb = static_cast<int>(m.buses.size());
        if (nb == 0) return;
        std::vector<std::vector<std::pair<int, int>>> adj(nb);
        for (int l = 0; l < static_cast<int>(m.branches.size()); ++l) {
            const auto& br = m.branches[l];
            const int f = m.bus_index(br.from), t = m.bus_index(br.to);
            if (f < 0 || t < 0) {
                add("unknown_bus", br.id, "branch endpoint not found");
                continue;
            }
            if (f == t) {
                add("cycle", br.id, "self loop");
                continue;
            }
            adj[f].emplace_back(l, t);
            adj[t].emplace_back(l, f);
        }
        std::vector<int> comp(nb, -1);
        std::vector<int> via(nb, -1);
        int ncomp = 0;
        bool cycle = false;
        int start = std::max(0, m.bus_index(m.root_id()));
        for (int s0 = 0; s0 < nb; ++s0) {
            const int s = s0 == 0 ? start : (s0 == start ? 0 : s0);
            if (comp[s] >= 0) continue;
            std::deque<int> q{s};
            comp[s] = ncomp;
            while (!q.empty()) {
                const int b = q.front();
                q.pop_front();
                for (auto [l, o] : adj[b]) {
                    if (l == via[b]) continue;
                    if (comp[o] >= 0) {
                        // each non-tree edge is seen from both ends; report once
                        if (!cycle) add("cycle", m.branches[l].id, "branch closes a loop");
                        cycle = true;
                        continue;
                    }
                    comp[o] = ncomp;
                    via[o] = l;
                    q.push_back(o);
                }
            }
            ++ncomp;
        }
        if (ncomp > 1) {
            for (int b = 0; b < nb; ++b)
                if (comp[b] != comp[start]) {
                    add("disconnected", m.buses[b].id, "bus not reachable from the reference bus");
                    break;
                }
        }
        if (static_cast<int>(m.branches.size()) != nb - 1 && !cycle && ncomp == 1)
            add("branch_count", "branches", "branch count must equal bus count - 1");
        if (cycle || ncomp > 1) return;
        // phase nesting along the oriented tree
        for (int b = 0; b < nb; ++b) {
            const int l = via[b];
            if (l < 0) continue;
            const auto& br = m.branches[l];
            const int parent = m.bus_index(br.from) == b ? m.bus_index(br.to) : m.bus_index(br.from);
            if (!br.phases.subset_of(m.buses[parent].phases))
                add("phase_mismatch", br.id, "branch phases not present at upstream bus");
            // a branch phase that stops at the child bus would carry no defined flow
            if (!(m.buses[b].phases == br.phases))
                add("phase_mismatch", m.buses[b].id, "bus phases differ from its parent branch phases");
        }
    }
};

}  // namespace

ValidationReport validate(const NetworkModel& model) {
    Checker c{model, {}};
    c.run();
    return c.rep;
}

void require_valid(const NetworkModel& model) {
    auto rep = validate(model);
    if (!rep.ok()) throw InputError("network", rep.summary());
}

}  // namespace mgres::grid
