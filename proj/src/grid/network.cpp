#include "mgres/grid/network.hpp"

#include <cctype>
#include <cmath>
#include <complex>
#include <deque>
#include <numbers>

#include "mgres/util/errors.hpp"

namespace mgres::grid {

PhaseSet PhaseSet::parse(const std::string& s) {
    std::uint8_t m = 0;
    for (char ch : s) {
        switch (std::tolower(static_cast<unsigned char>(ch))) {
            case 'a': m |= 1; break;
            case 'b': m |= 2; break;
            case 'c': m |= 4; break;
            default: throw InputError("phases", "unknown phase letter in '" + s + "'");
        }
    }
    return PhaseSet(m);
}

std::vector<int> PhaseSet::list() const {
    std::vector<int> out;
    for (int p = 0; p < 3; ++p)
        if (has(p)) out.push_back(p);
    return out;
}

std::string PhaseSet::str() const {
    std::string s;
    for (int p = 0; p < 3; ++p)
        if (has(p)) s.push_back(static_cast<char>('a' + p));
    return s;
}

double LoadPoint::q_ratio() const {
    if (power_factor >= 1.0) return 0.0;
    return std::tan(std::acos(power_factor));
}

double Base::v_ln() const { return kv_ll * 1e3 / std::numbers::sqrt3; }

const std::string& NetworkModel::root_id() const {
    if (!root.empty() || buses.empty()) return root;
    return buses.front().id;
}

namespace {
template <class V>
int find_id(const V& v, const std::string& id) {
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i].id == id) return static_cast<int>(i);
    return -1;
}
}  // namespace

int NetworkModel::bus_index(const std::string& id) const { return find_id(buses, id); }
int NetworkModel::pv_index(const std::string& id) const { return find_id(pv, id); }
int NetworkModel::dg_index(const std::string& id) const { return find_id(dg, id); }
int NetworkModel::storage_index(const std::string& id) const { return find_id(storage, id); }
int NetworkModel::load_index(const std::string& id) const { return find_id(loads, id); }

Topology build_topology(const NetworkModel& model) {
    const int nb = static_cast<int>(model.buses.size());
    const int nl = static_cast<int>(model.branches.size());
    Topology t;
    t.root = model.bus_index(model.root_id());
    if (t.root < 0) throw InputError("root", "reference bus '" + model.root_id() + "' not found");
    std::vector<std::vector<std::pair<int, int>>> adj(nb);  // (branch, other bus)
    for (int l = 0; l < nl; ++l) {
        const int f = model.bus_index(model.branches[l].from);
        const int to = model.bus_index(model.branches[l].to);
        if (f < 0 || to < 0)
            throw InputError("branches." + model.branches[l].id, "endpoint bus not found");
        adj[f].emplace_back(l, to);
        adj[to].emplace_back(l, f);
    }
    t.parent_branch.assign(nb, -1);
    t.branch_from.assign(nl, -1);
    t.branch_to.assign(nl, -1);
    t.child_branches.assign(nb, {});
    std::vector<char> seen(nb, 0);
    std::deque<int> queue{t.root};
    seen[t.root] = 1;
    while (!queue.empty()) {
        const int b = queue.front();
        queue.pop_front();
        t.order.push_back(b);
        for (auto [l, o] : adj[b]) {
            if (l == t.parent_branch[b]) continue;
            if (seen[o]) throw InputError("branches." + model.branches[l].id, "network is not radial");
            seen[o] = 1;
            t.parent_branch[o] = l;
            t.branch_from[l] = b;
            t.branch_to[l] = o;
            t.child_branches[b].push_back(l);
            queue.push_back(o);
        }
    }
    if (static_cast<int>(t.order.size()) != nb) throw InputError("buses", "network is disconnected");
    return t;
}

EffectiveImpedance effective_impedance(const Branch& br, const Base& base) {
    using cd = std::complex<double>;
    const double ang = 2.0 * std::numbers::pi / 3.0;
    const std::array<cd, 3> a{cd(1, 0), std::polar(1.0, -ang), std::polar(1.0, ang)};
    const double zb = base.z_ohm();
    EffectiveImpedance out;
    for (int p = 0; p < 3; ++p) {
        if (!br.phases.has(p)) continue;
        cd z = 0;
        for (int q = 0; q < 3; ++q) {
            if (!br.phases.has(q)) continue;
            z += std::conj(a[p]) * cd(br.r_ohm[p][q], br.x_ohm[p][q]) * a[q];
        }
        out.r[p] = z.real() / zb;
        out.x[p] = z.imag() / zb;
    }
    return out;
}

}  // namespace mgres::grid
