#include "mgres/flow/namespace.hpp"

#include <stdexcept>

#include "mgres/util/errors.hpp"

namespace mgres::flow {

const char* to_string(VarKind k) {
    static const char* names[] = {"w",    "Pflow", "Qflow", "Ppv",   "Qpv",   "Pdg",   "Qdg",    "Pes",
                                  "Qes",  "Pload", "Qload", "E",     "Xp",    "Xq",    "Rpv+",   "Rpv-",
                                  "Rdg+", "Rdg-",  "Res+",  "Res-",  "Rload+", "Rload-"};
    const int i = static_cast<int>(k);
    return i >= 0 && i < static_cast<int>(VarKind::Count) ? names[i] : "?";
}

VariableNamespace::VariableNamespace(const grid::NetworkModel& m, NamespaceOptions opt)
    : opt_(opt), topo_(grid::build_topology(m)) {
    first_ = opt.first_step;
    steps_ = opt.num_steps < 0 ? m.steps - first_ : opt.num_steps;
    if (first_ < 0 || steps_ < 1 || first_ + steps_ > m.steps)
        throw InputError("namespace", "step window outside the horizon");
    blocks_.resize(static_cast<int>(VarKind::Count));

    using Ents = std::vector<std::pair<std::string, grid::PhaseSet>>;
    Ents buses, branches, pv, dg, es, loads, es_units, pv_units, dg_units, load_units, root;
    for (const auto& b : m.buses) buses.emplace_back(b.id, b.phases);
    for (const auto& b : m.branches) branches.emplace_back(b.id, b.phases);
    const grid::PhaseSet one(1);
    for (const auto& d : m.pv) pv.emplace_back(d.id, d.phases), pv_units.emplace_back(d.id, one);
    for (const auto& d : m.dg) dg.emplace_back(d.id, d.phases), dg_units.emplace_back(d.id, one);
    for (const auto& d : m.storage) es.emplace_back(d.id, d.phases), es_units.emplace_back(d.id, one);
    for (const auto& d : m.loads) loads.emplace_back(d.id, d.phases), load_units.emplace_back(d.id, one);
    root.emplace_back(m.buses[topo_.root].id, m.buses[topo_.root].phases);

    add_block(VarKind::W, buses, steps_);
    add_block(VarKind::Pflow, branches, steps_);
    add_block(VarKind::Qflow, branches, steps_);
    add_block(VarKind::Ppv, pv, steps_);
    add_block(VarKind::Qpv, pv, steps_);
    add_block(VarKind::Pdg, dg, steps_);
    add_block(VarKind::Qdg, dg, steps_);
    add_block(VarKind::Pes, es, steps_);
    add_block(VarKind::Qes, es, steps_);
    add_block(VarKind::Pload, loads, steps_);
    add_block(VarKind::Qload, loads, steps_);
    add_block(VarKind::Soc, es_units, steps_ + 1);
    if (opt.phase_exchange) {
        add_block(VarKind::Xp, root, steps_);
        add_block(VarKind::Xq, root, steps_);
    }
    if (opt.reserves) {
        add_block(VarKind::RpvUp, pv_units, steps_);
        add_block(VarKind::RpvDn, pv_units, steps_);
        add_block(VarKind::RdgUp, dg_units, steps_);
        add_block(VarKind::RdgDn, dg_units, steps_);
        add_block(VarKind::ResUp, es_units, steps_);
        add_block(VarKind::ResDn, es_units, steps_);
        add_block(VarKind::RloadUp, load_units, steps_);
        add_block(VarKind::RloadDn, load_units, steps_);
    }
}

void VariableNamespace::add_block(VarKind kind, const std::vector<std::pair<std::string, grid::PhaseSet>>& ents,
                                  int len) {
    auto& b = blocks_[static_cast<int>(kind)];
    b.offset = names_.size();
    b.len = len;
    b.base.assign(ents.size() * 3, -1);
    const bool phased = kind < VarKind::Soc || kind == VarKind::Xp || kind == VarKind::Xq;
    for (std::size_t e = 0; e < ents.size(); ++e) {
        for (int ph : ents[e].second.list()) {
            b.base[e * 3 + ph] = static_cast<long>(names_.size());
            for (int t = 0; t < len; ++t) {
                std::string n = std::string(to_string(kind)) + "[" + ents[e].first;
                if (phased) n += "." + std::string(1, static_cast<char>('a' + ph));
                n += "," + std::to_string(first_ + t) + "]";
                names_.push_back(std::move(n));
            }
        }
    }
    b.count = names_.size() - b.offset;
}

std::size_t VariableNamespace::at(VarKind kind, int entity, int ph, int k) const {
    const auto& b = blocks_[static_cast<int>(kind)];
    const int t = k - first_;
    const std::size_t slot = static_cast<std::size_t>(entity) * 3 + ph;
    if (entity < 0 || ph < 0 || ph > 2 || slot >= b.base.size() || b.base[slot] < 0 || t < 0 || t >= b.len)
        throw std::out_of_range(std::string("no variable ") + to_string(kind) + " entity " +
                                std::to_string(entity) + " phase " + std::to_string(ph) + " step " +
                                std::to_string(k));
    return static_cast<std::size_t>(b.base[slot] + t);
}

void VariableNamespace::declare(lp::LinearProgram& lp) const {
    for (const auto& n : names_) lp.add_variable(n, -lp::kInf, lp::kInf);
}

}  // namespace mgres::flow
