#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mgres/grid/network.hpp"
#include "mgres/lp/linear_program.hpp"

namespace mgres::flow {

// Blocks are laid out in this order; within a block, entity (model order),
// then phase, then time.
enum class VarKind : int {
    W,
    Pflow,
    Qflow,
    Ppv,
    Qpv,
    Pdg,
    Qdg,
    Pes,
    Qes,
    Pload,
    Qload,
    Soc,       // per storage unit, steps first..first+n inclusive
    Xp,        // per-phase exchange at the reference bus (optional)
    Xq,
    RpvUp,     // reserves, per device and step (optional)
    RpvDn,
    RdgUp,
    RdgDn,
    ResUp,
    ResDn,
    RloadUp,
    RloadDn,
    Count
};

const char* to_string(VarKind k);

struct NamespaceOptions {
    int first_step = 0;
    int num_steps = -1;  // -1: to the end of the horizon
    bool reserves = false;
    bool phase_exchange = false;
};

// Index maps from (entity, phase, step) to LP columns. Steps are absolute
// horizon indices. Branch entities follow model order; flow sign is from the
// upstream (root side) bus to the downstream bus.
class VariableNamespace {
public:
    VariableNamespace(const grid::NetworkModel& model, NamespaceOptions opt = {});

    std::size_t w(int bus, int ph, int k) const { return at(VarKind::W, bus, ph, k); }
    std::size_t pflow(int br, int ph, int k) const { return at(VarKind::Pflow, br, ph, k); }
    std::size_t qflow(int br, int ph, int k) const { return at(VarKind::Qflow, br, ph, k); }
    std::size_t ppv(int d, int ph, int k) const { return at(VarKind::Ppv, d, ph, k); }
    std::size_t qpv(int d, int ph, int k) const { return at(VarKind::Qpv, d, ph, k); }
    std::size_t pdg(int d, int ph, int k) const { return at(VarKind::Pdg, d, ph, k); }
    std::size_t qdg(int d, int ph, int k) const { return at(VarKind::Qdg, d, ph, k); }
    std::size_t pes(int d, int ph, int k) const { return at(VarKind::Pes, d, ph, k); }
    std::size_t qes(int d, int ph, int k) const { return at(VarKind::Qes, d, ph, k); }
    std::size_t pload(int d, int ph, int k) const { return at(VarKind::Pload, d, ph, k); }
    std::size_t qload(int d, int ph, int k) const { return at(VarKind::Qload, d, ph, k); }
    std::size_t soc(int d, int k) const { return at(VarKind::Soc, d, 0, k); }
    std::size_t xp(int ph, int k) const { return at(VarKind::Xp, 0, ph, k); }
    std::size_t xq(int ph, int k) const { return at(VarKind::Xq, 0, ph, k); }
    std::size_t reserve(VarKind kind, int d, int k) const { return at(kind, d, 0, k); }

    // Generic lookup; throws std::out_of_range on a missing slot.
    std::size_t at(VarKind kind, int entity, int ph, int k) const;
    bool has(VarKind kind) const { return blocks_[static_cast<int>(kind)].count > 0; }

    std::size_t size() const { return names_.size(); }
    std::size_t count(VarKind kind) const { return blocks_[static_cast<int>(kind)].count; }
    const std::string& name(std::size_t j) const { return names_.at(j); }
    const std::vector<std::string>& names() const { return names_; }

    int first_step() const { return first_; }
    int num_steps() const { return steps_; }
    int end_step() const { return first_ + steps_; }
    bool reserves() const { return opt_.reserves; }
    bool phase_exchange() const { return opt_.phase_exchange; }
    const grid::Topology& topology() const { return topo_; }

    // Declares every column as a free variable, in index order.
    void declare(lp::LinearProgram& lp) const;

private:
    struct Block {
        std::size_t offset = 0;
        std::size_t count = 0;
        int len = 0;                    // time slots per (entity, phase)
        std::vector<long> base;         // per entity*3+phase, -1 if absent
    };
    void add_block(VarKind kind, const std::vector<std::pair<std::string, grid::PhaseSet>>& ents, int len);

    NamespaceOptions opt_;
    int first_ = 0;
    int steps_ = 0;
    grid::Topology topo_;
    std::vector<Block> blocks_;
    std::vector<std::string> names_;
};

}  // namespace mgres::flow
